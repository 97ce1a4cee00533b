#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "tvecm/rng.hpp"
#include "tvecm/simulate.hpp"
#include "tvecm/vecm.hpp"

using namespace tvecm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct TrueEcm {
  MatrixXd gamma1{2, 2};
  VectorXd alpha{2};
  VectorXd beta{2};
  VectorXd mu{2};
};

// Deterministic bivariate ECM path.  The rotation block keeps the lagged
// differences oscillating instead of decaying, so the regressors stay well
// conditioned over a short sample.
Panel noise_free_panel(const TrueEcm& w, int T) {
  Panel p;
  p.dates = testutil::int_labels(T);
  p.names = {"s1", "s2"};
  p.values.resize(T, 2);
  p.values.row(0) << 1.0, 0.0;
  p.values.row(1) << 0.3, 1.2;
  const MatrixXd pi = w.alpha * w.beta.transpose();
  for (int t = 2; t < T; ++t) {
    const VectorXd dprev =
        (p.values.row(t - 1) - p.values.row(t - 2)).transpose();
    const VectorXd dx =
        w.gamma1 * dprev + pi * p.values.row(t - 1).transpose() + w.mu;
    p.values.row(t) = p.values.row(t - 1) + dx.transpose();
  }
  return p;
}

TrueEcm rotation_ecm() {
  TrueEcm w;
  w.gamma1 << 0.866, -0.5,
              0.5, 0.866;
  w.alpha << -0.2, 0.1;
  w.beta << 1.0, -1.0;
  w.mu << 0.05, -0.03;
  return w;
}

SimSpec bivariate_dgp(std::uint64_t seed, int T, double a1, double a2) {
  SimSpec s;
  s.m = 2;
  s.r = 1;
  s.T = T;
  s.seed = seed;
  s.beta = MatrixXd(2, 1);
  s.beta << 1.0, -1.0;
  MatrixXd a(2, 1);
  a << a1, a2;
  s.alpha = AlphaSchedule::constant(a);
  s.gamma = {0.1 * MatrixXd::Identity(2, 2)};
  s.intercept = VectorXd::Zero(2);
  s.noise_scale = VectorXd::Constant(2, 1.0);
  return s;
}

}  // namespace

TEST_CASE("noise-free system is recovered exactly") {
  const TrueEcm w = rotation_ecm();
  Panel p = noise_free_panel(w, 40);
  VecmSpec spec;
  spec.lag_k = 1;
  VecmFit fit = estimate_vecm(p, spec);

  REQUIRE(fit.coef.rows() == 5);  // ds1.l1 ds2.l1 const s1.l s2.l
  REQUIRE(fit.coef.cols() == 2);
  CHECK(fit.colnames == std::vector<std::string>{"ds1.l1", "ds2.l1", "const",
                                                 "s1.l", "s2.l"});
  const MatrixXd pi = w.alpha * w.beta.transpose();
  for (int e = 0; e < 2; ++e) {
    CHECK(std::abs(fit.coef(0, e) - w.gamma1(e, 0)) <= 1e-8);
    CHECK(std::abs(fit.coef(1, e) - w.gamma1(e, 1)) <= 1e-8);
    CHECK(std::abs(fit.coef(2, e) - w.mu(e)) <= 1e-8);
    CHECK(std::abs(fit.coef(3, e) - pi(e, 0)) <= 1e-8);
    CHECK(std::abs(fit.coef(4, e) - pi(e, 1)) <= 1e-8);
  }
  CHECK(fit.resid.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(fit.adj_r2.minCoeff() > 0.999999);
  CHECK(fit.effective_T == 38);
  CHECK(!fit.restricted);
}

TEST_CASE("restricted form: supplied beta, orthogonality, reconstruction") {
  const TrueEcm w = rotation_ecm();
  Panel p = noise_free_panel(w, 40);
  VecmSpec spec;
  spec.lag_k = 1;
  MatrixXd beta(2, 1);
  beta << 1.0, -1.0;
  VecmFit fit = estimate_vecm(p, spec, beta);

  REQUIRE(fit.coef.rows() == 4);
  CHECK(fit.colnames.back() == "ecm1");
  CHECK(fit.restricted);
  CHECK(std::abs(fit.coef(3, 0) - w.alpha(0)) <= 1e-8);
  CHECK(std::abs(fit.coef(3, 1) - w.alpha(1)) <= 1e-8);

  // least-squares orthogonality and exact reconstruction per equation
  const int n = fit.effective_T;
  MatrixXd Y(n, 2);
  for (int i = 0; i < n; ++i)
    Y.row(i) = p.values.row(i + 2) - p.values.row(i + 1);
  for (int e = 0; e < 2; ++e) {
    CHECK((fit.X.transpose() * fit.resid.col(e)).cwiseAbs().maxCoeff() <= 1e-9);
    const VectorXd rebuilt = fit.X * fit.coef.col(e) + fit.resid.col(e);
    CHECK((rebuilt - Y.col(e)).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(fit.dates.size() == static_cast<size_t>(n));
  CHECK(fit.dates.front() == p.dates[2]);
}

TEST_CASE("effective sample convention and default bandwidth on 308 rows") {
  Panel p = testutil::rw_panel(308, 6, 4242);
  VecmSpec spec;
  spec.lag_k = 1;
  VecmFit fit = estimate_vecm(p, spec);
  CHECK(fit.effective_T == 306);
  CHECK(fit.resid.rows() == 306);
  CHECK(fit.nw_bandwidth == 5);
  CHECK(fit.coef.rows() == 6 + 1 + 6);
  CHECK(fit.se.cwiseAbs().minCoeff() > 0.0);
}

TEST_CASE("loading estimates are consistent (Monte Carlo medians)") {
  MatrixXd beta(2, 1);
  beta << 1.0, -1.0;
  VecmSpec spec;
  spec.lag_k = 1;
  std::vector<double> a1, a2;
  for (int i = 0; i < 200; ++i) {
    Panel p = simulate_vecm(bivariate_dgp(derive_seed(6100, i), 2000, -0.2, 0.1));
    VecmFit fit = estimate_vecm(p, spec, beta);
    a1.push_back(fit.coef(3, 0));
    a2.push_back(fit.coef(3, 1));
  }
  std::sort(a1.begin(), a1.end());
  std::sort(a2.begin(), a2.end());
  CHECK(std::abs(0.5 * (a1[99] + a1[100]) + 0.2) <= 0.05);
  CHECK(std::abs(0.5 * (a2[99] + a2[100]) - 0.1) <= 0.05);
}

TEST_CASE("bandwidth rule") {
  CHECK(newey_west_default_bandwidth(306) == 5);
  CHECK(newey_west_default_bandwidth(500) == 5);
  CHECK(newey_west_default_bandwidth(100) == 4);
  CHECK(newey_west_default_bandwidth(99) == 3);
  CHECK(newey_west_default_bandwidth(50) == 3);
  CHECK(newey_west_default_bandwidth(1) == 1);
  CHECK_THROWS_AS(newey_west_default_bandwidth(0), SizeError);
}

TEST_CASE("HAC covariance: zero bandwidth is White, longhand oracle, symmetry") {
  Rng rng(314);
  const int n = 60, p = 3;
  MatrixXd X(n, p);
  VectorXd e(n);
  for (int t = 0; t < n; ++t) {
    X(t, 0) = 1.0;
    X(t, 1) = rng.normal();
    X(t, 2) = rng.uniform01();
    e(t) = rng.normal() * (1.0 + 0.5 * rng.uniform01());
  }

  const MatrixXd bread =
      (X.transpose() * X).ldlt().solve(MatrixXd::Identity(p, p));

  // bandwidth 0: heteroskedasticity-robust sandwich, computed longhand
  MatrixXd meat0 = MatrixXd::Zero(p, p);
  for (int t = 0; t < n; ++t)
    meat0 += e(t) * e(t) * X.row(t).transpose() * X.row(t);
  const MatrixXd white = bread * meat0 * bread;
  CHECK((newey_west_cov(X, e, 0) - white).cwiseAbs().maxCoeff() <= 1e-12);

  // bandwidth 2: Bartlett weights written out term by term
  MatrixXd meat = meat0;
  for (int j = 1; j <= 2; ++j) {
    const double wj = 1.0 - j / 3.0;
    for (int t = j; t < n; ++t) {
      const MatrixXd cross =
          e(t) * e(t - j) * X.row(t).transpose() * X.row(t - j);
      meat += wj * (cross + cross.transpose());
    }
  }
  const MatrixXd oracle = bread * meat * bread;
  const MatrixXd got = newey_west_cov(X, e, 2);
  CHECK((got - oracle).cwiseAbs().maxCoeff() <=
        1e-12 * oracle.cwiseAbs().maxCoeff());
  CHECK((got - got.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(newey_west_cov(X, e.head(10), 2), SizeError);
  CHECK_THROWS_AS(newey_west_cov(X, e, -1), DomainError);
  CHECK_THROWS_AS(newey_west_cov(X, e, n), SizeError);
}

TEST_CASE("HAC standard errors match classical ones for white-noise errors") {
  const int n = 500;
  std::vector<double> ratio;
  for (int i = 0; i < 200; ++i) {
    Rng rng(derive_seed(6200, i));
    MatrixXd X(n, 2);
    VectorXd y(n);
    for (int t = 0; t < n; ++t) {
      X(t, 0) = 1.0;
      X(t, 1) = rng.normal();
      y(t) = 0.5 + 0.8 * X(t, 1) + rng.normal();
    }
    const MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(MatrixXd::Identity(2, 2));
    const VectorXd coef = xtx_inv * (X.transpose() * y);
    const VectorXd resid = y - X * coef;
    const double s2 = resid.squaredNorm() / (n - 2);
    const double classical = std::sqrt(s2 * xtx_inv(1, 1));
    const MatrixXd V = newey_west_cov(X, resid, newey_west_default_bandwidth(n));
    ratio.push_back(std::sqrt(V(1, 1)) / classical);
  }
  std::sort(ratio.begin(), ratio.end());
  const double med = 0.5 * (ratio[99] + ratio[100]);
  CHECK(med > 0.9);
  CHECK(med < 1.1);
}

TEST_CASE("parameter-constancy statistic: scores, nonnegativity, longhand") {
  Panel p = simulate_vecm(bivariate_dgp(8080, 400, -0.4, 0.4));
  VecmSpec spec;
  spec.lag_k = 1;
  VecmFit fit = estimate_vecm(p, spec);
  HansenLcResult h = hansen_lc(fit);

  const int n = fit.effective_T;
  const int pcols = static_cast<int>(fit.X.cols());
  const int m = static_cast<int>(fit.resid.cols());
  CHECK(h.n_params == m * (pcols + 1));
  CHECK(h.lc >= 0.0);

  // rebuild the score matrix and the statistic with plain loops
  MatrixXd F(n, h.n_params);
  for (int e = 0; e < m; ++e) {
    double sigma2 = 0.0;
    for (int t = 0; t < n; ++t) sigma2 += fit.resid(t, e) * fit.resid(t, e);
    sigma2 /= n;
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < pcols; ++j)
        F(t, e * (pcols + 1) + j) = fit.X(t, j) * fit.resid(t, e);
      F(t, e * (pcols + 1) + pcols) =
          fit.resid(t, e) * fit.resid(t, e) - sigma2;
    }
  }
  // full-sample cumulative score vanishes by the normal equations
  const VectorXd sT = F.colwise().sum();
  const double scale = F.cwiseAbs().colwise().sum().maxCoeff();
  CHECK(sT.cwiseAbs().maxCoeff() <= 1e-8 * scale);

  const MatrixXd Vinv =
      (F.transpose() * F).ldlt().solve(MatrixXd::Identity(h.n_params, h.n_params));
  double acc = 0.0;
  VectorXd S = VectorXd::Zero(h.n_params);
  for (int t = 0; t < n; ++t) {
    S += F.row(t).transpose();
    acc += S.dot(Vinv * S);
  }
  CHECK(std::abs(h.lc - acc / n) <= 1e-8 * (1.0 + std::abs(h.lc)));
}

TEST_CASE("parameter-constancy statistic rises under a loading break") {
  MatrixXd beta(2, 1);
  beta << 1.0, -1.0;
  VecmSpec spec;
  spec.lag_k = 1;
  MatrixXd before(2, 1), after(2, 1);
  before << -0.5, 0.5;
  after << -0.05, 0.05;

  int rose = 0;
  const int pairs = 20;
  for (int i = 0; i < pairs; ++i) {
    SimSpec stable = bivariate_dgp(derive_seed(6300, i), 400, -0.5, 0.5);
    SimSpec broken = stable;
    broken.alpha = AlphaSchedule::step(before, after, 200);
    const double lc_stable =
        hansen_lc(estimate_vecm(simulate_vecm(stable), spec, beta)).lc;
    const double lc_broken =
        hansen_lc(estimate_vecm(simulate_vecm(broken), spec, beta)).lc;
    if (lc_broken > lc_stable) ++rose;
  }
  CHECK(rose >= 17);
}

TEST_CASE("estimation guards") {
  Panel p = testutil::rw_panel(120, 2, 9);
  VecmSpec spec;
  spec.lag_k = 1;

  MatrixXd bad_rows(3, 1);
  bad_rows.setOnes();
  CHECK_THROWS_AS(estimate_vecm(p, spec, bad_rows), SizeError);
  MatrixXd full_rank(2, 2);
  full_rank.setIdentity();
  CHECK_THROWS_AS(estimate_vecm(p, spec, full_rank), SizeError);

  VecmSpec deep;
  deep.lag_k = 30;  // >= T/4
  CHECK_THROWS_AS(estimate_vecm(p, deep), SizeError);

  // a constant series makes its level column collinear with the intercept
  Panel flat = p;
  flat.values.col(1).setConstant(3.5);
  CHECK_THROWS_AS(estimate_vecm(flat, spec), NumericalError);

  // an exactly-zero residual column makes the score covariance singular
  Rng rng(17);
  VecmFit degenerate;
  degenerate.effective_T = 50;
  degenerate.lag_k = 1;
  degenerate.X.resize(50, 2);
  degenerate.resid.resize(50, 2);
  for (int t = 0; t < 50; ++t) {
    degenerate.X(t, 0) = 1.0;
    degenerate.X(t, 1) = rng.normal();
    degenerate.resid(t, 0) = 0.0;
    degenerate.resid(t, 1) = rng.normal();
  }
  CHECK_THROWS_AS(hansen_lc(degenerate), NumericalError);
}

TEST_CASE("bandwidth override is honored and recorded") {
  Panel p = simulate_vecm(bivariate_dgp(55, 300, -0.4, 0.4));
  VecmSpec spec;
  spec.lag_k = 1;
  VecmFit white = estimate_vecm(p, spec, {}, 0);
  CHECK(white.nw_bandwidth == 0);
  for (int e = 0; e < 2; ++e) {
    const MatrixXd V = newey_west_cov(white.X, white.resid.col(e), 0);
    CHECK((white.se.col(e).array() - V.diagonal().array().sqrt())
              .abs()
              .maxCoeff() <= 1e-12);
  }
  VecmFit dflt = estimate_vecm(p, spec);
  CHECK(dflt.nw_bandwidth == newey_west_default_bandwidth(dflt.effective_T));
}
