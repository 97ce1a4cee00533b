#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "tvecm/errors.hpp"
#include "tvecm/rng.hpp"
#include "tvecm/simulate.hpp"
#include "tvecm/tv_vecm.hpp"
#include "tvecm/vecm.hpp"

using namespace tvecm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// small cointegrated panel with fixed loadings (for cross-checks against the
// time-invariant estimator)
Panel fixed_alpha_panel(int T, std::uint64_t seed,
                        double a1 = -0.3, double a2 = 0.2) {
  SimSpec spec;
  spec.m = 2;
  spec.r = 1;
  spec.T = T;
  spec.seed = seed;
  spec.beta = MatrixXd(2, 1);
  spec.beta << 1.0, -1.0;
  spec.alpha = AlphaSchedule::constant((MatrixXd(2, 1) << a1, a2).finished());
  spec.gamma = {0.1 * MatrixXd::Identity(2, 2)};
  spec.intercept = VectorXd::Zero(2);
  spec.noise_scale = VectorXd::Constant(2, 1.0);
  return simulate_vecm(spec);
}

MatrixXd beta21() {
  MatrixXd b(2, 1);
  b << 1.0, -1.0;
  return b;
}

// hand-assembled 3-observation scalar system (m = 1, no error correction, no
// intercept): the smallest well-posed smoothing problem
StackedSystem tiny_system(double lambda) {
  StackedSystem sys;
  sys.W.resize(3, 1);
  sys.W << 1.0, 2.0, 1.0;
  sys.Y.resize(3, 1);
  sys.Y << 1.0, 4.0, 3.0;
  sys.lambda = lambda;
  sys.constant_intercept = false;
  sys.tv_intercept = false;
  sys.lag_k = 1;
  sys.rank_r = 0;
  sys.dates = {"1", "2", "3"};
  sys.colnames = {"w"};
  sys.eqnames = {"y"};
  return sys;
}

double max_path_range(const std::vector<MatrixXd>& path) {
  double worst = 0.0;
  const int m = static_cast<int>(path.front().rows());
  const int c = static_cast<int>(path.front().cols());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < c; ++j) {
      double lo = path.front()(i, j), hi = lo;
      for (const auto& mat : path) {
        lo = std::min(lo, mat(i, j));
        hi = std::max(hi, mat(i, j));
      }
      worst = std::max(worst, hi - lo);
    }
  return worst;
}

}  // namespace

TEST_CASE("stacked system layout and effective sample") {
  Panel p = fixed_alpha_panel(308, 11);
  p.dates = testutil::month_labels(308);
  TvVecmConfig cfg;
  cfg.lag_k = 1;
  cfg.beta = beta21();
  StackedSystem sys = build_stacked_system(p, cfg);

  CHECK(sys.n() == 306);
  CHECK(sys.q() == 3);  // 2 lagged-diff columns + 1 error-correction column
  CHECK(sys.m() == 2);
  CHECK(sys.obs_rows() == 306);
  CHECK(sys.penalty_rows() == 305 * 3);
  CHECK(sys.constant_intercept);
  CHECK_FALSE(sys.tv_intercept);
  CHECK(sys.lambda == doctest::Approx(306.0));  // smoothness_lambda * n
  REQUIRE(sys.colnames.size() == 3);
  CHECK(sys.colnames[0] == "ds1.l1");
  CHECK(sys.colnames[1] == "ds2.l1");
  CHECK(sys.colnames[2] == "ecm1");
  REQUIRE(static_cast<int>(sys.dates.size()) == 306);
  CHECK(sys.dates.front() == p.dates[2]);
  CHECK(sys.dates.back() == p.dates[307]);

  // W row contents: lagged differences then beta' X_{t-1}
  const int i = 100, t = 102;
  Eigen::RowVectorXd dx = p.values.row(t - 1) - p.values.row(t - 2);
  CHECK(sys.W(i, 0) == doctest::Approx(dx(0)).epsilon(1e-15));
  CHECK(sys.W(i, 1) == doctest::Approx(dx(1)).epsilon(1e-15));
  CHECK(sys.W(i, 2) ==
        doctest::Approx(p.values(t - 1, 0) - p.values(t - 1, 1))
            .epsilon(1e-15));
  Eigen::RowVectorXd dy = p.values.row(t) - p.values.row(t - 1);
  CHECK(sys.Y(i, 0) == doctest::Approx(dy(0)).epsilon(1e-15));
  CHECK(sys.Y(i, 1) == doctest::Approx(dy(1)).epsilon(1e-15));

  // time-varying intercept moves the constant into W
  TvVecmConfig cfg2 = cfg;
  cfg2.time_varying_intercept = true;
  StackedSystem sys2 = build_stacked_system(p, cfg2);
  CHECK(sys2.q() == 4);
  CHECK(sys2.colnames.back() == "const");
  CHECK_FALSE(sys2.constant_intercept);
  CHECK(sys2.tv_intercept);
  for (int row = 0; row < sys2.n(); ++row) CHECK(sys2.W(row, 3) == 1.0);
}

TEST_CASE("penalty operator differences consecutive blocks") {
  StackedSystem sys = tiny_system(2.0);
  MatrixXd path(3, 1);
  path << 1.0, 1.5, 0.5;
  MatrixXd pen = sys.apply_penalty(path);
  REQUIRE(pen.rows() == 2);
  CHECK(pen(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pen(1, 0) == doctest::Approx(-2.0).epsilon(1e-15));

  // constant paths are annihilated exactly
  MatrixXd flat = MatrixXd::Constant(3, 1, 0.7);
  CHECK(sys.apply_penalty(flat).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sys.apply_penalty(MatrixXd::Zero(2, 1)), SizeError);
  CHECK_THROWS_AS(sys.apply_penalty(MatrixXd::Zero(3, 2)), SizeError);
}

TEST_CASE("tiny system: solver matches the dense stacked least squares") {
  // 3 obs + 2 penalty rows: solve the 3x3 dense normal problem longhand via
  // QR on the stacked 5x3 matrix and compare
  for (double lambda : {0.3, 1.0, 5.0}) {
    StackedSystem sys = tiny_system(lambda);
    MatrixXd A = MatrixXd::Zero(5, 3);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    A(2, 2) = 1.0;
    A(3, 0) = -lambda;
    A(3, 1) = lambda;
    A(4, 1) = -lambda;
    A(4, 2) = lambda;
    VectorXd b(5);
    b << 1.0, 4.0, 3.0, 0.0, 0.0;
    const VectorXd ref = A.colPivHouseholderQr().solve(b);

    TvVecmFit fit = solve_smoothing(sys);
    REQUIRE(fit.effective_T == 3);
    REQUIRE(static_cast<int>(fit.gamma_path.size()) == 3);
    for (int t = 0; t < 3; ++t)
      CHECK(fit.gamma_path[t](0, 0) ==
            doctest::Approx(ref(t)).epsilon(1e-10));
    CHECK(fit.intercept.size() == 1);  // m = 1; no intercept column -> zeros
    CHECK(fit.intercept(0) == 0.0);

    // residuals match the stacked solution
    for (int t = 0; t < 3; ++t)
      CHECK(fit.resid(t, 0) ==
            doctest::Approx(sys.Y(t, 0) - sys.W(t, 0) * ref(t))
                .epsilon(1e-10));

    // oracle agrees
    TvVecmFit oracle = kalman_smoother_oracle(sys);
    for (int t = 0; t < 3; ++t)
      CHECK(oracle.gamma_path[t](0, 0) ==
            doctest::Approx(ref(t)).epsilon(1e-10));
  }
}

TEST_CASE("solver and smoother oracle agree on simulated systems") {
  for (int s = 0; s < 10; ++s) {
    Panel p = fixed_alpha_panel(120 + 10 * s, 500 + s);
    TvVecmConfig cfg;
    cfg.beta = beta21();
    cfg.smoothness_lambda = (s % 3 == 0) ? 0.05 : (s % 3 == 1 ? 1.0 : 20.0);
    cfg.time_varying_intercept = (s % 2 == 1);
    StackedSystem sys = build_stacked_system(p, cfg);
    TvVecmFit a = solve_smoothing(sys);
    TvVecmFit b = kalman_smoother_oracle(sys);
    double worst = 0.0;
    for (int t = 0; t < a.effective_T; ++t) {
      worst = std::max(
          worst, (a.gamma_path[t] - b.gamma_path[t]).cwiseAbs().maxCoeff());
      worst = std::max(
          worst, (a.alpha_path[t] - b.alpha_path[t]).cwiseAbs().maxCoeff());
    }
    if (sys.constant_intercept)
      worst = std::max(worst, (a.intercept - b.intercept).cwiseAbs()
                                  .maxCoeff());
    else
      worst = std::max(
          worst, (a.intercept_path - b.intercept_path).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-6);
    CHECK((a.resid - b.resid).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("huge stiffness reproduces the time-invariant estimator") {
  Panel p = fixed_alpha_panel(250, 77);
  TvVecmConfig cfg;
  cfg.beta = beta21();
  cfg.smoothness_lambda = 1e8;
  StackedSystem sys = build_stacked_system(p, cfg);
  TvVecmFit fit = solve_smoothing(sys);

  VecmFit flat = estimate_vecm(p, VecmSpec{}, beta21());
  // restricted coefficient layout: rows ds1.l1, ds2.l1, const, ecm1
  for (int e = 0; e < 2; ++e) {
    for (int t = 0; t < fit.effective_T; t += 49) {
      CHECK(fit.gamma_path[t](e, 0) ==
            doctest::Approx(flat.coef(0, e)).epsilon(1e-4));
      CHECK(fit.gamma_path[t](e, 1) ==
            doctest::Approx(flat.coef(1, e)).epsilon(1e-4));
      CHECK(fit.alpha_path[t](e, 0) ==
            doctest::Approx(flat.coef(3, e)).epsilon(1e-4));
    }
    CHECK(fit.intercept(e) == doctest::Approx(flat.coef(2, e)).epsilon(1e-4));
  }
  // path variation is numerically nil
  CHECK(max_path_range(fit.gamma_path) < 1e-6);
  CHECK(max_path_range(fit.alpha_path) < 1e-6);
}

TEST_CASE("single-period system reduces to ordinary least squares") {
  // one observation row, no penalty rows, no intercept: theta = y * w / w^2
  StackedSystem sys;
  sys.W.resize(1, 1);
  sys.W << 2.0;
  sys.Y.resize(1, 1);
  sys.Y << 3.0;
  sys.lambda = 4.0;  // irrelevant: there are no transitions
  sys.constant_intercept = false;
  sys.lag_k = 1;
  sys.rank_r = 0;
  sys.dates = {"1"};
  sys.colnames = {"w"};
  sys.eqnames = {"y"};
  CHECK(sys.penalty_rows() == 0);

  TvVecmFit fit = solve_smoothing(sys);
  CHECK(fit.gamma_path[0](0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(fit.resid(0, 0)) < 1e-12);

  TvVecmFit oracle = kalman_smoother_oracle(sys);
  CHECK(oracle.gamma_path[0](0, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("vanishing stiffness fits each period exactly") {
  // with q = 1 regressor per period and lambda -> 0 the solution approaches
  // the per-period interpolant y_t / w_t
  StackedSystem sys = tiny_system(1e-6);
  TvVecmFit fit = solve_smoothing(sys);
  CHECK(fit.gamma_path[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.gamma_path[1](0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.gamma_path[2](0, 0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit.resid.cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("comovement degree equals the largest singular value") {
  TvVecmFit fit;
  fit.effective_T = 3;
  fit.dates = {"a", "b", "c"};
  fit.eqnames = {"s1", "s2"};
  fit.lag_k = 1;

  SUBCASE("rank zero gives exact zeros") {
    fit.rank_r = 0;
    for (int t = 0; t < 3; ++t) {
      fit.gamma_path.push_back(MatrixXd::Zero(2, 2));
      fit.alpha_path.push_back(MatrixXd(2, 0));
    }
    ComovementPath path = comovement_degree(fit);
    REQUIRE(path.zeta.size() == 3);
    CHECK(path.zeta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(path.delta_zeta.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single column is the Euclidean norm") {
    fit.rank_r = 1;
    MatrixXd a(2, 1);
    a << 0.3, 0.4;
    for (int t = 0; t < 3; ++t) {
      fit.gamma_path.push_back(MatrixXd::Zero(2, 2));
      fit.alpha_path.push_back(a * (t + 1));
    }
    ComovementPath path = comovement_degree(fit);
    CHECK(path.zeta(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path.zeta(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(path.zeta(2) == doctest::Approx(1.5).epsilon(1e-12));
    REQUIRE(path.delta_zeta.size() == 2);
    CHECK(path.delta_zeta(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path.delta_zeta(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path.dates == fit.dates);
  }

  SUBCASE("multi-column case matches a dense eigensolver") {
    fit.eqnames = {"s1", "s2", "s3"};
    fit.rank_r = 2;
    Rng rng(404);
    std::vector<MatrixXd> mats;
    for (int t = 0; t < 3; ++t) {
      MatrixXd a(3, 2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = rng.normal();
      mats.push_back(a);
      fit.gamma_path.push_back(MatrixXd::Zero(3, 3));
      fit.alpha_path.push_back(a);
    }
    ComovementPath path = comovement_degree(fit);
    for (int t = 0; t < 3; ++t) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(mats[t].transpose() *
                                                 mats[t]);
      const double expect = std::sqrt(es.eigenvalues().maxCoeff());
      CHECK(path.zeta(t) == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  SUBCASE("invariant under orthogonal rotation of the loading columns") {
    fit.rank_r = 2;
    MatrixXd a(2, 2);
    a << 0.5, -0.1, 0.2, 0.8;
    const double c = std::cos(0.7), s = std::sin(0.7);
    MatrixXd rot(2, 2);
    rot << c, -s, s, c;
    for (int t = 0; t < 3; ++t) {
      fit.gamma_path.push_back(MatrixXd::Zero(2, 2));
      fit.alpha_path.push_back(t == 0 ? a : (t == 1 ? MatrixXd(a * rot)
                                                    : MatrixXd(rot * a)));
    }
    ComovementPath path = comovement_degree(fit);
    CHECK(path.zeta(1) == doctest::Approx(path.zeta(0)).epsilon(1e-10));
    CHECK(path.zeta(2) == doctest::Approx(path.zeta(0)).epsilon(1e-10));
  }

  SUBCASE("differences telescope") {
    fit.rank_r = 1;
    Rng rng(405);
    for (int t = 0; t < 3; ++t) {
      MatrixXd a(2, 1);
      a << rng.normal(), rng.normal();
      fit.gamma_path.push_back(MatrixXd::Zero(2, 2));
      fit.alpha_path.push_back(a);
    }
    ComovementPath path = comovement_degree(fit);
    CHECK(path.delta_zeta.sum() ==
          doctest::Approx(path.zeta(2) - path.zeta(0)).epsilon(1e-12));
  }
}

TEST_CASE("default stiffness keeps a constant-coefficient fit nearly flat") {
  // null calibration: when the true loadings never move, the default
  // smoothness must not invent economically meaningful variation.  Criterion:
  // the median (across seeds) of the per-path range stays within three times
  // the Monte Carlo sd of the time-invariant estimate of the same coefficient.
  const int T = 500, S = 200;
  std::vector<double> a1_range(S), a2_range(S);
  std::vector<double> a1_hat(S), a2_hat(S);
  for (int s = 0; s < S; ++s) {
    Panel p = fixed_alpha_panel(T, 9000 + s);
    TvVecmConfig cfg;
    cfg.beta = beta21();
    cfg.smoothness_lambda = 1.0;
    TvVecmFit fit = solve_smoothing(build_stacked_system(p, cfg));
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
    for (int t = 0; t < fit.effective_T; ++t) {
      lo1 = std::min(lo1, fit.alpha_path[t](0, 0));
      hi1 = std::max(hi1, fit.alpha_path[t](0, 0));
      lo2 = std::min(lo2, fit.alpha_path[t](1, 0));
      hi2 = std::max(hi2, fit.alpha_path[t](1, 0));
    }
    a1_range[s] = hi1 - lo1;
    a2_range[s] = hi2 - lo2;
    VecmFit flat = estimate_vecm(p, VecmSpec{}, beta21());
    a1_hat[s] = flat.coef(3, 0);
    a2_hat[s] = flat.coef(3, 1);
  }
  const auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const auto sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (v.size() - 1));
  };
  CHECK(median(a1_range) < 3.0 * sd(a1_hat));
  CHECK(median(a2_range) < 3.0 * sd(a2_hat));
}

TEST_CASE("loading paths track a mid-sample break") {
  // loadings step from near zero to strong at t = 300: the fitted zeta path
  // must be higher in the second half than in the first
  const int T = 600;
  int ordered_ok = 0;
  for (int s = 0; s < 10; ++s) {
    SimSpec spec;
    spec.m = 2;
    spec.r = 1;
    spec.T = T;
    spec.seed = 4200 + s;
    spec.beta = beta21();
    spec.alpha = AlphaSchedule::step(
        (MatrixXd(2, 1) << -0.05, 0.05).finished(),
        (MatrixXd(2, 1) << -0.4, 0.3).finished(), 300);
    spec.gamma = {0.1 * MatrixXd::Identity(2, 2)};
    spec.intercept = VectorXd::Zero(2);
    spec.noise_scale = VectorXd::Constant(2, 1.0);
    Panel p = simulate_vecm(spec);

    TvVecmConfig cfg;
    cfg.beta = beta21();
    cfg.smoothness_lambda = 0.1;  // loose enough to track a one-time break
    TvVecmFit fit = solve_smoothing(build_stacked_system(p, cfg));
    ComovementPath path = comovement_degree(fit);
    const int n = fit.effective_T;
    const double first = path.zeta.head(n / 2).mean();
    const double second = path.zeta.tail(n / 2).mean();
    if (second > first) ++ordered_ok;
  }
  CHECK(ordered_ok >= 9);
}

TEST_CASE("bootstrap bands are deterministic and bracket the point path") {
  Panel p = fixed_alpha_panel(150, 321);
  TvVecmConfig cfg;
  cfg.beta = beta21();
  ZetaBands b1 = bootstrap_bands(p, cfg, 100, 777, 1);
  ZetaBands b2 = bootstrap_bands(p, cfg, 100, 777, 3);
  CHECK((b1.lo - b2.lo).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.median - b2.median).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.hi - b2.hi).cwiseAbs().maxCoeff() == 0.0);

  // ordering lo <= median <= hi everywhere
  CHECK(((b1.median - b1.lo).array() >= 0.0).all());
  CHECK(((b1.hi - b1.median).array() >= 0.0).all());
  CHECK(b1.level_lo == 0.05);
  CHECK(b1.level_hi == 0.95);
  REQUIRE(static_cast<int>(b1.dates.size()) == b1.lo.size());

  // the median band tracks the point estimate's general level
  TvVecmFit fit = solve_smoothing(build_stacked_system(p, cfg));
  ComovementPath path = comovement_degree(fit);
  int covered = 0;
  for (int t = 0; t < path.zeta.size(); ++t)
    if (path.zeta(t) >= b1.lo(t) && path.zeta(t) <= b1.hi(t)) ++covered;
  CHECK(covered >= static_cast<int>(0.6 * path.zeta.size()));

  // a different seed changes the draws
  ZetaBands b3 = bootstrap_bands(p, cfg, 100, 778, 1);
  CHECK((b1.median - b3.median).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bootstrap bands narrow as the sample grows") {
  // note the bands do NOT narrow with the innovation scale: the
  // error-correction regressor beta'X inherits the noise scale, so the
  // loading estimate (a ratio) is scale invariant.  Sample size is what
  // tightens it.
  Panel small = fixed_alpha_panel(150, 888);
  Panel large = fixed_alpha_panel(450, 888);
  TvVecmConfig cfg;
  cfg.beta = beta21();
  ZetaBands wide = bootstrap_bands(small, cfg, 100, 55, 2);
  ZetaBands tight = bootstrap_bands(large, cfg, 100, 55, 2);
  CHECK((tight.hi - tight.lo).mean() < 0.75 * (wide.hi - wide.lo).mean());
}

TEST_CASE("configuration and input guards") {
  Panel p = fixed_alpha_panel(120, 5);
  TvVecmConfig cfg;
  cfg.beta = beta21();

  SUBCASE("beta shape and rank") {
    TvVecmConfig bad = cfg;
    bad.beta = MatrixXd::Ones(3, 1);
    CHECK_THROWS_AS(build_stacked_system(p, bad), SizeError);
    bad.beta = MatrixXd::Ones(2, 2);  // r = m
    CHECK_THROWS_AS(build_stacked_system(p, bad), SizeError);
    bad.beta = MatrixXd::Zero(2, 1);  // rank deficient
    CHECK_THROWS_AS(build_stacked_system(p, bad), SizeError);
  }
  SUBCASE("lag depth") {
    TvVecmConfig bad = cfg;
    bad.lag_k = 0;
    CHECK_THROWS_AS(build_stacked_system(p, bad), SizeError);
    bad.lag_k = 30;  // >= T/4
    CHECK_THROWS_AS(build_stacked_system(p, bad), SizeError);
  }
  SUBCASE("stiffness must be positive") {
    TvVecmConfig bad = cfg;
    bad.smoothness_lambda = 0.0;
    CHECK_THROWS_AS(build_stacked_system(p, bad), ConfigError);
    bad.smoothness_lambda = -1.0;
    CHECK_THROWS_AS(build_stacked_system(p, bad), ConfigError);
  }
  SUBCASE("zero raw penalty makes the stacked problem rank deficient") {
    StackedSystem sys = build_stacked_system(p, cfg);
    sys.lambda = 0.0;
    CHECK_THROWS_AS(solve_smoothing(sys), NumericalError);
    CHECK_THROWS_AS(kalman_smoother_oracle(sys), NumericalError);
  }
  SUBCASE("negative or non-finite raw penalty is rejected") {
    StackedSystem sys = build_stacked_system(p, cfg);
    sys.lambda = -2.0;
    CHECK_THROWS_AS(solve_smoothing(sys), ConfigError);
    sys.lambda = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_smoothing(sys), ConfigError);
  }
  SUBCASE("bootstrap replication and level guards") {
    CHECK_THROWS_AS(bootstrap_bands(p, cfg, 99, 1, 1), ConfigError);
    CHECK_THROWS_AS(bootstrap_bands(p, cfg, 100, 1, 1, 0.9, 0.1),
                    ConfigError);
    CHECK_THROWS_AS(bootstrap_bands(p, cfg, 100, 1, 1, 0.0, 0.9),
                    ConfigError);
  }
  SUBCASE("comovement needs a fitted path") {
    TvVecmFit empty;
    CHECK_THROWS_AS(comovement_degree(empty), SizeError);
  }
}

TEST_CASE("centered moving average smoother") {
  VectorXd x(5);
  x << 1.0, 2.0, 6.0, 2.0, 1.0;

  // window 1 is the identity
  CHECK((centered_moving_average(x, 1) - x).cwiseAbs().maxCoeff() == 0.0);

  // window 3 by hand; the ends use the truncated symmetric window (width 1)
  VectorXd s = centered_moving_average(x, 3);
  REQUIRE(s.size() == 5);
  CHECK(s(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s(1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s(2) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  CHECK(s(3) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s(4) == doctest::Approx(1.0).epsilon(1e-15));

  // constants are fixed points for any window
  VectorXd c = VectorXd::Constant(9, 4.2);
  CHECK((centered_moving_average(c, 5) - c).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(centered_moving_average(x, 2), ConfigError);
  CHECK_THROWS_AS(centered_moving_average(x, 0), ConfigError);
  CHECK_THROWS_AS(centered_moving_average(x, 7), SizeError);
}
