#include "tvecm/tv_vecm.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseQR>
#include <algorithm>
#include <cmath>

#include "tvecm/errors.hpp"
#include "tvecm/parallel.hpp"
#include "tvecm/rng.hpp"

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::MatrixXd StackedSystem::apply_penalty(const MatrixXd& path) const {
  if (path.rows() != n() || path.cols() != q())
    throw SizeError("penalty operator: path must be n x q");
  MatrixXd out(n() - 1, q());
  for (int t = 0; t + 1 < n(); ++t)
    out.row(t) = lambda * (path.row(t + 1) - path.row(t));
  return out;
}

StackedSystem build_stacked_system(const Panel& p, const TvVecmConfig& cfg) {
  p.validate();
  const int T = p.T(), m = p.m(), k = cfg.lag_k;
  if (k < 1) throw SizeError("time-varying fit: lag_k must be >= 1");
  if (k >= T / 4) throw SizeError("time-varying fit: lag_k must be below T/4");
  if (cfg.beta.rows() != m)
    throw SizeError("time-varying fit: beta must have one row per series");
  const int r = static_cast<int>(cfg.beta.cols());
  if (r >= m) throw SizeError("time-varying fit: beta rank must be below m");
  if (r > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(cfg.beta);
    qr.setThreshold(1e-10);
    if (qr.rank() < r)
      throw SizeError("time-varying fit: beta is rank deficient");
  }
  if (!(cfg.smoothness_lambda > 0.0))
    throw ConfigError("time-varying fit: smoothness_lambda must be positive");

  const int n = T - k - 1;
  const int q = m * k + r + (cfg.time_varying_intercept ? 1 : 0);
  if (n < q + 2)
    throw SizeError("time-varying fit: effective sample too short (" +
                    std::to_string(n) + " rows for " + std::to_string(q) +
                    " per-period coefficients)");

  StackedSystem sys;
  sys.lambda = cfg.smoothness_lambda * n;
  sys.constant_intercept = !cfg.time_varying_intercept;
  sys.tv_intercept = cfg.time_varying_intercept;
  sys.lag_k = k;
  sys.rank_r = r;
  sys.eqnames = p.names;
  sys.dates.assign(p.dates.begin() + (k + 1), p.dates.end());
  sys.W.resize(n, q);
  sys.Y.resize(n, m);
  for (int i = 0; i < n; ++i) {
    const int t = k + 1 + i;
    sys.Y.row(i) = p.values.row(t) - p.values.row(t - 1);
    for (int j = 1; j <= k; ++j)
      sys.W.block(i, (j - 1) * m, 1, m) =
          p.values.row(t - j) - p.values.row(t - j - 1);
    if (r > 0)
      sys.W.block(i, m * k, 1, r) = p.values.row(t - k) * cfg.beta;
    if (cfg.time_varying_intercept) sys.W(i, q - 1) = 1.0;
  }
  for (int j = 1; j <= k; ++j)
    for (int s = 0; s < m; ++s)
      sys.colnames.push_back("d" + p.names[s] + ".l" + std::to_string(j));
  for (int j = 0; j < r; ++j)
    sys.colnames.push_back("ecm" + std::to_string(j + 1));
  if (cfg.time_varying_intercept) sys.colnames.push_back("const");
  return sys;
}

namespace {

void check_system(const StackedSystem& sys) {
  const int n = sys.n(), q = sys.q(), m = sys.m();
  if (n < 1 || q < 1 || m < 1)
    throw SizeError("time-varying fit: empty stacked system");
  if (sys.Y.rows() != n)
    throw SizeError("time-varying fit: W and Y row counts differ");
  if (!(sys.lambda >= 0.0) || !std::isfinite(sys.lambda))
    throw ConfigError("time-varying fit: penalty weight must be finite and "
                      ">= 0");
}

// assemble a fit from the stacked solution (n*q block coefficients plus the
// bordered intercept row when present)
TvVecmFit unpack(const StackedSystem& sys, const MatrixXd& sol) {
  const int n = sys.n(), q = sys.q(), m = sys.m();
  const int mk = sys.lag_k * m;
  const int r = sys.rank_r;
  TvVecmFit fit;
  fit.effective_T = n;
  fit.lag_k = sys.lag_k;
  fit.rank_r = r;
  fit.lambda = sys.lambda;
  fit.dates = sys.dates;
  fit.eqnames = sys.eqnames;
  fit.gamma_path.resize(n);
  fit.alpha_path.resize(n);
  if (sys.tv_intercept) fit.intercept_path.resize(n, m);
  fit.fitted.resize(n, m);
  for (int t = 0; t < n; ++t) {
    fit.gamma_path[t].resize(m, mk);
    fit.alpha_path[t].resize(m, r);
    for (int e = 0; e < m; ++e) {
      const VectorXd theta = sol.col(e).segment(t * q, q);
      fit.gamma_path[t].row(e) = theta.head(mk).transpose();
      fit.alpha_path[t].row(e) = theta.segment(mk, r).transpose();
      if (sys.tv_intercept) fit.intercept_path(t, e) = theta(q - 1);
      double y_hat = sys.W.row(t).dot(theta);
      if (sys.constant_intercept) y_hat += sol(n * q, e);
      fit.fitted(t, e) = y_hat;
    }
  }
  if (sys.constant_intercept)
    fit.intercept = sol.row(n * q).transpose();
  else if (!sys.tv_intercept)
    fit.intercept = VectorXd::Zero(m);
  fit.resid = sys.Y - fit.fitted;
  return fit;
}

}  // namespace

TvVecmFit solve_smoothing(const StackedSystem& sys) {
  check_system(sys);
  const int n = sys.n(), q = sys.q(), m = sys.m();
  const int N = n * q + (sys.constant_intercept ? 1 : 0);
  const int M = n + (n - 1) * q;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * (q + 1) + 2 * (n - 1) * q);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < q; ++j)
      if (sys.W(t, j) != 0.0) trip.emplace_back(t, t * q + j, sys.W(t, j));
    if (sys.constant_intercept) trip.emplace_back(t, n * q, 1.0);
  }
  for (int t = 0; t + 1 < n; ++t)
    for (int j = 0; j < q; ++j) {
      const int row = n + t * q + j;
      trip.emplace_back(row, t * q + j, -sys.lambda);
      trip.emplace_back(row, (t + 1) * q + j, sys.lambda);
    }
  Eigen::SparseMatrix<double> A(M, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(A);
  if (qr.info() != Eigen::Success)
    throw NumericalError("time-varying fit: sparse factorization failed");
  if (qr.rank() < N)
    throw NumericalError(
        "time-varying fit: stacked system is rank deficient (penalty weight "
        "too small for the number of per-period coefficients)");

  MatrixXd B = MatrixXd::Zero(M, m);
  B.topRows(n) = sys.Y;
  const MatrixXd sol = qr.solve(B);
  return unpack(sys, sol);
}

TvVecmFit kalman_smoother_oracle(const StackedSystem& sys) {
  check_system(sys);
  if (!(sys.lambda > 0.0))
    throw NumericalError("time-varying fit: the smoothing oracle needs a "
                         "positive penalty weight");
  const int n = sys.n(), q = sys.q(), m = sys.m();
  const int s = q + (sys.constant_intercept ? 1 : 0);
  const double lam2 = sys.lambda * sys.lambda;

  // information prediction across one random-walk transition: only the first
  // q state entries receive innovations (variance 1/lambda^2)
  const auto predict = [&](MatrixXd& info, MatrixXd& eta) {
    const MatrixXd K = info.leftCols(q);            // s x q
    MatrixXd C = info.topLeftCorner(q, q);          // q x q
    C.diagonal().array() += lam2;
    Eigen::LDLT<MatrixXd> ldlt(C);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError("time-varying fit: smoother prediction failed");
    info -= K * ldlt.solve(K.transpose());
    info = 0.5 * (info + info.transpose());
    eta -= K * ldlt.solve(eta.topRows(q).eval());
  };

  const auto obs_row = [&](int t) {
    VectorXd h(s);
    h.head(q) = sys.W.row(t).transpose();
    if (sys.constant_intercept) h(s - 1) = 1.0;
    return h;
  };
  const auto add_obs = [&](MatrixXd& info, MatrixXd& eta, int t) {
    const VectorXd h = obs_row(t);
    info += h * h.transpose();
    eta += h * sys.Y.row(t);
  };

  std::vector<MatrixXd> fwd_info(n), fwd_eta(n);
  MatrixXd info = MatrixXd::Zero(s, s);  // exact diffuse start
  MatrixXd eta = MatrixXd::Zero(s, m);
  for (int t = 0; t < n; ++t) {
    if (t > 0) predict(info, eta);
    add_obs(info, eta, t);
    fwd_info[t] = info;
    fwd_eta[t] = eta;
  }

  std::vector<MatrixXd> bwd_info(n), bwd_eta(n);
  info.setZero();
  eta.setZero();
  bwd_info[n - 1] = info;
  bwd_eta[n - 1] = eta;
  for (int t = n - 2; t >= 0; --t) {
    add_obs(info, eta, t + 1);
    predict(info, eta);
    bwd_info[t] = info;
    bwd_eta[t] = eta;
  }

  MatrixXd sol(n * q + (sys.constant_intercept ? 1 : 0), m);
  for (int t = 0; t < n; ++t) {
    const MatrixXd joint = fwd_info[t] + bwd_info[t];
    Eigen::LDLT<MatrixXd> ldlt(joint);
    if (ldlt.info() != Eigen::Success ||
        (ldlt.vectorD().array() <= 0.0).any())
      throw NumericalError("time-varying fit: system not identified (too few "
                           "observations for the coefficient count)");
    const MatrixXd x = ldlt.solve(fwd_eta[t] + bwd_eta[t]);  // s x m
    sol.block(t * q, 0, q, m) = x.topRows(q);
    if (sys.constant_intercept && t == 0) sol.row(n * q) = x.row(s - 1);
  }
  return unpack(sys, sol);
}

ComovementPath comovement_degree(const TvVecmFit& fit) {
  const int n = fit.effective_T;
  if (n < 1 || fit.alpha_path.empty())
    throw SizeError("comovement: fit has no loading path");
  ComovementPath out;
  out.dates = fit.dates;
  out.zeta.resize(n);
  for (int t = 0; t < n; ++t) {
    const MatrixXd& a = fit.alpha_path[t];
    if (a.cols() == 0) {
      out.zeta(t) = 0.0;
    } else if (a.cols() == 1) {
      out.zeta(t) = a.col(0).norm();
    } else {
      Eigen::JacobiSVD<MatrixXd> svd(a);
      out.zeta(t) = svd.singularValues()(0);
    }
  }
  out.delta_zeta.resize(n - 1);
  for (int t = 0; t + 1 < n; ++t)
    out.delta_zeta(t) = out.zeta(t + 1) - out.zeta(t);
  return out;
}

Eigen::VectorXd centered_moving_average(const Eigen::VectorXd& x, int window) {
  if (window < 1 || window % 2 == 0)
    throw ConfigError("moving average: window must be odd and >= 1");
  const int n = static_cast<int>(x.size());
  if (window > n)
    throw SizeError("moving average: window exceeds the series length");
  if (window == 1) return x;
  VectorXd out(n);
  const int half = window / 2;
  for (int t = 0; t < n; ++t) {
    const int w = std::min({half, t, n - 1 - t});
    out(t) = x.segment(t - w, 2 * w + 1).mean();
  }
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const int R = static_cast<int>(sorted.size());
  const double h = p * (R - 1);
  const int lo = static_cast<int>(std::floor(h));
  const int hi = std::min(lo + 1, R - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ZetaBands bootstrap_bands(const Panel& p, const TvVecmConfig& cfg,
                          int replications, std::uint64_t seed, int threads,
                          double level_lo, double level_hi) {
  if (replications < 100)
    throw ConfigError("bootstrap: need at least 100 replications");
  if (!(level_lo > 0.0 && level_lo < level_hi && level_hi < 1.0))
    throw ConfigError("bootstrap: quantile levels must satisfy 0 < lo < hi < 1");

  const StackedSystem base_sys = build_stacked_system(p, cfg);
  const TvVecmFit base = solve_smoothing(base_sys);
  const int n = base.effective_T, m = p.m(), k = cfg.lag_k;
  const int r = static_cast<int>(cfg.beta.cols());

  // centered residuals for resampling
  MatrixXd centered = base.resid;
  centered.rowwise() -= base.resid.colwise().mean();

  MatrixXd draws(replications, n);
  parallel_for(replications, threads, [&](int rep) {
    Rng rng(derive_seed(seed, rep));
    Panel sim = p;
    for (int i = 0; i < n; ++i) {
      const int t = k + 1 + i;
      const int pick = static_cast<int>(rng.below(n));
      Eigen::RowVectorXd dx = Eigen::RowVectorXd::Zero(m);
      for (int j = 1; j <= k; ++j)
        dx += (sim.values.row(t - j) - sim.values.row(t - j - 1)) *
              base.gamma_path[i].middleCols((j - 1) * m, m).transpose();
      if (r > 0)
        dx += (sim.values.row(t - k) * cfg.beta) *
              base.alpha_path[i].transpose();
      if (cfg.time_varying_intercept)
        dx += base.intercept_path.row(i);
      else
        dx += base.intercept.transpose();
      dx += centered.row(pick);
      sim.values.row(t) = sim.values.row(t - 1) + dx;
    }
    const TvVecmFit refit = solve_smoothing(build_stacked_system(sim, cfg));
    const ComovementPath path = comovement_degree(refit);
    draws.row(rep) = path.zeta.transpose();
  });

  ZetaBands bands;
  bands.level_lo = level_lo;
  bands.level_hi = level_hi;
  bands.dates = base.dates;
  bands.lo.resize(n);
  bands.median.resize(n);
  bands.hi.resize(n);
  std::vector<double> col(replications);
  for (int t = 0; t < n; ++t) {
    for (int rep = 0; rep < replications; ++rep) col[rep] = draws(rep, t);
    std::sort(col.begin(), col.end());
    bands.lo(t) = quantile_sorted(col, level_lo);
    bands.median(t) = quantile_sorted(col, 0.5);
    bands.hi(t) = quantile_sorted(col, level_hi);
  }
  return bands;
}

}  // namespace tvecm
