#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tvecm/panel.hpp"

namespace tvecm {

// Time-varying error-correction estimator: per-period coefficient blocks on
// the lagged differences and the error-correction terms follow random walks,
// fitted as penalized least squares (equivalently fixed-interval smoothing).
struct TvVecmConfig {
  int lag_k = 1;
  Eigen::MatrixXd beta;            // m x r cointegrating matrix (fixed)
  double smoothness_lambda = 1.0;  // dimensionless stiffness; see below
  bool time_varying_intercept = false;
};

// Stacked description of the penalized regression.  Every equation shares the
// time-varying regressor rows W; the penalty couples consecutive coefficient
// blocks with weight `lambda` (the raw multiplier actually applied:
// build_stacked_system sets lambda = smoothness_lambda * n, so the config
// value is a sample-size-free stiffness dial and the implied coefficient
// innovation standard deviation is sigma_obs / (smoothness_lambda * n)).
struct StackedSystem {
  Eigen::MatrixXd W;  // n x q per-period regressors
  Eigen::MatrixXd Y;  // n x m responses (delta X)
  double lambda = 1.0;
  bool constant_intercept = true;  // bordered single intercept per equation
  bool tv_intercept = false;       // intercept is the last column of W
  int lag_k = 0;
  int rank_r = 0;
  std::vector<std::string> dates;     // n
  std::vector<std::string> colnames;  // q
  std::vector<std::string> eqnames;   // m

  int n() const { return static_cast<int>(W.rows()); }
  int q() const { return static_cast<int>(W.cols()); }
  int m() const { return static_cast<int>(Y.cols()); }
  int obs_rows() const { return n(); }
  int penalty_rows() const { return (n() - 1) * q(); }

  // penalty operator rows lambda * (theta_{t+1} - theta_t) for an n x q
  // coefficient path; a constant path maps to exact zeros
  Eigen::MatrixXd apply_penalty(const Eigen::MatrixXd& path) const;
};

struct TvVecmFit {
  std::vector<Eigen::MatrixXd> gamma_path;  // n entries, m x (m * lag_k)
  std::vector<Eigen::MatrixXd> alpha_path;  // n entries, m x r
  Eigen::VectorXd intercept;                // m (constant-intercept mode)
  Eigen::MatrixXd intercept_path;           // n x m (time-varying mode)
  Eigen::MatrixXd resid;                    // n x m
  Eigen::MatrixXd fitted;                   // n x m
  std::vector<std::string> dates;           // n
  std::vector<std::string> eqnames;         // m
  int effective_T = 0;
  int lag_k = 0;
  int rank_r = 0;
  double lambda = 0.0;  // raw penalty multiplier used
};

struct ComovementPath {
  Eigen::VectorXd zeta;        // n, largest singular value of alpha_t
  Eigen::VectorXd delta_zeta;  // n - 1 first differences
  std::vector<std::string> dates;
};

struct ZetaBands {
  Eigen::VectorXd lo, median, hi;  // n
  double level_lo = 0.05, level_hi = 0.95;
  std::vector<std::string> dates;
};

StackedSystem build_stacked_system(const Panel& p, const TvVecmConfig& cfg);

// Exact minimizer of ||Y - W theta||^2 + ||penalty||^2 via sparse QR on the
// stacked rows (never the normal equations: squaring the penalty weight
// would erase the data blocks from the cross-products at large lambda).
TvVecmFit solve_smoothing(const StackedSystem& sys);

// Independent verification path: information-form two-filter fixed-interval
// smoother (identity transition, innovation variance 1/lambda^2, exact
// diffuse start, constant intercept as a zero-innovation state).
TvVecmFit kalman_smoother_oracle(const StackedSystem& sys);

ComovementPath comovement_degree(const TvVecmFit& fit);

// Centered moving average with an odd window (1 = identity), truncating the
// window symmetrically at the ends so the output length equals the input
// length.  Display smoother for the zeta acceleration series; off by default.
Eigen::VectorXd centered_moving_average(const Eigen::VectorXd& x, int window);

// Centered-residual bootstrap: resample fit residual rows, rebuild the panel
// from the fitted time-varying model, re-estimate, and return pointwise
// quantile bands for zeta.  Deterministic for a fixed seed and any thread
// count.
ZetaBands bootstrap_bands(const Panel& p, const TvVecmConfig& cfg,
                          int replications, std::uint64_t seed,
                          int threads = 1, double level_lo = 0.05,
                          double level_hi = 0.95);

}  // namespace tvecm
