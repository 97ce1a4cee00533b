#pragma once
#include <Eigen/Dense>
#include <optional>

#include "tvecm/errors.hpp"

namespace tvecm {

enum class Deterministic { constant, trend };

struct AdfGlsConfig {
  Deterministic spec = Deterministic::trend;
  int max_lag = 12;
  // quasi-differencing noncentrality; 0 selects the usual default
  // (-13.5 with trend, -7.0 constant-only)
  double cbar = 0.0;
  std::optional<double> cv_1pct;  // override the embedded critical value
};

// Local-to-unity GLS detrending: quasi-difference y and the deterministics
// with rho = 1 + cbar/T (first row kept in levels), regress, and return
// y_t - psi'z_t.  cbar must be negative.
Eigen::VectorXd gls_detrend(const Eigen::VectorXd& y, Deterministic spec,
                            double cbar);

// Modified BIC order choice for the augmented regression
//   d y_t = b0 y_{t-1} + sum_j b_j d y_{t-j} + e_t
// evaluated on the common effective sample t = max_lag+2 .. T:
//   MBIC(k) = ln(ssr_k/N) + ln(N) (tau_k + k) / N,
//   tau_k   = b0_k^2 sum y_{t-1}^2 / (ssr_k/N).
// Ties resolve to the smaller k.
int select_lag_mbic(const Eigen::VectorXd& y_detrended, int max_lag);

struct AdfGlsResult {
  double statistic = 0.0;  // t-ratio on the lagged level
  int lag = 0;             // MBIC-selected augmentation order
  double phi_hat = 0.0;    // 1 + coefficient on the lagged level
  double cv_1pct = 0.0;
  bool reject_1pct = false;
};

// GLS-detrend, pick the lag by MBIC, then run the augmented regression with
// no deterministics on the maximal sample for the chosen lag.
AdfGlsResult adf_gls_test(const Eigen::VectorXd& y,
                          const AdfGlsConfig& cfg = {});

}  // namespace tvecm
