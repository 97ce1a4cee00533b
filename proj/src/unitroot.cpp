#include "tvecm/unitroot.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tvecm/linreg.hpp"

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double default_cbar(Deterministic spec) {
  return spec == Deterministic::trend ? -13.5 : -7.0;
}

// deterministic regressors in levels: [1] or [1, t], t = 1..T
MatrixXd deterministics(int T, Deterministic spec) {
  const int p = spec == Deterministic::trend ? 2 : 1;
  MatrixXd Z(T, p);
  Z.col(0).setOnes();
  if (p == 2)
    for (int t = 0; t < T; ++t) Z(t, 1) = t + 1;
  return Z;
}

}  // namespace

VectorXd gls_detrend(const VectorXd& y, Deterministic spec, double cbar) {
  const int T = static_cast<int>(y.size());
  if (T < 5) throw SizeError("gls detrend: need at least 5 observations");
  if (!(cbar < 0.0))
    throw DomainError("gls detrend: cbar must be negative, got " +
                      std::to_string(cbar));
  const double rho = 1.0 + cbar / T;
  const MatrixXd Z = deterministics(T, spec);

  VectorXd yq(T);
  MatrixXd Zq(T, Z.cols());
  yq(0) = y(0);
  Zq.row(0) = Z.row(0);
  for (int t = 1; t < T; ++t) {
    yq(t) = y(t) - rho * y(t - 1);
    Zq.row(t) = Z.row(t) - rho * Z.row(t - 1);
  }

  const Ols fit = ols_fit(Zq, yq);
  return y - Z * fit.coef;
}

int select_lag_mbic(const VectorXd& yd, int max_lag) {
  const int T = static_cast<int>(yd.size());
  if (max_lag < 0) throw SizeError("mbic: negative max_lag");
  const int N = T - max_lag - 1;  // common sample: t = max_lag+2 .. T
  if (N < max_lag + 5)
    throw SizeError("mbic: sample too short for max_lag = " +
                    std::to_string(max_lag) + " (effective N = " +
                    std::to_string(N) + ")");

  VectorXd dy(T - 1);  // dy(i) = yd(i+1) - yd(i)
  for (int i = 0; i < T - 1; ++i) dy(i) = yd(i + 1) - yd(i);

  // rows are t = max_lag+1 .. T-1 (0-based level index)
  VectorXd resp(N), ylag(N);
  for (int i = 0; i < N; ++i) {
    const int t = max_lag + 1 + i;
    resp(i) = dy(t - 1);   // d y_t
    ylag(i) = yd(t - 1);   // y_{t-1}
  }
  const double sum_ylag2 = ylag.squaredNorm();
  const double logN = std::log(static_cast<double>(N));

  int best_k = 0;
  double best_crit = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_lag; ++k) {
    MatrixXd X(N, 1 + k);
    X.col(0) = ylag;
    for (int j = 1; j <= k; ++j)
      for (int i = 0; i < N; ++i) X(i, j) = dy(max_lag + i - j);  // d y_{t-j}
    const Ols fit = ols_fit(X, resp);
    const double sigma2 = fit.ssr / N;
    const double tau = fit.coef(0) * fit.coef(0) * sum_ylag2 / sigma2;
    const double crit = std::log(sigma2) + logN * (tau + k) / N;
    if (crit < best_crit - 1e-12) {
      best_crit = crit;
      best_k = k;
    }
  }
  return best_k;
}

AdfGlsResult adf_gls_test(const VectorXd& y, const AdfGlsConfig& cfg) {
  const int T = static_cast<int>(y.size());
  if (cfg.max_lag < 0) throw SizeError("adf-gls: negative max_lag");
  if (T - cfg.max_lag < 20)
    throw SizeError("adf-gls: need T - max_lag >= 20, got T = " +
                    std::to_string(T));
  const double cbar = cfg.cbar != 0.0 ? cfg.cbar : default_cbar(cfg.spec);

  const VectorXd yd = gls_detrend(y, cfg.spec, cbar);
  const int k = select_lag_mbic(yd, cfg.max_lag);

  // final regression on the maximal sample for the chosen lag:
  // rows t = k+2 .. T
  const int N = T - k - 1;
  VectorXd dy(T - 1);
  for (int i = 0; i < T - 1; ++i) dy(i) = yd(i + 1) - yd(i);
  VectorXd resp(N);
  MatrixXd X(N, 1 + k);
  for (int i = 0; i < N; ++i) {
    const int t = k + 1 + i;
    resp(i) = dy(t - 1);
    X(i, 0) = yd(t - 1);
    for (int j = 1; j <= k; ++j) X(i, j) = dy(t - 1 - j);
  }
  const Ols fit = ols_fit(X, resp);
  const double s2 = fit.ssr / (N - (1 + k));  // classical
  const double se0 = std::sqrt(s2 * fit.xtx_inv(0, 0));
  if (!(se0 > 0.0))
    throw NumericalError("adf-gls: degenerate regression (zero variance)");

  AdfGlsResult out;
  out.lag = k;
  out.statistic = fit.coef(0) / se0;
  out.phi_hat = 1.0 + fit.coef(0);
  out.cv_1pct = cfg.cv_1pct.value_or(
      cfg.spec == Deterministic::trend ? -3.42 : -2.58);
  out.reject_1pct = out.statistic < out.cv_1pct;
  return out;
}

}  // namespace tvecm
