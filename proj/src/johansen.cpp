#include "tvecm/johansen.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double maxeig_stat(double lambda, int effective_T) {
  if (effective_T < 1) throw SizeError("maxeig: effective T must be positive");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw DomainError("maxeig: eigenvalue must lie in [0,1), got " +
                      std::to_string(lambda));
  return -static_cast<double>(effective_T) * std::log1p(-lambda);
}

double trace_stat(const VectorXd& lambdas, int null_rank, int effective_T) {
  const int m = static_cast<int>(lambdas.size());
  if (effective_T < 1) throw SizeError("trace: effective T must be positive");
  if (null_rank < 0 || null_rank >= m)
    throw SizeError("trace: null rank " + std::to_string(null_rank) +
                    " outside [0, " + std::to_string(m - 1) + "]");
  for (int i = 0; i < m; ++i) {
    if (!(lambdas(i) >= 0.0 && lambdas(i) < 1.0))
      throw DomainError("trace: eigenvalue outside [0,1)");
    if (i > 0 && lambdas(i) > lambdas(i - 1) + 1e-12)
      throw DomainError("trace: eigenvalues must be sorted descending");
  }
  double acc = 0.0;
  for (int i = null_rank; i < m; ++i) acc += std::log1p(-lambdas(i));
  return -static_cast<double>(effective_T) * acc;
}

namespace {

// asymptotic quantiles (90/95/99%) by excess dimension d = m - r.
// intercept case: table whose 10% column matches the usual restricted-
// constant tabulation; no-deterministics case tabulated to d = 6.
constexpr double kMaxeigConst[11][3] = {
    {7.52, 9.24, 12.97},   {13.75, 15.67, 20.20}, {19.77, 22.00, 26.81},
    {25.56, 28.14, 33.24}, {31.66, 34.40, 39.79}, {37.45, 40.30, 46.82},
    {43.25, 46.45, 51.91}, {48.91, 52.00, 57.95}, {54.35, 57.42, 63.71},
    {60.25, 63.57, 69.94}, {66.02, 69.74, 76.63}};
constexpr double kTraceConst[11][3] = {
    {7.52, 9.24, 12.97},    {17.85, 19.96, 24.60},  {32.00, 34.91, 41.07},
    {49.65, 53.12, 60.16},  {71.86, 76.07, 84.45},  {97.18, 102.14, 111.01},
    {126.58, 131.70, 143.09}, {159.48, 165.58, 177.20},
    {196.37, 202.92, 215.74}, {236.54, 244.15, 257.68},
    {282.45, 291.40, 307.64}};
constexpr double kMaxeigNone[6][3] = {{2.86, 3.84, 6.51},   {9.52, 11.44, 15.69},
                                      {15.59, 17.89, 22.99}, {21.58, 23.80, 28.82},
                                      {27.62, 30.04, 35.17}, {33.62, 36.36, 41.00}};
constexpr double kTraceNone[6][3] = {{2.86, 3.84, 6.51},   {10.47, 12.53, 16.31},
                                     {21.63, 24.31, 29.75}, {36.58, 39.89, 45.58},
                                     {55.44, 59.46, 66.52}, {78.36, 82.49, 90.45}};

int level_index(double level) {
  if (level == 0.10) return 0;
  if (level == 0.05) return 1;
  if (level == 0.01) return 2;
  throw ConfigError("critical-value level must be 0.10, 0.05 or 0.01");
}

}  // namespace

double johansen_cv(bool trace, int m_minus_r, bool intercept, double level) {
  const int li = level_index(level);
  if (m_minus_r < 1) throw SizeError("critical value: m - r must be >= 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (intercept) {
    if (m_minus_r > 11) return nan;
    return trace ? kTraceConst[m_minus_r - 1][li]
                 : kMaxeigConst[m_minus_r - 1][li];
  }
  if (m_minus_r > 6) return nan;
  return trace ? kTraceNone[m_minus_r - 1][li] : kMaxeigNone[m_minus_r - 1][li];
}

namespace {

// residual maker: rows of Y minus their projection on Z (Z may have 0 cols)
MatrixXd residualize(const MatrixXd& Y, const MatrixXd& Z) {
  if (Z.cols() == 0) return Y;
  const MatrixXd ztz = Z.transpose() * Z;
  Eigen::LDLT<MatrixXd> ldlt(ztz);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("reduced-rank regression: collinear conditioning "
                         "regressors (lagged differences / intercept)");
  return Y - Z * ldlt.solve(Z.transpose() * Y);
}

}  // namespace

JohansenResult johansen_rrr(const Panel& p, const VecmSpec& spec) {
  p.validate();
  const int T = p.T(), m = p.m(), k = spec.lag_k;
  if (k < 1) throw SizeError("reduced-rank regression: lag_k must be >= 1");
  if (k >= T / 4)
    throw SizeError("reduced-rank regression: lag_k must be below T/4");
  const int n = T - k - 1;  // regression rows: t = k+2 .. T
  const int pz = m * k + (spec.intercept ? 1 : 0);
  if (n <= pz + m || n < 10 * m)
    throw SizeError("reduced-rank regression: effective sample too short (" +
                    std::to_string(n) + " rows for " + std::to_string(m) +
                    " series)");
  const int r_for_loadings = spec.rank_r.value_or(1);
  if (r_for_loadings < 0 || r_for_loadings >= m)
    throw SizeError("reduced-rank regression: rank_r must lie in [0, m)");

  // Z0 = dX_t, Z1 = X_{t-k}, Z2 = [dX_{t-1} .. dX_{t-k}, 1]
  MatrixXd Z0(n, m), Z1(n, m), Z2(n, pz);
  for (int i = 0; i < n; ++i) {
    const int t = k + 1 + i;  // 0-based row of the response
    Z0.row(i) = p.values.row(t) - p.values.row(t - 1);
    Z1.row(i) = p.values.row(t - k);
    for (int j = 1; j <= k; ++j)
      Z2.block(i, (j - 1) * m, 1, m) =
          p.values.row(t - j) - p.values.row(t - j - 1);
    if (spec.intercept) Z2(i, pz - 1) = 1.0;
  }

  const MatrixXd R0 = residualize(Z0, Z2);
  const MatrixXd R1 = residualize(Z1, Z2);
  const MatrixXd S00 = R0.transpose() * R0 / n;
  const MatrixXd S11 = R1.transpose() * R1 / n;
  const MatrixXd S01 = R0.transpose() * R1 / n;

  Eigen::LLT<MatrixXd> llt00(S00), llt11(S11);
  if (llt00.info() != Eigen::Success)
    throw NumericalError("reduced-rank regression: singular S00");
  if (llt11.info() != Eigen::Success)
    throw NumericalError("reduced-rank regression: singular S11");

  // W = L11^{-1} S10 S00^{-1} S01 L11^{-T}; eigenvalues are the squared
  // canonical correlations
  const MatrixXd S10 = S01.transpose();
  const MatrixXd inner = S10 * llt00.solve(S01);
  const MatrixXd half = llt11.matrixL().solve(inner);
  const MatrixXd W = llt11.matrixL().solve(half.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (W + W.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalError("reduced-rank regression: eigensolver failed");

  JohansenResult res;
  res.effective_T = n;
  res.rank_r = r_for_loadings;
  res.s01 = S01;
  res.s11 = S11;
  res.eigenvalues.resize(m);
  res.eigenvectors.resize(m, m);
  const MatrixXd U = llt11.matrixL().transpose().solve(es.eigenvectors());
  for (int i = 0; i < m; ++i) {
    double lam = es.eigenvalues()(m - 1 - i);  // descending
    if (lam < 0.0 && lam > -1e-12) lam = 0.0;  // roundoff clamp
    res.eigenvalues(i) = lam;
    res.eigenvectors.col(i) = U.col(m - 1 - i);
  }

  res.trace_stats.resize(m);
  res.maxeig_stats.resize(m);
  res.trace_cv.resize(m, 3);
  res.maxeig_cv.resize(m, 3);
  const double levels[3] = {0.10, 0.05, 0.01};
  for (int r0 = 0; r0 < m; ++r0) {
    res.trace_stats(r0) = trace_stat(res.eigenvalues, r0, n);
    res.maxeig_stats(r0) = maxeig_stat(res.eigenvalues(r0), n);
    for (int li = 0; li < 3; ++li) {
      res.trace_cv(r0, li) = johansen_cv(true, m - r0, spec.intercept, levels[li]);
      res.maxeig_cv(r0, li) =
          johansen_cv(false, m - r0, spec.intercept, levels[li]);
    }
  }

  res.beta_hat = beta_at(res, r_for_loadings);
  res.alpha_hat = alpha_at(res, r_for_loadings);
  return res;
}

Eigen::MatrixXd beta_at(const JohansenResult& res, int r) {
  const int m = static_cast<int>(res.eigenvalues.size());
  if (r < 0 || r >= m) throw SizeError("beta_at: rank outside [0, m)");
  if (r == 0) return MatrixXd(m, 0);
  const MatrixXd B = res.eigenvectors.leftCols(r);
  const MatrixXd lead = B.topRows(r);
  Eigen::FullPivLU<MatrixXd> lu(lead);
  if (!lu.isInvertible())
    throw NumericalError(
        "beta_at: leading block is singular; identity normalization "
        "impossible for this ordering");
  return B * lu.inverse();
}

Eigen::MatrixXd alpha_at(const JohansenResult& res, int r) {
  const int m = static_cast<int>(res.eigenvalues.size());
  if (r < 0 || r >= m) throw SizeError("alpha_at: rank outside [0, m)");
  if (r == 0) return MatrixXd(m, 0);
  const MatrixXd beta = beta_at(res, r);
  const MatrixXd btsb = beta.transpose() * res.s11 * beta;
  return res.s01 * beta * btsb.ldlt().solve(MatrixXd::Identity(r, r));
}

int select_rank_by_trace(const JohansenResult& res, double level) {
  const int m = static_cast<int>(res.eigenvalues.size());
  const int li = level_index(level);
  for (int r0 = 0; r0 < m; ++r0) {
    const double cv = res.trace_cv(r0, li);
    if (std::isnan(cv))
      throw ConfigError("rank selection: no embedded critical value for "
                        "m - r = " + std::to_string(m - r0) +
                        "; supply your own");
    if (res.trace_stats(r0) < cv) return r0;
  }
  return m;
}

}  // namespace tvecm
