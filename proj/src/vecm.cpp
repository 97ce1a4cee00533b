#include "tvecm/vecm.hpp"

#include <cmath>

#include "tvecm/linreg.hpp"

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int newey_west_default_bandwidth(int n) {
  if (n < 1) throw SizeError("bandwidth rule: n must be positive");
  return static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0)));
}

MatrixXd newey_west_cov(const MatrixXd& X, const VectorXd& resid,
                        int bandwidth) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (resid.size() != n)
    throw SizeError("hac covariance: residual length " +
                    std::to_string(resid.size()) + " does not match rows " +
                    std::to_string(n));
  if (bandwidth < 0) throw DomainError("hac covariance: negative bandwidth");
  if (bandwidth >= n)
    throw SizeError("hac covariance: bandwidth must be below the sample size");

  // scores f_t = x_t e_t  (n x p)
  const MatrixXd F = X.array().colwise() * resid.array();
  MatrixXd meat = F.transpose() * F;  // Gamma_0
  for (int j = 1; j <= bandwidth; ++j) {
    const double w = 1.0 - static_cast<double>(j) / (bandwidth + 1);
    const MatrixXd G =
        F.bottomRows(n - j).transpose() * F.topRows(n - j);  // Gamma_j
    meat += w * (G + G.transpose());
  }

  const MatrixXd xtx = X.transpose() * X;
  Eigen::LDLT<MatrixXd> ldlt(xtx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("hac covariance: singular X'X");
  const MatrixXd bread = ldlt.solve(MatrixXd::Identity(p, p));
  MatrixXd V = bread * meat * bread;
  return 0.5 * (V + V.transpose());
}

VecmFit estimate_vecm(const Panel& p, const VecmSpec& spec,
                      const std::optional<MatrixXd>& beta,
                      std::optional<int> nw_bandwidth) {
  p.validate();
  const int T = p.T(), m = p.m(), k = spec.lag_k;
  if (k < 1) throw SizeError("vecm: lag_k must be >= 1");
  if (k >= T / 4) throw SizeError("vecm: lag_k must be below T/4");
  int r = m;  // unrestricted level block
  if (beta) {
    if (beta->rows() != m)
      throw SizeError("vecm: beta must have one row per series");
    r = static_cast<int>(beta->cols());
    if (r < 1 || r >= m) throw SizeError("vecm: beta rank must lie in [1, m)");
  }
  const int n = T - k - 1;
  const int pcols = m * k + (spec.intercept ? 1 : 0) + r;
  if (n <= pcols + 2)
    throw SizeError("vecm: effective sample too short (" + std::to_string(n) +
                    " rows for " + std::to_string(pcols) + " regressors)");

  VecmFit fit;
  fit.lag_k = k;
  fit.restricted = beta.has_value();
  fit.effective_T = n;
  fit.eqnames = p.names;
  fit.dates.assign(p.dates.begin() + (k + 1), p.dates.end());

  // columns: lagged differences, intercept, level block
  fit.X.resize(n, pcols);
  MatrixXd Y(n, m);
  for (int i = 0; i < n; ++i) {
    const int t = k + 1 + i;
    Y.row(i) = p.values.row(t) - p.values.row(t - 1);
    for (int j = 1; j <= k; ++j)
      fit.X.block(i, (j - 1) * m, 1, m) =
          p.values.row(t - j) - p.values.row(t - j - 1);
    if (spec.intercept) fit.X(i, m * k) = 1.0;
    if (beta)
      fit.X.block(i, pcols - r, 1, r) = p.values.row(t - k) * (*beta);
    else
      fit.X.block(i, pcols - r, 1, r) = p.values.row(t - k);
  }
  for (int j = 1; j <= k; ++j)
    for (int s = 0; s < m; ++s)
      fit.colnames.push_back("d" + p.names[s] + ".l" + std::to_string(j));
  if (spec.intercept) fit.colnames.push_back("const");
  if (beta)
    for (int j = 0; j < r; ++j)
      fit.colnames.push_back("ecm" + std::to_string(j + 1));
  else
    for (int s = 0; s < m; ++s) fit.colnames.push_back(p.names[s] + ".l");

  fit.nw_bandwidth = nw_bandwidth.value_or(newey_west_default_bandwidth(n));

  fit.coef.resize(pcols, m);
  fit.se.resize(pcols, m);
  fit.resid.resize(n, m);
  fit.adj_r2.resize(m);
  for (int e = 0; e < m; ++e) {
    const Ols ols = ols_fit(fit.X, Y.col(e), &fit.colnames);
    fit.coef.col(e) = ols.coef;
    fit.resid.col(e) = ols.resid;
    const MatrixXd V = newey_west_cov(fit.X, ols.resid, fit.nw_bandwidth);
    fit.se.col(e) = V.diagonal().cwiseMax(0.0).cwiseSqrt();
    const double ybar = Y.col(e).mean();
    const double sst = (Y.col(e).array() - ybar).square().sum();
    if (sst <= 0.0)
      throw NumericalError("vecm: response '" + p.names[e] +
                           "' has zero variance");
    fit.adj_r2(e) =
        1.0 - (ols.ssr / (n - pcols)) / (sst / (n - 1));
  }
  return fit;
}

HansenLcResult hansen_lc(const VecmFit& fit) {
  const int n = fit.effective_T;
  const int p = static_cast<int>(fit.X.cols());
  const int m = static_cast<int>(fit.resid.cols());
  if (n < 2 || p < 1 || m < 1) throw SizeError("stability statistic: empty fit");
  const int q = m * (p + 1);  // coefficients plus one variance per equation
  if (n <= q)
    throw SizeError("stability statistic: more parameters (" +
                    std::to_string(q) + ") than observations (" +
                    std::to_string(n) + ")");

  // score rows: for each equation, x_t * e_t followed by e_t^2 - sigma2
  MatrixXd F(n, q);
  for (int e = 0; e < m; ++e) {
    const VectorXd& u = fit.resid.col(e);
    F.middleCols(e * (p + 1), p) = fit.X.array().colwise() * u.array();
    const double sigma2 = u.squaredNorm() / n;
    F.col(e * (p + 1) + p) = u.array().square() - sigma2;
  }

  const MatrixXd V = F.transpose() * F;
  Eigen::LDLT<MatrixXd> ldlt(V);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      (ldlt.vectorD().array() <= 0.0).any())
    throw NumericalError(
        "stability statistic: singular score covariance (collinear "
        "regressors or degenerate residuals)");

  // Lc = (1/n) sum_t S_t' V^{-1} S_t, cumulative S_t
  double acc = 0.0;
  VectorXd S = VectorXd::Zero(q);
  for (int t = 0; t < n; ++t) {
    S += F.row(t).transpose();
    acc += S.dot(ldlt.solve(S));
  }

  HansenLcResult out;
  out.lc = acc / n;
  out.n_params = q;
  return out;
}

}  // namespace tvecm
