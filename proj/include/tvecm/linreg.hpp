#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tvecm/errors.hpp"

namespace tvecm {

// Plain OLS via column-pivoted QR; throws NumericalError naming the dependent
// columns when the regressor matrix is rank deficient.
struct Ols {
  Eigen::VectorXd coef;
  Eigen::VectorXd resid;
  double ssr = 0.0;
  Eigen::MatrixXd xtx_inv;  // (X'X)^{-1}
};

inline Ols ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<std::string>* col_names = nullptr) {
  if (X.rows() != y.size()) throw SizeError("ols: row mismatch");
  if (X.rows() <= X.cols())
    throw SizeError("ols: need more rows (" + std::to_string(X.rows()) +
                    ") than columns (" + std::to_string(X.cols()) + ")");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    std::string msg = "ols: collinear regressors;";
    const auto perm = qr.colsPermutation().indices();
    for (int i = qr.rank(); i < X.cols(); ++i) {
      const int col = perm(i);
      msg += " column " + (col_names && col < (int)col_names->size()
                               ? "'" + (*col_names)[col] + "'"
                               : std::to_string(col));
    }
    throw NumericalError(msg);
  }
  Ols out;
  out.coef = qr.solve(y);
  out.resid = y - X * out.coef;
  out.ssr = out.resid.squaredNorm();
  out.xtx_inv = (X.transpose() * X)
                    .ldlt()
                    .solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  return out;
}

}  // namespace tvecm
