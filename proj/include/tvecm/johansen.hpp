#pragma once
#include <Eigen/Dense>
#include <optional>

#include "tvecm/panel.hpp"

namespace tvecm {

// error-correction regression shape:
//   dX_t = Gamma_1 dX_{t-1} + ... + Gamma_k dX_{t-k} + Pi X_{t-k} + mu + e_t
struct VecmSpec {
  int lag_k = 1;              // lagged-difference depth k >= 1
  bool intercept = true;      // deterministic term: intercept | none
  std::optional<int> rank_r;  // cointegrating rank where one is needed
};

struct JohansenResult {
  Eigen::VectorXd eigenvalues;   // squared canonical correlations, descending
  Eigen::MatrixXd eigenvectors;  // m x m, V' S11 V = I, column i <-> eigenvalue i
  Eigen::MatrixXd beta_hat;      // m x r at rank_r, leading r x r block = identity
  Eigen::MatrixXd alpha_hat;     // m x r at rank_r
  Eigen::VectorXd trace_stats;   // entry r0 = 0..m-1: null "rank <= r0"
  Eigen::VectorXd maxeig_stats;  // entry r0: null "rank = r0" vs "r0 + 1"
  Eigen::MatrixXd trace_cv;      // m x 3, columns 10%/5%/1%; NaN if untabulated
  Eigen::MatrixXd maxeig_cv;     // m x 3
  Eigen::MatrixXd s01, s11;      // moment matrices (for rank-specific loadings)
  int effective_T = 0;           // regression rows: T - lag_k - 1
  int rank_r = 1;                // rank used for beta_hat / alpha_hat
};

// -T ln(1 - lambda); requires 0 <= lambda < 1
double maxeig_stat(double lambda, int effective_T);

// -T sum_{i > null_rank} ln(1 - lambda_i); lambdas must be descending in [0,1)
double trace_stat(const Eigen::VectorXd& lambdas, int null_rank,
                  int effective_T);

// Embedded asymptotic critical values keyed by (m - r, deterministic spec,
// level in {0.10, 0.05, 0.01}).  NaN when outside the tabulated range.
double johansen_cv(bool trace, int m_minus_r, bool intercept, double level);

// Reduced-rank regression: concentrates the lagged differences and the
// intercept out of dX_t and X_{t-k}, solves the canonical-correlation
// eigenproblem, and attaches test statistics and critical values.
JohansenResult johansen_rrr(const Panel& p, const VecmSpec& spec);

// normalized cointegrating vectors / loadings at an arbitrary rank
Eigen::MatrixXd beta_at(const JohansenResult& res, int r);
Eigen::MatrixXd alpha_at(const JohansenResult& res, int r);

// smallest r0 whose trace statistic is below the critical value; m if every
// null is rejected
int select_rank_by_trace(const JohansenResult& res, double level = 0.10);

}  // namespace tvecm
