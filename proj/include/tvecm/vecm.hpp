#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "tvecm/johansen.hpp"
#include "tvecm/panel.hpp"

namespace tvecm {

// Time-invariant error-correction fit.  All equations share the regressor
// matrix: k lagged-difference blocks, the intercept, then the level block
// (full X_{t-k} when unrestricted, beta' X_{t-k} when a beta is supplied).
struct VecmFit {
  Eigen::MatrixXd X;                  // n x p regressors
  std::vector<std::string> colnames;  // p
  std::vector<std::string> eqnames;   // m response names
  std::vector<std::string> dates;     // n response dates
  Eigen::MatrixXd coef;               // p x m
  Eigen::MatrixXd se;                 // p x m, HAC (Bartlett kernel)
  Eigen::MatrixXd resid;              // n x m
  Eigen::VectorXd adj_r2;             // m
  int effective_T = 0;                // n = T - lag_k - 1
  int lag_k = 1;
  bool restricted = false;  // supplied beta
  int nw_bandwidth = 0;     // bandwidth used for the standard errors
};

// default HAC bandwidth floor(4 (n/100)^{2/9})
int newey_west_default_bandwidth(int n);

// HAC sandwich covariance of OLS coefficients with Bartlett weights
// w_j = 1 - j/(L+1); bandwidth 0 reduces to the heteroskedasticity-robust
// (White) covariance.  Output is symmetrized.
Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& resid, int bandwidth);

VecmFit estimate_vecm(const Panel& p, const VecmSpec& spec,
                      const std::optional<Eigen::MatrixXd>& beta = {},
                      std::optional<int> nw_bandwidth = {});

// Joint parameter-constancy statistic over every equation's coefficients and
// error variances: scores f_t = (x_t e_it, e_it^2 - sigma_i^2)_{i=1..m},
// Lc = (1/n) sum_t S_t' V^{-1} S_t with S_t the cumulative score sums and
// V = sum_t f_t f_t'.
struct HansenLcResult {
  double lc = 0.0;
  int n_params = 0;  // m (p + 1)
};

HansenLcResult hansen_lc(const VecmFit& fit);

}  // namespace tvecm
