#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tvecm/panel.hpp"

namespace tvecm {

// Loading-matrix path for the generator: constant, one-step change, or a
// linear drift between two endpoints over the output window.
struct AlphaSchedule {
  enum class Kind { constant, step, linear };
  Kind kind = Kind::constant;
  Eigen::MatrixXd first;   // m x r: value at output index 0 (and during burn-in)
  Eigen::MatrixXd second;  // m x r: value from step_at on / at the last index
  int step_at = 0;         // step kind: first 0-based output index using `second`

  Eigen::MatrixXd at(int t, int T) const;

  static AlphaSchedule constant(Eigen::MatrixXd a);
  static AlphaSchedule step(Eigen::MatrixXd before, Eigen::MatrixXd after, int at);
  static AlphaSchedule linear(Eigen::MatrixXd start, Eigen::MatrixXd end);
};

// Generator for  dX_t = sum_i Gamma_i dX_{t-i} + alpha_t (beta' X_{t-k}) + mu + eps_t,
// eps_t ~ N(0, diag(noise_scale^2)), from zero initial levels with a burn-in.
struct SimSpec {
  int m = 0;           // series count
  int r = 0;           // cointegrating columns, 0 <= r < m
  int T = 0;           // output length (after burn-in)
  int burn_in = 100;
  std::uint64_t seed = 0;
  Eigen::MatrixXd beta;                // m x r
  AlphaSchedule alpha;                 // m x r path
  std::vector<Eigen::MatrixXd> gamma;  // k short-run blocks, each m x m
  Eigen::VectorXd intercept;           // m
  Eigen::VectorXd noise_scale;         // m, all > 0

  int lag_k() const { return static_cast<int>(gamma.size()); }
};

// Eigenvalues of the companion matrix of the implied levels VAR(k+1).
Eigen::VectorXcd companion_roots(const std::vector<Eigen::MatrixXd>& gamma,
                                 const Eigen::MatrixXd& Pi);

// Throws on dimension mismatches and on infeasible dynamics: every constant
// parameter segment must put all companion roots on or inside the unit
// circle with exactly m - rank(alpha_t beta') roots at +1.
void validate_sim_spec(const SimSpec& spec);

// Bit-reproducible under a fixed seed.  Output panel: T rows of levels,
// dates "1".."T".  Throws NumericalError if any level exceeds 1e12.
Panel simulate_vecm(const SimSpec& spec);

// Largest singular value of alpha_t for each output period, length T.
std::vector<double> true_zeta_path(const SimSpec& spec);

}  // namespace tvecm
