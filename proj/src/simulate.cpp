#include "tvecm/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "tvecm/rng.hpp"

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd AlphaSchedule::at(int t, int T) const {
  switch (kind) {
    case Kind::constant:
      return first;
    case Kind::step:
      return t < step_at ? first : second;
    case Kind::linear: {
      if (T <= 1) return first;
      const double w = static_cast<double>(t) / (T - 1);
      return first + w * (second - first);
    }
  }
  return first;
}

AlphaSchedule AlphaSchedule::constant(MatrixXd a) {
  AlphaSchedule s;
  s.kind = Kind::constant;
  s.first = a;
  s.second = std::move(a);
  return s;
}

AlphaSchedule AlphaSchedule::step(MatrixXd before, MatrixXd after, int at) {
  AlphaSchedule s;
  s.kind = Kind::step;
  s.first = std::move(before);
  s.second = std::move(after);
  s.step_at = at;
  return s;
}

AlphaSchedule AlphaSchedule::linear(MatrixXd start, MatrixXd end) {
  AlphaSchedule s;
  s.kind = Kind::linear;
  s.first = std::move(start);
  s.second = std::move(end);
  return s;
}

Eigen::VectorXcd companion_roots(const std::vector<MatrixXd>& gamma,
                                 const MatrixXd& Pi) {
  const int m = static_cast<int>(Pi.rows());
  const int k = static_cast<int>(gamma.size());
  // levels VAR(k+1):  X_t = sum A_i X_{t-i},
  // A_i = [i=1]I + [i<=k]Gamma_i - [i>=2]Gamma_{i-1} + [i=k]Pi
  std::vector<MatrixXd> A(k + 1, MatrixXd::Zero(m, m));
  for (int i = 1; i <= k + 1; ++i) {
    MatrixXd& Ai = A[i - 1];
    if (i == 1) Ai += MatrixXd::Identity(m, m);
    if (i <= k) Ai += gamma[i - 1];
    if (i >= 2) Ai -= gamma[i - 2];
    if (i == k) Ai += Pi;
  }
  if (k == 0) A[0] += Pi;  // degenerate: dX_t = Pi X_{t-0}... not used, k >= 1 in practice

  const int n = (k + 1) * m;
  MatrixXd C = MatrixXd::Zero(n, n);
  for (int i = 0; i <= k; ++i) C.block(0, i * m, m, m) = A[i];
  if (k > 0) C.block(m, 0, k * m, k * m).setIdentity();
  Eigen::EigenSolver<MatrixXd> es(C, /*computeEigenvectors=*/false);
  return es.eigenvalues();
}

namespace {

int matrix_rank(const MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-10) ++r;
  return r;
}

void check_segment(const std::vector<MatrixXd>& gamma, const MatrixXd& alpha,
                   const MatrixXd& beta, int m, const char* label) {
  const MatrixXd Pi = (beta.cols() > 0)
                          ? MatrixXd(alpha * beta.transpose())
                          : MatrixXd::Zero(m, m);
  const int want_unit = m - matrix_rank(Pi);
  const Eigen::VectorXcd roots = companion_roots(gamma, Pi);
  int unit = 0;
  for (int i = 0; i < roots.size(); ++i) {
    const double mod = std::abs(roots(i));
    if (mod > 1.0 + 1e-8)
      throw DomainError(std::string("infeasible dynamics (") + label +
                        "): explosive companion root, modulus " +
                        std::to_string(mod));
    if (std::abs(roots(i) - std::complex<double>(1.0, 0.0)) < 1e-6) {
      ++unit;
    } else if (mod > 1.0 - 1e-6) {
      throw DomainError(std::string("infeasible dynamics (") + label +
                        "): companion root on the unit circle away from +1, "
                        "modulus " + std::to_string(mod));
    }
  }
  if (unit != want_unit)
    throw DomainError(std::string("infeasible dynamics (") + label + "): " +
                      std::to_string(unit) + " unit roots, expected " +
                      std::to_string(want_unit) +
                      " (= m - rank(alpha beta'))");
}

}  // namespace

void validate_sim_spec(const SimSpec& spec) {
  if (spec.m < 1) throw SizeError("sim spec: m must be >= 1");
  if (spec.r < 0 || spec.r >= spec.m)
    throw SizeError("sim spec: need 0 <= r < m, got r = " +
                    std::to_string(spec.r) + ", m = " + std::to_string(spec.m));
  if (spec.T < 1) throw SizeError("sim spec: T must be >= 1");
  if (spec.burn_in < 0) throw SizeError("sim spec: negative burn-in");
  if (spec.beta.rows() != spec.m || spec.beta.cols() != spec.r)
    throw SizeError("sim spec: beta must be m x r");
  auto check_alpha_dims = [&](const MatrixXd& a) {
    if (a.rows() != spec.m || a.cols() != spec.r)
      throw SizeError("sim spec: alpha blocks must be m x r");
  };
  check_alpha_dims(spec.alpha.first);
  check_alpha_dims(spec.alpha.second);
  if (spec.alpha.kind == AlphaSchedule::Kind::step &&
      (spec.alpha.step_at < 0 || spec.alpha.step_at > spec.T))
    throw SizeError("sim spec: step index outside [0, T]");
  if (spec.gamma.empty())
    throw SizeError("sim spec: need at least one short-run lag block");
  for (const auto& g : spec.gamma)
    if (g.rows() != spec.m || g.cols() != spec.m)
      throw SizeError("sim spec: gamma blocks must be m x m");
  if (spec.intercept.size() != spec.m)
    throw SizeError("sim spec: intercept must have length m");
  if (spec.noise_scale.size() != spec.m)
    throw SizeError("sim spec: noise_scale must have length m");
  for (int j = 0; j < spec.m; ++j)
    if (!(spec.noise_scale(j) > 0.0))
      throw DomainError("sim spec: noise_scale must be positive, series " +
                        std::to_string(j + 1));

  // feasibility of each constant-parameter segment (linear schedules are
  // checked at their endpoints)
  switch (spec.alpha.kind) {
    case AlphaSchedule::Kind::constant:
      check_segment(spec.gamma, spec.alpha.first, spec.beta, spec.m, "alpha");
      break;
    case AlphaSchedule::Kind::step:
      check_segment(spec.gamma, spec.alpha.first, spec.beta, spec.m,
                    "alpha before step");
      check_segment(spec.gamma, spec.alpha.second, spec.beta, spec.m,
                    "alpha after step");
      break;
    case AlphaSchedule::Kind::linear:
      check_segment(spec.gamma, spec.alpha.first, spec.beta, spec.m,
                    "alpha start");
      check_segment(spec.gamma, spec.alpha.second, spec.beta, spec.m,
                    "alpha end");
      break;
  }
}

Panel simulate_vecm(const SimSpec& spec) {
  validate_sim_spec(spec);
  const int m = spec.m, k = spec.lag_k(), T = spec.T;
  const int total = spec.burn_in + T;
  Rng rng(spec.seed);

  // levels[0..k] are zero initial conditions; step j of the recursion fills
  // levels[k + j + 1]
  std::vector<VectorXd> levels(k + 1 + total, VectorXd::Zero(m));
  std::vector<VectorXd> dx(k + 1 + total, VectorXd::Zero(m));

  for (int j = 0; j < total; ++j) {
    const int t = k + 1 + j;  // index being generated
    const int t_out = j - spec.burn_in;  // < 0 during burn-in
    const MatrixXd a = spec.alpha.at(t_out < 0 ? 0 : t_out, T);

    VectorXd d = spec.intercept;
    for (int i = 1; i <= k; ++i) d += spec.gamma[i - 1] * dx[t - i];
    if (spec.r > 0) d += a * (spec.beta.transpose() * levels[t - k]);
    for (int s = 0; s < m; ++s) d(s) += spec.noise_scale(s) * rng.normal();

    dx[t] = d;
    levels[t] = levels[t - 1] + d;
    if (levels[t].cwiseAbs().maxCoeff() > 1e12)
      throw NumericalError("simulation diverged: |level| > 1e12 at step " +
                           std::to_string(j + 1));
  }

  Panel p;
  p.names.reserve(m);
  for (int j = 0; j < m; ++j) p.names.push_back("s" + std::to_string(j + 1));
  p.dates.reserve(T);
  for (int t = 1; t <= T; ++t) p.dates.push_back(std::to_string(t));
  p.values.resize(T, m);
  for (int t = 0; t < T; ++t)
    p.values.row(t) = levels[k + 1 + spec.burn_in + t].transpose();
  p.validate();
  return p;
}

std::vector<double> true_zeta_path(const SimSpec& spec) {
  validate_sim_spec(spec);
  std::vector<double> z(spec.T, 0.0);
  if (spec.r == 0) return z;
  for (int t = 0; t < spec.T; ++t) {
    Eigen::JacobiSVD<MatrixXd> svd(spec.alpha.at(t, spec.T));
    z[t] = svd.singularValues()(0);
  }
  return z;
}

}  // namespace tvecm
