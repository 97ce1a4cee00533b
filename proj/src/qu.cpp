#include "tvecm/qu.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "tvecm/errors.hpp"
#include "tvecm/parallel.hpp"

namespace tvecm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Null moments of the raw window statistic per excess dimension d = 1..6,
// simulated from pure random-walk systems (lag 1, intercept) at window size
// ~400 with 4000 replications; see tools/qu_calibrate.cpp to regenerate.
constexpr double kNullMean[6] = {3.084, 10.253, 21.346, 36.456, 56.117, 79.926};
constexpr double kNullSd[6] = {2.710, 4.412, 6.010, 7.894, 9.559, 11.274};

// 1% critical values for the scan statistics in the reference configuration
constexpr double kCvSupQ1 = 11.24;
constexpr double kCvSupQ2 = 16.41;
constexpr double kCvWq = 11.42;
constexpr double kCvSq = 22.03;

void check_config(const QuConfig& cfg, int m) {
  if (!(cfg.trimming > 0.0 && cfg.trimming < 0.5))
    throw ConfigError("rank-change scan: trimming must lie in (0, 0.5)");
  if (cfg.max_breaks != 1 && cfg.max_breaks != 2)
    throw ConfigError("rank-change scan: max_breaks must be 1 or 2");
  if (cfg.lag_k < 1)
    throw ConfigError("rank-change scan: lag_k must be >= 1");
  if (cfg.null_rank < 0 || cfg.null_rank >= m)
    throw ConfigError("rank-change scan: null_rank must lie in [0, m)");
}

// Precomputed cumulative Gram matrices of the stacked regression row
// w_i = (dX_t, X_{t-k}, dX_{t-1..t-k}, 1) with t = i + k + 1, so the window
// of panel rows [a, b) maps to the contiguous effective rows [a, b - k - 1).
struct ScanContext {
  int T = 0, m = 0, k = 0, pz = 0, pw = 0, n_eff = 0;
  std::vector<MatrixXd> prefix;  // n_eff + 1 grams, prefix[0] = 0

  ScanContext(const Panel& p, const QuConfig& cfg) {
    p.validate();
    T = p.T();
    m = p.m();
    k = cfg.lag_k;
    if (k >= T / 4)
      throw SizeError("rank-change scan: lag_k must be below T/4");
    pz = m * k + (cfg.intercept ? 1 : 0);
    pw = 2 * m + pz;
    n_eff = T - k - 1;
    if (n_eff < 1)
      throw SizeError("rank-change scan: panel shorter than the lag window");
    prefix.assign(n_eff + 1, MatrixXd::Zero(pw, pw));
    VectorXd w(pw);
    for (int i = 0; i < n_eff; ++i) {
      const int t = i + k + 1;
      w.segment(0, m) = p.values.row(t) - p.values.row(t - 1);
      w.segment(m, m) = p.values.row(t - k);
      for (int j = 1; j <= k; ++j)
        w.segment(2 * m + (j - 1) * m, m) =
            p.values.row(t - j) - p.values.row(t - j - 1);
      if (cfg.intercept) w(pw - 1) = 1.0;
      prefix[i + 1] = prefix[i];
      prefix[i + 1].selfadjointView<Eigen::Lower>().rankUpdate(w);
    }
    for (auto& g : prefix) {
      const MatrixXd lower = g;
      g = lower.selfadjointView<Eigen::Lower>();
    }
  }

  // smallest window row count that keeps every moment matrix comfortably
  // full rank
  int min_rows() const { return pz + 2 * m + 2; }

  // raw statistic for panel rows [a, b)
  double raw(int a, int b, int null_rank) const {
    const int lo = a, hi = b - k - 1;  // effective-row range
    const int n = hi - lo;
    if (n < min_rows())
      throw SizeError("rank-change scan: window of " + std::to_string(b - a) +
                      " rows leaves too few regression rows (" +
                      std::to_string(n) + ")");
    const MatrixXd G = prefix[hi] - prefix[lo];
    const auto G00 = G.block(0, 0, m, m);
    const auto G01 = G.block(0, m, m, m);
    const auto G02 = G.block(0, 2 * m, m, pz);
    const auto G11 = G.block(m, m, m, m);
    const auto G12 = G.block(m, 2 * m, m, pz);
    const auto G22 = G.block(2 * m, 2 * m, pz, pz);

    Eigen::LLT<MatrixXd> llt22(G22);
    if (llt22.info() != Eigen::Success)
      throw NumericalError("rank-change scan: collinear conditioning block in "
                           "a window");
    const MatrixXd s00 = G00 - G02 * llt22.solve(G02.transpose());
    const MatrixXd s01 = G01 - G02 * llt22.solve(G12.transpose());
    const MatrixXd s11 = G11 - G12 * llt22.solve(G12.transpose());

    Eigen::LLT<MatrixXd> llt00(s00), llt11(s11);
    if (llt00.info() != Eigen::Success || llt11.info() != Eigen::Success)
      throw NumericalError("rank-change scan: singular moment matrix in a "
                           "window");
    const MatrixXd inner = s01.transpose() * llt00.solve(s01);
    const MatrixXd half = llt11.matrixL().solve(inner);
    const MatrixXd W = llt11.matrixL().solve(half.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (W + W.transpose()),
                                               Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("rank-change scan: eigensolver failed in a window");

    // eigenvalues come ascending; the statistic sums over the smallest
    // m - null_rank of them
    double sum = 0.0;
    for (int i = 0; i < m - null_rank; ++i) {
      double lam = es.eigenvalues()(i);
      lam = std::min(std::max(lam, 0.0), 1.0 - 1e-9);
      sum += std::log1p(-lam);
    }
    return -static_cast<double>(n) * sum;
  }
};

double standardized(double raw, int d) {
  const QuMoments mo = qu_null_moments(d);
  return std::max(0.0, (raw - mo.mean) / mo.sd);
}

}  // namespace

QuMoments qu_null_moments(int d) {
  if (d < 1 || d > 6)
    throw ConfigError("rank-change scan: no embedded null moments for " +
                      std::to_string(d) +
                      " excess trends (supported: 1..6)");
  return {kNullMean[d - 1], kNullSd[d - 1]};
}

double qu_raw_stat(const Panel& p, int first, int last, const QuConfig& cfg) {
  check_config(cfg, p.m());
  if (first < 0 || last > p.T() || first >= last)
    throw SizeError("rank-change scan: invalid window [" +
                    std::to_string(first) + ", " + std::to_string(last) + ")");
  ScanContext ctx(p, cfg);
  const int min_len =
      std::max(static_cast<int>(std::ceil(cfg.trimming * p.T())),
               ctx.min_rows() + cfg.lag_k + 1);
  if (last - first < min_len)
    throw SizeError("rank-change scan: window of " +
                    std::to_string(last - first) + " rows is shorter than " +
                    std::to_string(min_len));
  return ctx.raw(first, last, cfg.null_rank);
}

double subsample_rank_stat(const Panel& p, int first, int last,
                           const QuConfig& cfg) {
  const double raw = qu_raw_stat(p, first, last, cfg);
  return standardized(raw, p.m() - cfg.null_rank);
}

QuResult qu_scan(const Panel& p, const QuConfig& cfg, int threads) {
  check_config(cfg, p.m());
  ScanContext ctx(p, cfg);
  const int T = ctx.T;
  const int d = ctx.m - cfg.null_rank;
  qu_null_moments(d);  // fail early if unsupported
  const int L = std::max(static_cast<int>(std::ceil(cfg.trimming * T)),
                         ctx.min_rows() + cfg.lag_k + 1);
  if (2 * L > T)
    throw ConfigError("rank-change scan: trimming leaves no admissible "
                      "single-break date");
  if (cfg.max_breaks == 2 && 3 * L > T)
    throw ConfigError("rank-change scan: trimming leaves no admissible "
                      "two-break partition");

  // segment kernels touching the sample ends, indexed by the break date
  std::vector<double> head(T + 1, 0.0), tail(T + 1, 0.0);
  for (int b = L; b + L <= T; ++b) {
    head[b] = standardized(ctx.raw(0, b, cfg.null_rank), d);
    tail[b] = standardized(ctx.raw(b, T, cfg.null_rank), d);
  }

  QuResult res;
  res.effective_T = ctx.n_eff;

  double best1 = -1.0;
  int arg1 = -1;
  for (int b = L; b + L <= T; ++b) {
    const double stat = std::max(head[b], tail[b]);
    if (stat > best1) {
      best1 = stat;
      arg1 = b;
    }
  }
  res.sup_q1 = best1;
  res.break_q1 = p.dates[arg1];

  if (cfg.max_breaks == 2) {
    const int n_b1 = T - 3 * L + 1;  // b1 in [L, T - 2L]
    std::vector<std::tuple<double, int, int>> best(
        n_b1, std::make_tuple(-1.0, -1, -1));
    parallel_for(n_b1, threads, [&](int idx) {
      const int b1 = L + idx;
      double loc = -1.0;
      int loc2 = -1;
      for (int b2 = b1 + L; b2 + L <= T; ++b2) {
        const double mid = standardized(ctx.raw(b1, b2, cfg.null_rank), d);
        const double stat = std::max({head[b1], mid, tail[b2]});
        if (stat > loc) {
          loc = stat;
          loc2 = b2;
        }
      }
      best[idx] = {loc, b1, loc2};
    });
    double best2 = -1.0;
    int arg2a = -1, arg2b = -1;
    for (const auto& [stat, b1, b2] : best)
      if (stat > best2) {
        best2 = stat;
        arg2a = b1;
        arg2b = b2;
      }
    res.sup_q2 = best2;
    res.break_q2_first = p.dates[arg2a];
    res.break_q2_second = p.dates[arg2b];
  }

  res.wq = std::max(res.sup_q1, res.sup_q2);
  res.sq = res.sup_q1 + res.sup_q2;
  res.cv_sup_q1 = cfg.cv_sup_q1.value_or(kCvSupQ1);
  res.cv_sup_q2 = cfg.cv_sup_q2.value_or(kCvSupQ2);
  res.cv_wq = cfg.cv_wq.value_or(kCvWq);
  res.cv_sq = cfg.cv_sq.value_or(kCvSq);
  return res;
}

}  // namespace tvecm
