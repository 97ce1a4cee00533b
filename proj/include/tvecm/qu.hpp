#pragma once
#include <optional>
#include <string>

#include "tvecm/panel.hpp"

namespace tvecm {

// Scan configuration for rank-change detection over unknown break dates.
struct QuConfig {
  double trimming = 0.15;  // minimum segment length as a share of T
  int max_breaks = 2;      // 1 or 2
  int null_rank = 0;       // rank assumed constant under the null
  int lag_k = 1;
  bool intercept = true;
  // optional user overrides for the attached 1% critical values
  std::optional<double> cv_sup_q1, cv_sup_q2, cv_wq, cv_sq;
};

// Null mean / standard deviation of the raw subsample statistic, keyed by the
// number of excess stochastic trends d = m - null_rank (intercept
// specification).  Embedded constants, regenerable with the qu-calibrate tool.
struct QuMoments {
  double mean = 0.0;
  double sd = 1.0;
};
QuMoments qu_null_moments(int d);

// Raw eigenvalue statistic on the self-contained panel window [first, last):
// the cointegration-rank likelihood-ratio statistic for "rank <= null_rank"
// computed from the window's own rows only.
double qu_raw_stat(const Panel& p, int first, int last, const QuConfig& cfg);

// Standardized rank-change kernel: max(0, (raw - mean) / sd) with the
// embedded null moments for d = m - null_rank.  Larger values indicate
// evidence of extra cointegrating relations inside the window.
double subsample_rank_stat(const Panel& p, int first, int last,
                           const QuConfig& cfg);

struct QuResult {
  double sup_q1 = 0.0;  // sup over single-break partitions
  double sup_q2 = 0.0;  // sup over two-break partitions (0 if max_breaks == 1)
  double wq = 0.0;      // max(sup_q1, sup_q2)
  double sq = 0.0;      // sup_q1 + sup_q2
  std::string break_q1;  // earliest argmax break date (first row of segment 2)
  std::string break_q2_first, break_q2_second;
  double cv_sup_q1 = 0.0, cv_sup_q2 = 0.0, cv_wq = 0.0, cv_sq = 0.0;  // 1%
  int effective_T = 0;
};

// Full-grid scan: every admissible integer break date under the trimming
// constraint; ties broken toward the earliest date(s).  Deterministic for any
// thread count.
QuResult qu_scan(const Panel& p, const QuConfig& cfg, int threads = 1);

}  // namespace tvecm
