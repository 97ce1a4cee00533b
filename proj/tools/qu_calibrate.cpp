// Regenerates the null-distribution moments embedded in src/qu.cpp.
//
// For each excess-trend count d, simulates d-dimensional pure random-walk
// panels, evaluates the raw rank-change window statistic (null rank 0, lag 1,
// intercept) on the full window, and prints the mean/sd table in the exact
// form used by the library, plus short-window diagnostics.
//
// Usage: qu-calibrate [reps] [T]
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "tvecm/qu.hpp"
#include "tvecm/rng.hpp"

using namespace tvecm;

namespace {

Panel random_walk_panel(int T, int m, std::uint64_t seed) {
  Rng rng(seed);
  Panel p;
  p.values.resize(T, m);
  for (int j = 0; j < m; ++j) p.names.push_back("s" + std::to_string(j + 1));
  for (int t = 0; t < T; ++t) p.dates.push_back(std::to_string(t + 1));
  for (int j = 0; j < m; ++j) {
    double x = 0.0;
    for (int t = 0; t < T; ++t) {
      x += rng.normal();
      p.values(t, j) = x;
    }
  }
  return p;
}

struct Moments {
  double mean = 0.0, sd = 0.0;
};

Moments run(int d, int reps, int T, std::uint64_t stream) {
  QuConfig cfg;
  cfg.null_rank = 0;
  cfg.lag_k = 1;
  cfg.intercept = true;
  double sum = 0.0, sumsq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    Panel p = random_walk_panel(T, d, derive_seed(stream, rep));
    const double s = qu_raw_stat(p, 0, T, cfg);
    sum += s;
    sumsq += s * s;
  }
  Moments m;
  m.mean = sum / reps;
  m.sd = std::sqrt((sumsq - sum * sum / reps) / (reps - 1));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 4000;
  const int T = argc > 2 ? std::atoi(argv[2]) : 400;
  if (reps < 2 || T < 40) {
    std::fprintf(stderr, "usage: qu-calibrate [reps >= 2] [T >= 40]\n");
    return 2;
  }

  std::vector<Moments> big, small;
  for (int d = 1; d <= 6; ++d) {
    big.push_back(run(d, reps, T, 900000 + d));
    small.push_back(run(d, reps, std::max(40, T / 5), 910000 + d));
  }

  std::printf("// window size %d, %d replications\n", T, reps);
  std::printf("constexpr double kNullMean[6] = {");
  for (int d = 0; d < 6; ++d)
    std::printf("%.3f%s", big[d].mean, d < 5 ? ", " : "};\n");
  std::printf("constexpr double kNullSd[6] = {");
  for (int d = 0; d < 6; ++d)
    std::printf("%.3f%s", big[d].sd, d < 5 ? ", " : "};\n");

  std::printf("\n// short-window drift check (window size %d)\n",
              std::max(40, T / 5));
  for (int d = 0; d < 6; ++d)
    std::printf("// d=%d: mean %.3f (vs %.3f), sd %.3f (vs %.3f)\n", d + 1,
                small[d].mean, big[d].mean, small[d].sd, big[d].sd);
  return 0;
}
