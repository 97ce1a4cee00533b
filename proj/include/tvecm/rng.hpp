#pragma once
#include <cmath>
#include <cstdint>
#include <random>

namespace tvecm {

// splitmix64 finalizer.  Used to derive independent per-stream seeds from one
// master seed; fixed algorithm, do not change (simulated panels and frozen
// test oracles depend on the exact stream).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule: stream j of master seed s is
//   derive_seed(s, j) = splitmix64(s ^ splitmix64(j + 1)).
// Bootstrap replication j and Monte Carlo seed j both use this rule so that
// parallel work is reproducible independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 1));
}

// Deterministic U(0,1)/N(0,1) source: mt19937_64 (integer sequence fixed by
// the C++ standard, hence portable) + explicit Box-Muller.  We avoid
// std::normal_distribution on purpose: its output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // in [0, 1); 53 random mantissa bits
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586477 * u2;  // 2*pi
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next_u64() { return eng_(); }

  // integer in [0, n); modulo bias is < n/2^64, irrelevant for resampling
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace tvecm
