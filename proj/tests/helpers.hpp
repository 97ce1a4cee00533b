#pragma once
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tvecm/panel.hpp"
#include "tvecm/rng.hpp"

namespace testutil {

inline std::filesystem::path tmp_dir() {
  auto d = std::filesystem::temp_directory_path() / "tvecm_tests";
  std::filesystem::create_directories(d);
  return d;
}

inline std::string write_file(const std::string& name, const std::string& content) {
  auto p = tmp_dir() / name;
  std::ofstream out(p);
  out << content;
  return p.string();
}

// monthly labels "1990-01", "1990-02", ... (lexicographically ordered)
inline std::vector<std::string> month_labels(int n) {
  std::vector<std::string> v;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", 1990 + i / 12, 1 + i % 12);
    v.emplace_back(buf);
  }
  return v;
}

inline std::vector<std::string> int_labels(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(std::to_string(i));
  return v;
}

// panel of independent Gaussian random walks
inline tvecm::Panel rw_panel(int T, int m, std::uint64_t seed) {
  tvecm::Rng rng(seed);
  tvecm::Panel p;
  p.dates = int_labels(T);
  for (int j = 0; j < m; ++j) p.names.push_back("s" + std::to_string(j + 1));
  p.values.resize(T, m);
  for (int j = 0; j < m; ++j) {
    double x = 0.0;
    for (int t = 0; t < T; ++t) {
      x += rng.normal();
      p.values(t, j) = x;
    }
  }
  return p;
}

}  // namespace testutil
