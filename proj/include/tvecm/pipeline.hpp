#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "tvecm/simulate.hpp"
#include "tvecm/unitroot.hpp"

namespace tvecm {

// Settings for the full analysis chain
//   ingest -> describe -> unitroot -> johansen -> vecm -> stability -> tvvecm
// (each stage's artifacts are written before the next stage starts).
struct PipelineConfig {
  std::string input_path;
  std::string out_dir = ".";
  std::string format = "json";  // json | csv | both
  int threads = 1;
  std::uint64_t seed = 1;       // bootstrap master seed
  bool log_input = false;       // natural-log the panel after ingestion

  // unit-root stage (applied to levels and to first differences)
  AdfGlsConfig adf;

  // cointegration stages
  int lag_k = 1;
  bool intercept = true;
  std::optional<int> rank_override;  // skip the 10% trace-sequence selection
  bool vecm_restricted = false;      // report on beta'X instead of levels
  std::optional<int> nw_bandwidth;

  // rank-stability stage
  double qu_trimming = 0.15;
  int qu_max_breaks = 2;
  std::optional<int> qu_null_rank;  // default: the rank in use

  // time-varying stage
  double smoothness_lambda = 1.0;
  bool tv_intercept = false;
  int bootstrap = 0;       // 0 = no bands, otherwise >= 100 replications
  bool full_paths = false;
  int accel_window = 1;    // odd moving-average window on delta_zeta; 1 = raw
};

// Plain-text configuration: one `key=value` per line, blank lines and
// '#' comments allowed.  Returns the pairs in file order (later lines win).
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Builds a PipelineConfig from key=value pairs; unknown keys (other than the
// `sim.` namespace reserved for the generator) are ConfigError.
PipelineConfig config_from_map(const std::map<std::string, std::string>& kv);

// Builds a generator spec from the `sim.` namespace of the same map;
// unset keys fall back to a documented bivariate default.
SimSpec sim_spec_from_map(const std::map<std::string, std::string>& kv);

struct PipelineOutcome {
  int exit_code = 0;         // 0 ok, 1 computation error, 2 config/input error
  std::string failed_stage;  // empty on success
  std::string message;       // error text on failure
};

// Runs the requested stages in dependency order, writing each stage's
// artifacts into cfg.out_dir before the next stage starts.  Stages a
// requested stage depends on (johansen supplies the cointegrating matrix and
// the default ranks downstream) are computed silently when not requested.
// Nothing is thrown; failures come back as the outcome.
PipelineOutcome run_stages(const PipelineConfig& cfg,
                           const std::set<std::string>& emit_stages,
                           bool with_manifest);

// Full chain plus manifest.json listing every artifact with its sha-256
// digest.  The manifest is a pure function of (input bytes, settings, seed):
// it contains no timestamps, no absolute paths, and no thread count.  On
// failure the partial outputs are preserved and the manifest records the
// failed stage.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

}  // namespace tvecm
