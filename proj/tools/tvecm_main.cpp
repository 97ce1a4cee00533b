// tvecm: cointegration / time-varying error-correction analysis CLI.
// Subcommands run one analysis stage each; `pipeline` runs them all and
// writes a hash manifest; `simulate` generates synthetic panels.
// Exit codes: 0 success, 1 computation error, 2 configuration/input error.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "tvecm/errors.hpp"
#include "tvecm/panel.hpp"
#include "tvecm/pipeline.hpp"
#include "tvecm/report.hpp"
#include "tvecm/simulate.hpp"

namespace {

using tvecm::format_double;

struct Flags {
  std::string input, out = ".", config, format;
  std::uint64_t seed = 0;
  int threads = 0;

  // stage options (strings so "absent" is distinguishable; see kv merge)
  std::string adf_spec;
  int max_lag = 0;
  int lags = 0;
  std::string det;
  int rank = 0;
  bool restricted = false;
  int bandwidth = 0;
  double trim = 0.0;
  int null_rank = 0;
  int max_breaks = 0;
  double lambda = 0.0;
  int bootstrap = 0;
  bool full_paths = false;
  bool tv_intercept = false;
  int accel_window = 0;
  bool log_input = false;
  int sim_T = 0;
};

// registers the options shared by every analysis subcommand
void add_common(CLI::App* sub, Flags& f, bool with_input = true) {
  if (with_input)
    sub->add_option("--input", f.input, "panel CSV (date column first)");
  sub->add_option("--out", f.out, "output directory (default .)");
  sub->add_option("--config", f.config, "key=value configuration file");
  sub->add_option("--seed", f.seed, "master seed (bootstrap/simulation)");
  sub->add_option("--threads", f.threads, "worker thread cap");
  sub->add_option("--format", f.format, "report format: json|csv|both");
}

// merge a flag into the key=value map when it was given (flags win);
// flags that do not exist on this subcommand are skipped
void put(CLI::App* sub, const std::string& flag,
         std::map<std::string, std::string>& kv, const std::string& key,
         const std::string& value) {
  const CLI::Option* opt = sub->get_option_no_throw(flag);
  if (opt != nullptr && opt->count() > 0) kv[key] = value;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const tvecm::IngestionError& e) {
    std::fprintf(stderr, "error (input): %s\n", e.what());
    return 2;
  } catch (const tvecm::ConfigError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cointegration and time-varying error-correction analysis toolkit"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* describe = app.add_subcommand(
      "describe", "per-series mean/sd/min/max summary");
  CLI::App* unitroot = app.add_subcommand(
      "unitroot", "ADF-GLS tests on levels and first differences");
  CLI::App* johansen = app.add_subcommand(
      "johansen", "reduced-rank cointegration tests");
  CLI::App* vecm = app.add_subcommand(
      "vecm", "time-invariant error-correction estimates");
  CLI::App* stability = app.add_subcommand(
      "stability", "rank-change break scan");
  CLI::App* tvvecm = app.add_subcommand(
      "tvvecm", "time-varying coefficient paths and the comovement series");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a synthetic cointegrated panel");
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "run every stage and write a hash manifest");

  for (CLI::App* sub :
       {describe, unitroot, johansen, vecm, stability, tvvecm, pipeline})
    add_common(sub, f);
  add_common(simulate, f, /*with_input=*/false);

  unitroot->add_option("--spec", f.adf_spec,
                       "deterministic spec: trend|constant");
  unitroot->add_option("--max-lag", f.max_lag, "largest augmentation order");

  for (CLI::App* sub : {johansen, vecm, stability, tvvecm, pipeline})
    sub->add_option("--lags", f.lags, "lagged-difference depth k");
  for (CLI::App* sub : {johansen, vecm, pipeline})
    sub->add_option("--det", f.det, "deterministic term: intercept|none");
  for (CLI::App* sub : {vecm, tvvecm, pipeline})
    sub->add_option("--rank", f.rank, "fix the cointegrating rank");
  vecm->add_flag("--restricted", f.restricted,
                 "report loadings on beta'X instead of the level block");
  pipeline->add_flag("--restricted", f.restricted,
                     "report loadings on beta'X instead of the level block");
  for (CLI::App* sub : {vecm, pipeline})
    sub->add_option("--bandwidth", f.bandwidth,
                    "Newey-West bandwidth (0 = White)");
  for (CLI::App* sub : {stability, pipeline}) {
    sub->add_option("--trim", f.trim, "minimum segment share (0, 0.5)");
    sub->add_option("--null-rank", f.null_rank, "rank under the null");
    sub->add_option("--max-breaks", f.max_breaks, "1 or 2");
  }
  for (CLI::App* sub : {tvvecm, pipeline}) {
    sub->add_option("--lambda", f.lambda, "smoothness stiffness (> 0)");
    sub->add_option("--bootstrap", f.bootstrap,
                    "band replications (0 = off, else >= 100)");
    sub->add_flag("--full-paths", f.full_paths,
                  "dump the full coefficient paths as JSON");
    sub->add_flag("--tv-intercept", f.tv_intercept,
                  "let the intercept vary over time");
    sub->add_option("--accel-window", f.accel_window,
                    "odd moving-average window on delta_zeta (1 = raw)");
  }
  for (CLI::App* sub :
       {describe, unitroot, johansen, vecm, stability, tvvecm, pipeline})
    sub->add_flag("--log-input", f.log_input,
                  "natural-log the panel after ingestion");
  simulate->add_option("-T,--length", f.sim_T, "output length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a configuration error
  }

  CLI::App* sub = app.get_subcommands().front();
  return run_guarded([&] {
    std::map<std::string, std::string> kv;
    if (sub->count("--config") > 0) kv = tvecm::parse_config_file(f.config);

    if (sub == simulate) {
      put(sub, "--seed", kv, "sim.seed", std::to_string(f.seed));
      put(sub, "--length", kv, "sim.T", std::to_string(f.sim_T));
      put(sub, "--out", kv, "out", f.out);
      const tvecm::SimSpec spec = tvecm::sim_spec_from_map(kv);
      const std::string out_dir =
          kv.count("out") ? kv.at("out") : std::string(".");
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec)
        throw tvecm::IngestionError("cannot create output directory: " +
                                    out_dir);
      const tvecm::Panel p = tvecm::simulate_vecm(spec);
      const auto panel_path =
          (std::filesystem::path(out_dir) / "panel.csv").string();
      tvecm::write_panel_csv(p, panel_path);
      tvecm::write_text_file(
          (std::filesystem::path(out_dir) / "truth.json").string(),
          tvecm::sim_truth_report(spec).dump(2) + "\n");
      std::printf("%s\n", panel_path.c_str());
      return;
    }

    // analysis subcommands: config file first, then flag overrides
    put(sub, "--input", kv, "input", f.input);
    put(sub, "--out", kv, "out", f.out);
    put(sub, "--format", kv, "format", f.format);
    put(sub, "--threads", kv, "threads", std::to_string(f.threads));
    put(sub, "--seed", kv, "seed", std::to_string(f.seed));
    put(sub, "--log-input", kv, "log_input", f.log_input ? "true" : "false");
    put(sub, "--spec", kv, "adf.spec", f.adf_spec);
    put(sub, "--max-lag", kv, "adf.max_lag", std::to_string(f.max_lag));
    put(sub, "--lags", kv, "lags", std::to_string(f.lags));
    put(sub, "--det", kv, "det", f.det);
    put(sub, "--rank", kv, "rank", std::to_string(f.rank));
    put(sub, "--restricted", kv, "restricted",
        f.restricted ? "true" : "false");
    put(sub, "--bandwidth", kv, "bandwidth", std::to_string(f.bandwidth));
    put(sub, "--trim", kv, "qu.trim", format_double(f.trim));
    put(sub, "--null-rank", kv, "qu.null_rank", std::to_string(f.null_rank));
    put(sub, "--max-breaks", kv, "qu.max_breaks",
        std::to_string(f.max_breaks));
    put(sub, "--lambda", kv, "tv.lambda", format_double(f.lambda));
    put(sub, "--bootstrap", kv, "tv.bootstrap", std::to_string(f.bootstrap));
    put(sub, "--full-paths", kv, "tv.full_paths",
        f.full_paths ? "true" : "false");
    put(sub, "--tv-intercept", kv, "tv.intercept",
        f.tv_intercept ? "timevarying" : "constant");
    put(sub, "--accel-window", kv, "tv.accel_window",
        std::to_string(f.accel_window));

    const tvecm::PipelineConfig cfg = tvecm::config_from_map(kv);
    tvecm::PipelineOutcome outcome;
    if (sub == pipeline) {
      outcome = tvecm::run_pipeline(cfg);
    } else {
      outcome = tvecm::run_stages(cfg, {sub->get_name()}, false);
    }
    if (outcome.exit_code != 0) {
      std::fprintf(stderr, "error in stage '%s': %s\n",
                   outcome.failed_stage.c_str(), outcome.message.c_str());
      std::exit(outcome.exit_code);
    }
  });
}
