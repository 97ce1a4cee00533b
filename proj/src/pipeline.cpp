#include "tvecm/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tvecm/johansen.hpp"
#include "tvecm/qu.hpp"
#include "tvecm/report.hpp"
#include "tvecm/tv_vecm.hpp"
#include "tvecm/vecm.hpp"

namespace tvecm {

namespace fs = std::filesystem;
using nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const std::uint64_t out = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: '" +
                      v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false: '" + v +
                    "'");
}

// rows separated by ';', entries by ','
MatrixXd parse_matrix(const std::string& key, const std::string& v) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(v);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> entries;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ','))
      entries.push_back(parse_double(key, trim(cell)));
    if (entries.empty())
      throw ConfigError("config key '" + key + "': empty matrix row");
    if (!rows.empty() && entries.size() != rows.front().size())
      throw ConfigError("config key '" + key + "': ragged matrix rows");
    rows.push_back(std::move(entries));
  }
  if (rows.empty())
    throw ConfigError("config key '" + key + "': empty matrix");
  MatrixXd out(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j) out(i, j) = rows[i][j];
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

PipelineConfig config_from_map(const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg;
  for (const auto& [key, val] : kv) {
    if (key.rfind("sim.", 0) == 0) continue;  // generator namespace
    if (key == "input") {
      cfg.input_path = val;
    } else if (key == "out") {
      cfg.out_dir = val;
    } else if (key == "format") {
      cfg.format = val;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(key, val));
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, val);
    } else if (key == "log_input") {
      cfg.log_input = parse_bool(key, val);
    } else if (key == "adf.spec") {
      if (val == "trend")
        cfg.adf.spec = Deterministic::trend;
      else if (val == "constant")
        cfg.adf.spec = Deterministic::constant;
      else
        throw ConfigError("config key 'adf.spec': expected trend|constant");
    } else if (key == "adf.max_lag") {
      cfg.adf.max_lag = static_cast<int>(parse_int(key, val));
    } else if (key == "adf.cv_1pct") {
      cfg.adf.cv_1pct = parse_double(key, val);
    } else if (key == "lags") {
      cfg.lag_k = static_cast<int>(parse_int(key, val));
    } else if (key == "det") {
      if (val == "intercept")
        cfg.intercept = true;
      else if (val == "none")
        cfg.intercept = false;
      else
        throw ConfigError("config key 'det': expected intercept|none");
    } else if (key == "rank") {
      cfg.rank_override = static_cast<int>(parse_int(key, val));
    } else if (key == "restricted") {
      cfg.vecm_restricted = parse_bool(key, val);
    } else if (key == "bandwidth") {
      cfg.nw_bandwidth = static_cast<int>(parse_int(key, val));
    } else if (key == "qu.trim") {
      cfg.qu_trimming = parse_double(key, val);
    } else if (key == "qu.max_breaks") {
      cfg.qu_max_breaks = static_cast<int>(parse_int(key, val));
    } else if (key == "qu.null_rank") {
      cfg.qu_null_rank = static_cast<int>(parse_int(key, val));
    } else if (key == "tv.lambda") {
      cfg.smoothness_lambda = parse_double(key, val);
    } else if (key == "tv.intercept") {
      if (val == "constant")
        cfg.tv_intercept = false;
      else if (val == "timevarying")
        cfg.tv_intercept = true;
      else
        throw ConfigError(
            "config key 'tv.intercept': expected constant|timevarying");
    } else if (key == "tv.bootstrap") {
      cfg.bootstrap = static_cast<int>(parse_int(key, val));
    } else if (key == "tv.full_paths") {
      cfg.full_paths = parse_bool(key, val);
    } else if (key == "tv.accel_window") {
      cfg.accel_window = static_cast<int>(parse_int(key, val));
    } else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }
  return cfg;
}

SimSpec sim_spec_from_map(const std::map<std::string, std::string>& kv) {
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  SimSpec s;
  s.m = 2;
  s.r = 1;
  s.T = 300;
  if (const auto* v = get("sim.m")) s.m = static_cast<int>(parse_int("sim.m", *v));
  if (const auto* v = get("sim.r")) s.r = static_cast<int>(parse_int("sim.r", *v));
  if (const auto* v = get("sim.T")) s.T = static_cast<int>(parse_int("sim.T", *v));
  if (const auto* v = get("sim.burn_in"))
    s.burn_in = static_cast<int>(parse_int("sim.burn_in", *v));
  s.seed = 1;
  if (const auto* v = get("seed")) s.seed = parse_u64("seed", *v);
  if (const auto* v = get("sim.seed")) s.seed = parse_u64("sim.seed", *v);

  const bool default_shape = (s.m == 2 && s.r == 1);
  if (const auto* v = get("sim.beta")) {
    s.beta = parse_matrix("sim.beta", *v);
  } else if (default_shape) {
    s.beta = (MatrixXd(2, 1) << 1.0, -1.0).finished();
  } else {
    throw ConfigError("sim.beta is required when sim.m/sim.r are set");
  }

  MatrixXd alpha1;
  if (const auto* v = get("sim.alpha")) {
    alpha1 = parse_matrix("sim.alpha", *v);
  } else if (default_shape) {
    alpha1 = (MatrixXd(2, 1) << -0.2, 0.2).finished();
  } else {
    throw ConfigError("sim.alpha is required when sim.m/sim.r are set");
  }
  std::string schedule = "constant";
  if (const auto* v = get("sim.schedule")) schedule = *v;
  if (schedule == "constant") {
    s.alpha = AlphaSchedule::constant(alpha1);
  } else {
    const auto* a2 = get("sim.alpha2");
    if (a2 == nullptr)
      throw ConfigError("sim.alpha2 is required for schedule '" + schedule +
                        "'");
    const MatrixXd alpha2 = parse_matrix("sim.alpha2", *a2);
    if (schedule == "step") {
      const auto* at = get("sim.break_at");
      if (at == nullptr)
        throw ConfigError("sim.break_at is required for the step schedule");
      s.alpha = AlphaSchedule::step(
          alpha1, alpha2, static_cast<int>(parse_int("sim.break_at", *at)));
    } else if (schedule == "linear") {
      s.alpha = AlphaSchedule::linear(alpha1, alpha2);
    } else {
      throw ConfigError(
          "config key 'sim.schedule': expected constant|step|linear");
    }
  }

  if (const auto* v = get("sim.gamma")) {
    std::stringstream ss(*v);
    std::string block;
    while (std::getline(ss, block, '|'))
      s.gamma.push_back(parse_matrix("sim.gamma", trim(block)));
  } else {
    s.gamma = {0.1 * MatrixXd::Identity(s.m, s.m)};
  }
  if (const auto* v = get("sim.intercept"))
    s.intercept = parse_matrix("sim.intercept", *v).reshaped();
  else
    s.intercept = VectorXd::Zero(s.m);
  if (const auto* v = get("sim.noise"))
    s.noise_scale = parse_matrix("sim.noise", *v).reshaped();
  else
    s.noise_scale = VectorXd::Constant(s.m, 1.0);

  try {
    validate_sim_spec(s);
  } catch (const Error& e) {
    throw ConfigError(std::string("simulation spec invalid: ") + e.what());
  }
  return s;
}

namespace {

struct Artifact {
  std::string file, sha;
};
struct StageRecord {
  std::string name;
  std::vector<Artifact> artifacts;
};

json settings_json(const PipelineConfig& cfg) {
  // everything that determines the outputs; no paths, no thread count
  json adf{{"spec",
            cfg.adf.spec == Deterministic::trend ? "trend" : "constant"},
           {"max_lag", cfg.adf.max_lag}};
  if (cfg.adf.cv_1pct) adf["cv_1pct"] = *cfg.adf.cv_1pct;
  json out{{"format", cfg.format},
           {"seed", cfg.seed},
           {"log_input", cfg.log_input},
           {"adf", adf},
           {"lags", cfg.lag_k},
           {"deterministic", cfg.intercept ? "intercept" : "none"},
           {"rank", cfg.rank_override ? json(*cfg.rank_override) : json()},
           {"restricted", cfg.vecm_restricted},
           {"bandwidth",
            cfg.nw_bandwidth ? json(*cfg.nw_bandwidth) : json()},
           {"qu", json{{"trim", cfg.qu_trimming},
                       {"max_breaks", cfg.qu_max_breaks},
                       {"null_rank", cfg.qu_null_rank
                                         ? json(*cfg.qu_null_rank)
                                         : json()}}},
           {"tv", json{{"lambda", cfg.smoothness_lambda},
                       {"intercept",
                        cfg.tv_intercept ? "timevarying" : "constant"},
                       {"bootstrap", cfg.bootstrap},
                       {"full_paths", cfg.full_paths},
                       {"accel_window", cfg.accel_window}}}};
  return out;
}

class Emitter {
 public:
  Emitter(const PipelineConfig& cfg) : cfg_(cfg) {
    want_json_ = cfg.format == "json" || cfg.format == "both";
    want_csv_ = cfg.format == "csv" || cfg.format == "both";
  }

  void begin(const std::string& stage) { records_.push_back({stage, {}}); }

  void add(const std::string& file, const std::string& content) {
    write_text_file((fs::path(cfg_.out_dir) / file).string(), content);
    records_.back().artifacts.push_back({file, sha256_hex(content)});
  }
  void add_json(const std::string& base, const json& j) {
    if (want_json_) add(base + ".json", j.dump(2) + "\n");
  }
  void add_csv(const std::string& base, const std::string& text) {
    if (want_csv_) add(base + ".csv", text);
  }

  const std::vector<StageRecord>& records() const { return records_; }
  std::string current_stage() const {
    return records_.empty() ? "config" : records_.back().name;
  }

 private:
  const PipelineConfig& cfg_;
  bool want_json_ = true, want_csv_ = false;
  std::vector<StageRecord> records_;
};

void write_manifest(const PipelineConfig& cfg, const Emitter& em,
                    const std::string& input_file,
                    const std::string& input_sha,
                    const PipelineOutcome& outcome) {
  json stages = json::array();
  for (const auto& rec : em.records()) {
    json arts = json::array();
    for (const auto& a : rec.artifacts)
      arts.push_back(json{{"file", a.file}, {"sha256", a.sha}});
    const bool failed = rec.name == outcome.failed_stage;
    stages.push_back(json{{"name", rec.name},
                          {"status", failed ? "failed" : "ok"},
                          {"artifacts", arts}});
  }
  json m{{"schema_version", kSchemaVersion},
         {"input", json{{"file", input_file}, {"sha256", input_sha}}},
         {"settings", settings_json(cfg)},
         {"status", outcome.exit_code == 0 ? "ok" : "failed"},
         {"stages", stages}};
  if (outcome.exit_code != 0)
    m["error"] = json{{"stage", outcome.failed_stage},
                      {"message", outcome.message}};
  write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(),
                  m.dump(2) + "\n");
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (cfg.input_path.empty()) throw ConfigError("no input file given");
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "both")
    throw ConfigError("format must be json|csv|both, got '" + cfg.format +
                      "'");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (cfg.lag_k < 1) throw ConfigError("lags must be >= 1");
  if (cfg.bootstrap != 0 && cfg.bootstrap < 100)
    throw ConfigError("tv.bootstrap must be 0 (off) or >= 100");
  if (cfg.accel_window < 1 || cfg.accel_window % 2 == 0)
    throw ConfigError("tv.accel_window must be odd and >= 1");
  if (!(cfg.smoothness_lambda > 0.0))
    throw ConfigError("tv.lambda must be positive");
}

}  // namespace

PipelineOutcome run_stages(const PipelineConfig& cfg,
                           const std::set<std::string>& emit_stages,
                           bool with_manifest) {
  PipelineOutcome outcome;
  Emitter em(cfg);
  const auto want = [&](const char* s) {
    return emit_stages.count(s) > 0;
  };
  std::string stage = "config";
  std::string input_file, input_sha;
  try {
    validate_pipeline_config(cfg);
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec)
      throw IngestionError("cannot create output directory: " + cfg.out_dir);

    stage = "ingest";
    input_file = fs::path(cfg.input_path).filename().string();
    input_sha = sha256_hex_file(cfg.input_path);
    Panel p = load_panel_csv(cfg.input_path);
    if (cfg.log_input) p = log_transform(p);
    const int m = p.m();

    if (want("describe")) {
      stage = "describe";
      em.begin(stage);
      const DescriptiveStats st = describe(p);
      em.add_json("describe", describe_report(st));
      em.add_csv("describe", describe_csv(st));
    }

    if (want("unitroot")) {
      stage = "unitroot";
      em.begin(stage);
      std::vector<UnitRootRow> rows;
      for (int i = 0; i < m; ++i)
        rows.push_back({p.names[i], adf_gls_test(p.values.col(i), cfg.adf)});
      const Panel d = first_difference(p);
      for (int i = 0; i < m; ++i)
        rows.push_back(
            {"d" + p.names[i], adf_gls_test(d.values.col(i), cfg.adf)});
      em.add_json("unitroot", unitroot_report(rows));
      em.add_csv("unitroot", unitroot_csv(rows));
    }

    // the cointegrating matrix and the default ranks downstream come from
    // the full-sample eigenstructure, so this runs (silently if not
    // requested) whenever a later stage needs it
    const bool need_johansen =
        want("johansen") || want("tvvecm") ||
        (want("vecm") && cfg.vecm_restricted) ||
        (want("stability") && !cfg.qu_null_rank.has_value());
    VecmSpec vspec;
    vspec.lag_k = cfg.lag_k;
    vspec.intercept = cfg.intercept;
    JohansenResult jr;
    int rank_used = -1;
    if (need_johansen) {
      stage = "johansen";
      if (want("johansen")) em.begin(stage);
      if (cfg.rank_override &&
          (*cfg.rank_override < 0 || *cfg.rank_override >= m))
        throw ConfigError("rank must lie in [0, m)");
      jr = johansen_rrr(p, vspec);
      int selected = m;
      for (int r0 = 0; r0 < m; ++r0)
        if (jr.trace_stats(r0) < jr.trace_cv(r0, 0)) {
          selected = r0;
          break;
        }
      rank_used =
          cfg.rank_override ? *cfg.rank_override : std::min(selected, m - 1);
      jr.beta_hat = beta_at(jr, rank_used);
      jr.alpha_hat = alpha_at(jr, rank_used);
      jr.rank_r = rank_used;
      if (want("johansen")) {
        em.add_json("johansen", johansen_report(jr, cfg.intercept, cfg.lag_k,
                                                selected, rank_used));
        em.add_csv("johansen", johansen_csv(jr));
      }
    }

    if (want("vecm")) {
      stage = "vecm";
      em.begin(stage);
      std::optional<MatrixXd> beta;
      if (cfg.vecm_restricted) {
        if (rank_used == 0)
          throw ConfigError(
              "restricted estimation needs cointegrating rank >= 1 "
              "(selected rank is 0)");
        beta = jr.beta_hat;
      }
      const VecmFit fit = estimate_vecm(p, vspec, beta, cfg.nw_bandwidth);
      const HansenLcResult lc = hansen_lc(fit);
      em.add_json("vecm", vecm_report(fit, lc));
      em.add_csv("vecm", vecm_csv(fit));
    }

    if (want("stability")) {
      stage = "stability";
      em.begin(stage);
      QuConfig qcfg;
      qcfg.trimming = cfg.qu_trimming;
      qcfg.max_breaks = cfg.qu_max_breaks;
      qcfg.null_rank = cfg.qu_null_rank.value_or(rank_used);
      qcfg.lag_k = cfg.lag_k;
      qcfg.intercept = cfg.intercept;
      const QuResult qres = qu_scan(p, qcfg, cfg.threads);
      em.add_json("stability", stability_report(qres, qcfg));
      em.add_csv("stability", stability_csv(qres));
    }

    if (want("tvvecm")) {
      stage = "tvvecm";
      em.begin(stage);
      TvVecmConfig tcfg;
      tcfg.lag_k = cfg.lag_k;
      tcfg.beta = jr.beta_hat;
      tcfg.smoothness_lambda = cfg.smoothness_lambda;
      tcfg.time_varying_intercept = cfg.tv_intercept;
      const TvVecmFit tfit = solve_smoothing(build_stacked_system(p, tcfg));
      ComovementPath path = comovement_degree(tfit);
      if (cfg.accel_window > 1)
        path.delta_zeta =
            centered_moving_average(path.delta_zeta, cfg.accel_window);
      ZetaBands bands;
      const bool have_bands = cfg.bootstrap > 0;
      if (have_bands)
        bands =
            bootstrap_bands(p, tcfg, cfg.bootstrap, cfg.seed, cfg.threads);
      em.add("comovement.csv",
             comovement_csv(path, have_bands ? &bands : nullptr));
      em.add_json("comovement", comovement_report(
                                    path, tfit, have_bands ? &bands : nullptr));
      if (cfg.full_paths)
        em.add("coefficient_paths.json",
               coefficient_paths_report(tfit).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    const bool config_class = dynamic_cast<const IngestionError*>(&e) ||
                              dynamic_cast<const ConfigError*>(&e);
    outcome.exit_code = config_class ? 2 : 1;
    outcome.failed_stage = stage;
    outcome.message = e.what();
  }
  if (with_manifest) {
    try {
      write_manifest(cfg, em, input_file, input_sha, outcome);
    } catch (const std::exception&) {
      // the outcome already reports the primary failure; a manifest write
      // failure (unwritable directory) must not mask it
      if (outcome.exit_code == 0) {
        outcome.exit_code = 2;
        outcome.failed_stage = "manifest";
        outcome.message = "cannot write manifest.json";
      }
    }
  }
  return outcome;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
  return run_stages(
      cfg,
      {"describe", "unitroot", "johansen", "vecm", "stability", "tvvecm"},
      true);
}

}  // namespace tvecm
