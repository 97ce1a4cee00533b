#include "tvecm/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvecm {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string digest_to_hex(const unsigned char* d, unsigned len) {
  static const char* hex = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned i = 0; i < len; ++i) {
    out[2 * i] = hex[d[i] >> 4];
    out[2 * i + 1] = hex[d[i] & 0xF];
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json cv_json(const Eigen::MatrixXd& cv, int row) {
  // columns 10% / 5% / 1%; untabulated entries are NaN -> JSON null
  return json{{"10pct", cv(row, 0)}, {"5pct", cv(row, 1)},
              {"1pct", cv(row, 2)}};
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char d[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_Digest(bytes.data(), bytes.size(), d, &len, EVP_sha256(), nullptr);
  return digest_to_hex(d, len);
}

std::string sha256_hex_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open for hashing: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IngestionError("write failed: " + path);
}

json describe_report(const DescriptiveStats& s) {
  return json{{"schema_version", kSchemaVersion},
              {"series", s.names},
              {"mean", vector_json(s.mean)},
              {"sd", vector_json(s.sd)},
              {"min", vector_json(s.min)},
              {"max", vector_json(s.max)},
              {"n", s.n}};
}

json unitroot_report(const std::vector<UnitRootRow>& rows) {
  json results = json::array();
  for (const auto& row : rows)
    results.push_back(json{{"series", row.series},
                           {"statistic", row.result.statistic},
                           {"lag", row.result.lag},
                           {"phi_hat", row.result.phi_hat},
                           {"cv_1pct", row.result.cv_1pct},
                           {"reject_1pct", row.result.reject_1pct}});
  return json{{"schema_version", kSchemaVersion}, {"results", results}};
}

json johansen_report(const JohansenResult& r, bool intercept, int lag_k,
                     int selected_rank, int rank_used) {
  json tests = json::array();
  const int m = static_cast<int>(r.eigenvalues.size());
  for (int r0 = 0; r0 < m; ++r0)
    tests.push_back(json{{"null_rank", r0},
                         {"eigenvalue", r.eigenvalues(r0)},
                         {"maxeig", r.maxeig_stats(r0)},
                         {"maxeig_cv", cv_json(r.maxeig_cv, r0)},
                         {"trace", r.trace_stats(r0)},
                         {"trace_cv", cv_json(r.trace_cv, r0)}});
  return json{{"schema_version", kSchemaVersion},
              {"effective_T", r.effective_T},
              {"lag_k", lag_k},
              {"deterministic", intercept ? "intercept" : "none"},
              {"eigenvalues", vector_json(r.eigenvalues)},
              {"tests", tests},
              {"selected_rank", selected_rank},
              {"rank_used", rank_used},
              {"beta", matrix_json(r.beta_hat)},
              {"alpha", matrix_json(r.alpha_hat)}};
}

json vecm_report(const VecmFit& fit, const HansenLcResult& lc) {
  json equations = json::array();
  const int p = static_cast<int>(fit.coef.rows());
  for (int e = 0; e < static_cast<int>(fit.eqnames.size()); ++e) {
    json terms = json::array();
    for (int j = 0; j < p; ++j)
      terms.push_back(json{{"term", fit.colnames[j]},
                           {"coef", fit.coef(j, e)},
                           {"se", fit.se(j, e)}});
    equations.push_back(json{{"equation", fit.eqnames[e]},
                             {"terms", terms},
                             {"adj_r2", fit.adj_r2(e)}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"effective_T", fit.effective_T},
              {"lag_k", fit.lag_k},
              {"restricted", fit.restricted},
              {"nw_bandwidth", fit.nw_bandwidth},
              {"equations", equations},
              {"hansen_lc", json{{"lc", lc.lc}, {"n_params", lc.n_params}}}};
}

json stability_report(const QuResult& r, const QuConfig& cfg) {
  return json{{"schema_version", kSchemaVersion},
              {"effective_T", r.effective_T},
              {"null_rank", cfg.null_rank},
              {"trimming", cfg.trimming},
              {"max_breaks", cfg.max_breaks},
              {"sup_q1", r.sup_q1},
              {"sup_q2", r.sup_q2},
              {"wq", r.wq},
              {"sq", r.sq},
              {"cv_1pct", json{{"sup_q1", r.cv_sup_q1},
                               {"sup_q2", r.cv_sup_q2},
                               {"wq", r.cv_wq},
                               {"sq", r.cv_sq}}},
              {"breaks", json{{"q1", r.break_q1},
                              {"q2_first", r.break_q2_first},
                              {"q2_second", r.break_q2_second}}}};
}

json comovement_report(const ComovementPath& path, const TvVecmFit& fit,
                       const ZetaBands* bands) {
  json out{{"schema_version", kSchemaVersion},
           {"dates", path.dates},
           {"zeta", vector_json(path.zeta)},
           {"delta_zeta", vector_json(path.delta_zeta)},
           {"lambda", fit.lambda},
           {"lag_k", fit.lag_k},
           {"rank_r", fit.rank_r},
           {"effective_T", fit.effective_T}};
  if (bands != nullptr)
    out["bands"] = json{{"level_lo", bands->level_lo},
                        {"level_hi", bands->level_hi},
                        {"lo", vector_json(bands->lo)},
                        {"median", vector_json(bands->median)},
                        {"hi", vector_json(bands->hi)}};
  return out;
}

json coefficient_paths_report(const TvVecmFit& fit) {
  json gamma = json::array(), alpha = json::array();
  for (int t = 0; t < fit.effective_T; ++t) {
    gamma.push_back(matrix_json(fit.gamma_path[t]));
    alpha.push_back(matrix_json(fit.alpha_path[t]));
  }
  json out{{"schema_version", kSchemaVersion},
           {"dates", fit.dates},
           {"equations", fit.eqnames},
           {"lag_k", fit.lag_k},
           {"rank_r", fit.rank_r},
           {"lambda", fit.lambda},
           {"gamma_path", gamma},
           {"alpha_path", alpha}};
  if (fit.intercept.size() > 0)
    out["intercept"] = vector_json(fit.intercept);
  else
    out["intercept_path"] = matrix_json(fit.intercept_path);
  return out;
}

json sim_truth_report(const SimSpec& spec) {
  const char* kind = spec.alpha.kind == AlphaSchedule::Kind::constant
                         ? "constant"
                         : (spec.alpha.kind == AlphaSchedule::Kind::step
                                ? "step"
                                : "linear");
  json gamma = json::array();
  for (const auto& g : spec.gamma) gamma.push_back(matrix_json(g));
  json alpha{{"kind", kind}, {"first", matrix_json(spec.alpha.first)}};
  if (spec.alpha.kind != AlphaSchedule::Kind::constant) {
    alpha["second"] = matrix_json(spec.alpha.second);
    if (spec.alpha.kind == AlphaSchedule::Kind::step)
      alpha["step_at"] = spec.alpha.step_at;
  }
  const std::vector<double> zeta = true_zeta_path(spec);
  return json{{"schema_version", kSchemaVersion},
              {"m", spec.m},
              {"r", spec.r},
              {"T", spec.T},
              {"burn_in", spec.burn_in},
              {"seed", spec.seed},
              {"beta", matrix_json(spec.beta)},
              {"alpha", alpha},
              {"gamma", gamma},
              {"intercept", vector_json(spec.intercept)},
              {"noise_scale", vector_json(spec.noise_scale)},
              {"true_zeta", zeta}};
}

std::string describe_csv(const DescriptiveStats& s) {
  std::ostringstream out;
  out << "series,mean,sd,min,max,n\n";
  for (size_t i = 0; i < s.names.size(); ++i)
    out << s.names[i] << ',' << format_double(s.mean(i)) << ','
        << format_double(s.sd(i)) << ',' << format_double(s.min(i)) << ','
        << format_double(s.max(i)) << ',' << s.n << '\n';
  return out.str();
}

std::string unitroot_csv(const std::vector<UnitRootRow>& rows) {
  std::ostringstream out;
  out << "series,statistic,lag,phi_hat,cv_1pct,reject_1pct\n";
  for (const auto& row : rows)
    out << row.series << ',' << format_double(row.result.statistic) << ','
        << row.result.lag << ',' << format_double(row.result.phi_hat) << ','
        << format_double(row.result.cv_1pct) << ','
        << (row.result.reject_1pct ? "true" : "false") << '\n';
  return out.str();
}

std::string johansen_csv(const JohansenResult& r) {
  std::ostringstream out;
  out << "null_rank,eigenvalue,maxeig,maxeig_cv_10,maxeig_cv_5,maxeig_cv_1,"
         "trace,trace_cv_10,trace_cv_5,trace_cv_1\n";
  for (int r0 = 0; r0 < r.eigenvalues.size(); ++r0) {
    out << r0 << ',' << format_double(r.eigenvalues(r0)) << ','
        << format_double(r.maxeig_stats(r0));
    for (int c = 0; c < 3; ++c) out << ',' << format_double(r.maxeig_cv(r0, c));
    out << ',' << format_double(r.trace_stats(r0));
    for (int c = 0; c < 3; ++c) out << ',' << format_double(r.trace_cv(r0, c));
    out << '\n';
  }
  return out.str();
}

std::string vecm_csv(const VecmFit& fit) {
  std::ostringstream out;
  out << "equation,term,coef,se,adj_r2\n";
  for (int e = 0; e < static_cast<int>(fit.eqnames.size()); ++e)
    for (int j = 0; j < fit.coef.rows(); ++j)
      out << fit.eqnames[e] << ',' << fit.colnames[j] << ','
          << format_double(fit.coef(j, e)) << ','
          << format_double(fit.se(j, e)) << ','
          << format_double(fit.adj_r2(e)) << '\n';
  return out.str();
}

std::string stability_csv(const QuResult& r) {
  std::ostringstream out;
  out << "statistic,value,cv_1pct,break_1,break_2\n";
  out << "sup_q1," << format_double(r.sup_q1) << ','
      << format_double(r.cv_sup_q1) << ',' << r.break_q1 << ",\n";
  out << "sup_q2," << format_double(r.sup_q2) << ','
      << format_double(r.cv_sup_q2) << ',' << r.break_q2_first << ','
      << r.break_q2_second << '\n';
  out << "wq," << format_double(r.wq) << ',' << format_double(r.cv_wq)
      << ",,\n";
  out << "sq," << format_double(r.sq) << ',' << format_double(r.cv_sq)
      << ",,\n";
  return out.str();
}

std::string comovement_csv(const ComovementPath& path,
                           const ZetaBands* bands) {
  std::ostringstream out;
  out << "date,zeta,delta_zeta";
  if (bands != nullptr) out << ",band_lo,band_hi";
  out << '\n';
  for (int t = 0; t < path.zeta.size(); ++t) {
    out << path.dates[t] << ',' << format_double(path.zeta(t)) << ',';
    if (t > 0) out << format_double(path.delta_zeta(t - 1));
    if (bands != nullptr)
      out << ',' << format_double(bands->lo(t)) << ','
          << format_double(bands->hi(t));
    out << '\n';
  }
  return out.str();
}

}  // namespace tvecm
