#pragma once
#include <json.hpp>
#include <string>

#include "tvecm/johansen.hpp"
#include "tvecm/panel.hpp"
#include "tvecm/qu.hpp"
#include "tvecm/simulate.hpp"
#include "tvecm/tv_vecm.hpp"
#include "tvecm/unitroot.hpp"
#include "tvecm/vecm.hpp"

namespace tvecm {

// Bumped whenever a report layout changes; stamped into every emitted file.
inline constexpr int kSchemaVersion = 1;

// One number -> text rule for every CSV cell: %.17g, so values survive a
// parse round trip and cross-format comparisons against the JSON reports are
// exact.  Serialized JSON numbers use the shortest round-tripping form.
std::string format_double(double x);

// sha-256 hex digests (manifest fingerprints)
std::string sha256_hex(const std::string& bytes);
std::string sha256_hex_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

struct UnitRootRow {
  std::string series;
  AdfGlsResult result;
};

// JSON report builders.  Every object carries schema_version.
nlohmann::json describe_report(const DescriptiveStats& s);
nlohmann::json unitroot_report(const std::vector<UnitRootRow>& rows);
nlohmann::json johansen_report(const JohansenResult& r, bool intercept,
                               int lag_k, int selected_rank, int rank_used);
nlohmann::json vecm_report(const VecmFit& fit, const HansenLcResult& lc);
nlohmann::json stability_report(const QuResult& r, const QuConfig& cfg);
nlohmann::json comovement_report(const ComovementPath& path,
                                 const TvVecmFit& fit,
                                 const ZetaBands* bands = nullptr);
nlohmann::json coefficient_paths_report(const TvVecmFit& fit);
nlohmann::json sim_truth_report(const SimSpec& spec);

// CSV renderings of the same numbers (headers documented in the README)
std::string describe_csv(const DescriptiveStats& s);
std::string unitroot_csv(const std::vector<UnitRootRow>& rows);
std::string johansen_csv(const JohansenResult& r);
std::string vecm_csv(const VecmFit& fit);
std::string stability_csv(const QuResult& r);
// header: date,zeta,delta_zeta[,band_lo,band_hi]; the first row's
// delta_zeta cell is empty (differences start at the second period)
std::string comovement_csv(const ComovementPath& path,
                           const ZetaBands* bands = nullptr);

}  // namespace tvecm
