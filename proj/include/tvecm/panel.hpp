#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tvecm/errors.hpp"

namespace tvecm {

// Dated observation panel: T rows by m named series, dense (no gaps).
// Dates are opaque ordered labels; ordering is numeric when every label
// parses as an integer, lexicographic otherwise (ISO dates sort correctly).
struct Panel {
  std::vector<std::string> dates;       // size T, strictly increasing
  std::vector<std::string> names;       // size m, unique, nonempty
  Eigen::MatrixXd values;               // T x m, all finite
  std::vector<std::string> transforms;  // applied transform tags ("log", "diff")

  int T() const { return static_cast<int>(values.rows()); }
  int m() const { return static_cast<int>(values.cols()); }
  void validate() const;  // throws on any broken invariant
};

// true if a should sort before b under the panel date ordering
bool date_less(const std::string& a, const std::string& b);

struct CsvSchema {
  std::string date_column;          // empty -> first column in the file
  std::vector<std::string> series;  // empty -> every non-date column
};

// Reads a headered CSV, sorts rows by date, validates.  Throws
// IngestionError naming the offending row/column on any malformed cell,
// duplicate date, or missing schema column.
Panel load_panel_csv(const std::string& path, const CsvSchema& schema = {});

// date column header "date"; numbers written with 17 significant digits
void write_panel_csv(const Panel& p, const std::string& path);

// elementwise natural log; throws DomainError naming series and date on
// any value <= 0
Panel log_transform(const Panel& p);

// row-difference; T-1 rows, each dated with the later label
Panel first_difference(const Panel& p);

struct DescriptiveStats {
  std::vector<std::string> names;
  Eigen::VectorXd mean, sd, min, max;  // sd: sample divisor T-1
  int n = 0;                           // observation count
};

DescriptiveStats describe(const Panel& p);  // requires T >= 2

}  // namespace tvecm
