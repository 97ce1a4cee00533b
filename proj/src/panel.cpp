#include "tvecm/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace tvecm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

// locale-independent double parse; rejects partial parses
bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

}  // namespace

bool date_less(const std::string& a, const std::string& b) {
  long long ia, ib;
  if (parse_int(a, ia) && parse_int(b, ib)) return ia < ib;
  return a < b;
}

void Panel::validate() const {
  if (values.rows() < 1) throw SizeError("panel: need at least one row");
  if (values.cols() < 1) throw SizeError("panel: need at least one series");
  if (static_cast<int>(dates.size()) != T())
    throw SizeError("panel: date labels (" + std::to_string(dates.size()) +
                    ") do not match row count (" + std::to_string(T()) + ")");
  if (static_cast<int>(names.size()) != m())
    throw SizeError("panel: series names (" + std::to_string(names.size()) +
                    ") do not match column count (" + std::to_string(m()) + ")");
  std::set<std::string> uniq;
  for (const auto& n : names) {
    if (n.empty()) throw IngestionError("panel: empty series name");
    if (!uniq.insert(n).second)
      throw IngestionError("panel: duplicate series name '" + n + "'");
  }
  for (int t = 1; t < T(); ++t)
    if (!date_less(dates[t - 1], dates[t]))
      throw IngestionError("panel: dates not strictly increasing at '" +
                           dates[t] + "'");
  for (int t = 0; t < T(); ++t)
    for (int j = 0; j < m(); ++j)
      if (!std::isfinite(values(t, j)))
        throw IngestionError("panel: non-finite value in series '" + names[j] +
                             "' at date '" + dates[t] + "'");
}

Panel load_panel_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open input file '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw IngestionError("'" + path + "': empty file");
  // strip UTF-8 BOM if present
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line = line.substr(3);
  const std::vector<std::string> header = split_csv_line(line);

  // resolve date column
  int date_col = 0;
  if (!schema.date_column.empty()) {
    auto it = std::find(header.begin(), header.end(), schema.date_column);
    if (it == header.end())
      throw IngestionError("'" + path + "': date column '" +
                           schema.date_column + "' not in header");
    date_col = static_cast<int>(it - header.begin());
  }

  // resolve value columns
  std::vector<int> cols;
  std::vector<std::string> names;
  if (schema.series.empty()) {
    for (int j = 0; j < static_cast<int>(header.size()); ++j)
      if (j != date_col) {
        cols.push_back(j);
        names.push_back(header[j]);
      }
  } else {
    for (const auto& want : schema.series) {
      auto it = std::find(header.begin(), header.end(), want);
      if (it == header.end())
        throw IngestionError("'" + path + "': series column '" + want +
                             "' not in header");
      cols.push_back(static_cast<int>(it - header.begin()));
      names.push_back(want);
    }
  }
  if (cols.empty())
    throw IngestionError("'" + path + "': no series columns in header");

  struct Row {
    std::string date;
    std::vector<double> v;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;  // tolerate trailing blank lines
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw IngestionError("'" + path + "' line " + std::to_string(lineno) +
                           ": expected " + std::to_string(header.size()) +
                           " cells, found " + std::to_string(cells.size()));
    Row r;
    r.date = cells[date_col];
    if (r.date.empty())
      throw IngestionError("'" + path + "' line " + std::to_string(lineno) +
                           ": empty date cell");
    for (size_t k = 0; k < cols.size(); ++k) {
      const std::string& cell = cells[cols[k]];
      if (cell.empty())
        throw IngestionError("'" + path + "' line " + std::to_string(lineno) +
                             ": missing value in column '" + names[k] + "'");
      double x;
      if (!parse_double(cell, x) || !std::isfinite(x))
        throw IngestionError("'" + path + "' line " + std::to_string(lineno) +
                             ": non-numeric value '" + cell + "' in column '" +
                             names[k] + "'");
      r.v.push_back(x);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty())
    throw IngestionError("'" + path + "': no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return date_less(a.date, b.date); });
  for (size_t t = 1; t < rows.size(); ++t)
    if (!date_less(rows[t - 1].date, rows[t].date))
      throw IngestionError("'" + path + "': duplicate date '" + rows[t].date +
                           "'");

  Panel p;
  p.names = names;
  p.dates.reserve(rows.size());
  p.values.resize(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t t = 0; t < rows.size(); ++t) {
    p.dates.push_back(rows[t].date);
    for (size_t k = 0; k < cols.size(); ++k)
      p.values(static_cast<int>(t), static_cast<int>(k)) = rows[t].v[k];
  }
  p.validate();
  return p;
}

void write_panel_csv(const Panel& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open output file '" + path + "'");
  out << "date";
  for (const auto& n : p.names) out << "," << n;
  out << "\n";
  char buf[64];
  for (int t = 0; t < p.T(); ++t) {
    out << p.dates[t];
    for (int j = 0; j < p.m(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p.values(t, j));
      out << "," << buf;
    }
    out << "\n";
  }
}

Panel log_transform(const Panel& p) {
  p.validate();
  Panel q = p;
  for (int t = 0; t < p.T(); ++t)
    for (int j = 0; j < p.m(); ++j) {
      if (p.values(t, j) <= 0.0)
        throw DomainError("log transform: non-positive value in series '" +
                          p.names[j] + "' at date '" + p.dates[t] + "'");
      q.values(t, j) = std::log(p.values(t, j));
    }
  q.transforms.push_back("log");
  return q;
}

Panel first_difference(const Panel& p) {
  p.validate();
  if (p.T() < 2) throw SizeError("first difference: need at least 2 rows");
  Panel q;
  q.names = p.names;
  q.transforms = p.transforms;
  q.transforms.push_back("diff");
  q.dates.assign(p.dates.begin() + 1, p.dates.end());
  q.values = p.values.bottomRows(p.T() - 1) - p.values.topRows(p.T() - 1);
  return q;
}

DescriptiveStats describe(const Panel& p) {
  p.validate();
  if (p.T() < 2) throw SizeError("describe: need at least 2 rows");
  const int T = p.T(), m = p.m();
  DescriptiveStats s;
  s.names = p.names;
  s.n = T;
  s.mean = p.values.colwise().mean();
  s.min = p.values.colwise().minCoeff();
  s.max = p.values.colwise().maxCoeff();
  s.sd.resize(m);
  for (int j = 0; j < m; ++j) {
    const double ss = (p.values.col(j).array() - s.mean(j)).square().sum();
    s.sd(j) = std::sqrt(ss / (T - 1));
  }
  return s;
}

}  // namespace tvecm
