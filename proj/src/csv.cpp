#include "faripa/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace faripa {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str())
    throw FormatError("unparsable number '" + s + "' in " + path);
  return v;
}

std::vector<std::vector<double>> read_rows(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    const auto cells = split_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("no data rows in " + path);
  return rows;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(static_cast<long>(rows.size()),
                    static_cast<long>(rows.front().size()));
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return m;
}

}  // namespace

void write_series_csv(const std::string& path, const TimeSeries& ts,
                      const std::vector<std::string>& names) {
  ts.validate();
  if (!names.empty() && static_cast<long>(names.size()) != ts.dim())
    throw ConfigError("write_series_csv: name count does not match dimension");
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  for (long j = 0; j < ts.dim(); ++j) {
    if (j) out << ',';
    if (names.empty())
      out << 'c' << (j + 1);
    else
      out << names[static_cast<size_t>(j)];
  }
  out << '\n';
  for (long i = 0; i < ts.length(); ++i) {
    for (long j = 0; j < ts.dim(); ++j) {
      if (j) out << ',';
      out << format_double(ts.values(i, j));
    }
    out << '\n';
  }
}

TimeSeries read_series_csv(const std::string& path) {
  return TimeSeries(to_matrix(read_rows(path, /*skip_header=*/true)));
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  return to_matrix(read_rows(path, /*skip_header=*/false));
}

}  // namespace faripa
