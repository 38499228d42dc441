#ifndef FARIPA_CSV_HPP
#define FARIPA_CSV_HPP

#include <string>
#include <vector>

#include "faripa/types.hpp"

namespace faripa {

/// Writes a time series as CSV: header row with coordinate names
/// (default c1..cD), then one row per time step. Doubles use %.17g so
/// values round-trip exactly.
void write_series_csv(const std::string& path, const TimeSeries& ts,
                      const std::vector<std::string>& names = {});

/// Reads a CSV written by write_series_csv (header row expected).
TimeSeries read_series_csv(const std::string& path);

/// Plain numeric matrix, no header.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// %.17g formatting used by every CSV writer.
std::string format_double(double x);

}  // namespace faripa

#endif  // FARIPA_CSV_HPP
