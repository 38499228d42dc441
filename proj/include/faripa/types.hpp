#ifndef FARIPA_TYPES_HPP
#define FARIPA_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace faripa {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad PGM header, unparsable CSV, bad JSON config).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter value or unsupported parameter combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, diverging recursions, and similar numeric failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Degenerate data: zero-mass densities, rank-deficient covariances or
/// design matrices, all-zero block rows.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A kernel-regression query so far from every training point that all
/// weights underflow. Callers typically catch this and fall back.
class OutOfSupportError : public Error {
 public:
  using Error::Error;
};

/**
 * A length-T sequence of D-dimensional real samples. Row t of `values`
 * is the sample at time t. The universal carrier for sources, observations
 * and estimated innovations.
 */
struct TimeSeries {
  Eigen::MatrixXd values;  // T x D

  TimeSeries() = default;
  explicit TimeSeries(Eigen::MatrixXd v) : values(std::move(v)) {}

  long length() const { return values.rows(); }
  long dim() const { return values.cols(); }

  /// Throws NumericError if any entry is non-finite, ConfigError on empty shape.
  void validate() const {
    if (values.rows() < 1 || values.cols() < 1)
      throw ConfigError("TimeSeries requires T >= 1 and D >= 1");
    if (!values.allFinite())
      throw NumericError("TimeSeries contains non-finite entries");
  }
};

}  // namespace faripa

#endif  // FARIPA_TYPES_HPP
