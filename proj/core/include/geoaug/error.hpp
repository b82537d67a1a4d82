#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoaug {

// Precondition violated by the caller (bad shape, out-of-range parameter, empty input).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf produced inside a solver, or an iteration that did not converge where
// convergence is required.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public NumericalFailure {
 public:
  ConvergenceFailure(const std::string& what, std::size_t iterations, double violation)
      : NumericalFailure(what), iterations_(iterations), violation_(violation) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double violation() const noexcept { return violation_; }

 private:
  std::size_t iterations_;
  double violation_;
};

// Malformed input file. row() is the 1-based physical line number, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(row ? "line " + std::to_string(row) + ": " + what : what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace geoaug
