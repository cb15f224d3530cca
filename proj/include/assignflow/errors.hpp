#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace assignflow {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (vector lengths, matrix sizes, patch supports).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation, e.g. a zero
/// probability where the open simplex is required, or a geodesic leaving it.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its iteration cap. Carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last)
      : Error(what), last_iterate_(std::move(last)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

/// Malformed file content (images, prior sets, masks).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace assignflow
