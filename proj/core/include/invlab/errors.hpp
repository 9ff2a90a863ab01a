#pragma once

#include <stdexcept>
#include <string>

namespace invlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an expression cannot be parsed; carries 1-based position info.
struct ParseError : Error {
  ParseError(const std::string& what, int line_, int column_)
      : Error(what), line(line_), column(column_) {}
  int line;
  int column;
};

// Raised when evaluation leaves a function's domain (ln of a non-positive
// value, division by zero, fractional power of a negative base, ...).
struct DomainError : Error {
  using Error::Error;
};

// Raised on dimension mismatches between points, fields and configs.
struct DimensionError : Error {
  using Error::Error;
};

// Raised when a matrix that must be symmetric positive definite is not;
// `pivot` is the 0-based index of the first failing Cholesky pivot.
struct FactorizationError : Error {
  FactorizationError(const std::string& what, int pivot_)
      : Error(what), pivot(pivot_) {}
  int pivot;
};

// Raised when a documented precondition is violated (non-positive density,
// unsupported dimension, malformed config values, ...).
struct PreconditionError : Error {
  using Error::Error;
};

} // namespace invlab
