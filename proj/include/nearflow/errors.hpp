#pragma once

#include <stdexcept>
#include <string>

namespace nearflow {

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An inverse was requested for an element that has none. `what()` names the
/// offending coordinate or sub-expression.
struct NotInvertible : Error {
  using Error::Error;
};

/// Time arguments or parameters outside the admissible range.
struct DomainError : Error {
  using Error::Error;
};

/// Operands of incompatible dimensions.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// Parameter tuples violating their invariants.
struct InvalidParams : Error {
  using Error::Error;
};

/// Malformed simulation configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// A coefficient denominator c(r, u) vanished. Unreachable for validated
/// parameters with r > 0; reachable at r = 0 when tau = chi = 0.
struct DegenerateDenominator : Error {
  using Error::Error;
};

/// Malformed textual input (rational strings, JSON payloads).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace nearflow
