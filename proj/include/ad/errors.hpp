#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ad {

/// Operand lengths or shapes that do not fit together.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation that is only defined for a fixed dimension (curl needs R^3 -> R^3,
/// div needs a square Jacobian) was called outside it.
class DimensionError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

/// Misuse that cannot be expressed in the type system: a value escaping its
/// differentiation scope, overlapping sweeps, output lengths that change between
/// evaluations.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

[[noreturn]] inline void throwLengthMismatch(const char* what, std::size_t a, std::size_t b) {
  throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                   std::to_string(b) + ")");
}

inline void requireSameLength(const char* what, std::size_t a, std::size_t b) {
  if (a != b) throwLengthMismatch(what, a, b);
}

}  // namespace detail
}  // namespace ad
