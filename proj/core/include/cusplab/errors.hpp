#pragma once

#include <stdexcept>
#include <string>

namespace cusplab {

/// Precondition or configuration violation (bad parameter, out-of-range input).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that is well posed on paper but degenerate in floating point.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace cusplab
