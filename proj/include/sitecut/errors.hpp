#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sitecut {

/// A precondition of an operation was violated by the caller.
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An exact computation would exceed the configured enumeration cap.
class SizeError : public std::length_error {
public:
  using std::length_error::length_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) {
    throw ContractError(message);
  }
}

inline void require_probability(double p, const char* name = "p") {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ContractError(std::string(name) + " must lie in [0,1]");
  }
}

} // namespace sitecut
