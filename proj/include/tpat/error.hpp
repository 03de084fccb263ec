#pragma once

#include <stdexcept>
#include <string>

namespace tpat {

/// Bad input: malformed files, inconsistent dimensions, coefficients out of bounds.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical solver failed to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tpat
