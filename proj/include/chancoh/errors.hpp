#pragma once

#include <stdexcept>
#include <string>

namespace chancoh {

/// Input or invariant violation (malformed matrices, bad dimensions,
/// documents that fail Channel validation, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical solver did not converge within its iteration budget.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chancoh
