#pragma once

#include <stdexcept>
#include <string>

namespace coltree {

// Error taxonomy used across the library. The C API and the CLI map these
// onto status/exit codes, so new failure modes should reuse one of them.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter outside the mathematical domain of an operation (e.g. a moment
// order below the integrability threshold).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine hit its cap without meeting its tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bisection endpoints do not straddle the target.
struct NoCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coltree
