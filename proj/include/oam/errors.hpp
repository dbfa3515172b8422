// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace oam {

// A stated precondition of an operation was violated by the caller.
struct PreconditionViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A sampling grid is too coarse or too small for the requested field.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The weighted Fourier integral cannot be carried to the requested radius
// on the given grid; `safe_radius` is the largest supported one.
struct TruncationError : std::runtime_error {
  double safe_radius;
  TruncationError(const std::string& msg, double safe)
      : std::runtime_error(msg), safe_radius(safe) {}
};

// A construction would need more modes (or paths) than the fixed space allows.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace oam
