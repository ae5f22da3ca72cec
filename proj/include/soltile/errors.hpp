#pragma once

#include <stdexcept>
#include <string>

namespace soltile {

/// Argument outside the mathematical domain of an operation (e.g. beta <= 0).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// An exponential would leave the safe coordinate range.
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

/// Invalid construction parameters (sequence blocks, group parameters, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation requires the face-to-face regime (Delta or 1/Delta an integer >= 2).
struct NotFaceToFace : std::logic_error {
  using std::logic_error::logic_error;
};

/// A holonomy move needs digits the truncated transversal code does not carry.
struct PrecisionExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Problem exceeds the configured budget of an exact solver.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace soltile
