#pragma once

#include <stdexcept>
#include <string>

namespace carma {

// Exit-code contract used by the CLI: 2 config, 3 hypothesis, 4 numerical.

/// Malformed or inconsistent user input (config files, bad parameters).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A model fails one of the standing assumptions (causality, invertibility,
/// solvability of the characteristic function).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: singular solves, eigensolver failure, overflow.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace carma
