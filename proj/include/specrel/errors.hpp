#pragma once

#include <stdexcept>
#include <string>

namespace specrel {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user input or violated call contract. Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Quadrature grid too coarse for the requested operation.
struct ResolutionError : ConfigError {
  using ConfigError::ConfigError;
};

// Geometric construction impossible (cut-off support leaving the box, ...).
struct GeometryError : ConfigError {
  using ConfigError::ConfigError;
};

// Mode count beyond the configured budget.
struct CapacityError : ConfigError {
  using ConfigError::ConfigError;
};

// A spectral multiplier evaluated to a non-finite value on a retained mode.
struct SymbolError : ConfigError {
  using ConfigError::ConfigError;
};

// Runtime numerical failure: divergence, singular matrix, NaN blowup,
// quadrature non-convergence. Maps to CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace specrel
