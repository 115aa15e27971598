#pragma once

#include <stdexcept>

namespace wolff {

// Bad configuration or violated operation precondition. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an operation. CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quadrature detected a divergent integral.
struct NonIntegrableError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace wolff
