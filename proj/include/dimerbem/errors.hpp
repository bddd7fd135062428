#pragma once

#include <stdexcept>
#include <string>

namespace dimerbem {

// Error taxonomy mirrors the CLI exit codes: ConfigError -> 2,
// NumericalError (and derived) -> 3, ResourceError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct QuadratureError : NumericalError {
  using NumericalError::NumericalError;
};

struct IllConditionedError : NumericalError {
  using NumericalError::NumericalError;
};

struct ResourceError : Error {
  using Error::Error;
};

}  // namespace dimerbem
