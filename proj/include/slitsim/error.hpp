#pragma once

#include <stdexcept>
#include <string>

namespace slitsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point lies on the charged screen (x = 0, |y| >= R) or the input is not finite.
struct DomainError : Error {
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
struct ToleranceError : Error {
  using Error::Error;
};

struct StepLimitError : Error {
  using Error::Error;
};

/// Inconsistent or invalid parameters (also raised by config parsing).
struct ConfigError : Error {
  using Error::Error;
};

struct SpecMismatchError : Error {
  using Error::Error;
};

struct EmptyHistogramError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace slitsim
