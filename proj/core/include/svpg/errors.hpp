#pragma once

#include <stdexcept>
#include <string>

namespace svpg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered in parameters, gradients, states or losses.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (rejected before any compute).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace svpg
