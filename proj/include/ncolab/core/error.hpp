#pragma once

#include <stdexcept>
#include <string>

namespace ncolab {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not chain, vectors of the wrong length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf, divergence, singular systems, unconverged iterations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Rollout blow-up; step is the Euler step whose result was non-finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, int step) : NumericalError(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Inputs outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed files, missing fields, header mismatches.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (bad flag combinations, unknown presets).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncolab
