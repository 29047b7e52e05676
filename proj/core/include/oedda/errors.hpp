#pragma once

#include <stdexcept>
#include <string>

namespace oedda {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs with inconsistent shapes or lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside its admissible domain (negative radius, infeasible
/// design, unknown observation location, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be factorized turned out to be singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced by a computation (model blow-up, divergent
/// analysis, objective evaluating to NaN).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration files or command-line values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oedda
