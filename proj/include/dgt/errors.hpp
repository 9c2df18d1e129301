#pragma once

#include <stdexcept>
#include <string>

namespace dgt {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid hyperparameter, flag combination, or estimator/task mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions that do not chain.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (CSV parse failures, degenerate targets).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite activations, losses or gradients.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The loss oracle failed or its query budget was exceeded.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace dgt
