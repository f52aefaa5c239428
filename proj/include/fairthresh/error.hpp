#pragma once

#include <stdexcept>
#include <string>

namespace fairthresh {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration or model parameters (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (CLI exit code 4).
class DataError : public Error {
 public:
  using Error::Error;
};

// Weight estimation requested on an empty sample / label cell.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// The requested fit has no feasible solution (CLI exit code 3).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Test oracle invoked on a problem beyond its size guard.
class OracleTooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairthresh
