#pragma once

#include <stdexcept>
#include <string>

namespace gradcur {

// Base class for all library errors so callers can catch a single type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; the message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

// Input data violates a documented invariant (malformed scenario, bad file).
struct DataError : Error {
  using Error::Error;
};

// Dimension mismatch; the message names the offending block.
struct ShapeError : Error {
  using Error::Error;
};

// Caller violated an operation precondition.
struct PreconditionError : Error {
  using Error::Error;
};

// A required upstream artifact (dataset, score file, run result) is missing.
struct DependencyError : Error {
  using Error::Error;
};

// Statistic undefined for the given input (constant series, zero variance).
struct DegenerateError : Error {
  using Error::Error;
};

// Filesystem failure; the message names the path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace gradcur
