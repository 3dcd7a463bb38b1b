#pragma once

#include <stdexcept>
#include <string>

namespace cad {

/// Malformed or inconsistent input data (bad CSV, missing column, value out of range).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or hyperparameters supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Corrupt, truncated or incompatible model bundle.
class BundleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Training failed numerically (e.g. non-finite loss).
class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cad
