#pragma once

#include <stdexcept>
#include <string>

namespace specshare {

// Bad argument to an operation (out-of-range index, empty input, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scenario / sweep / file configuration problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric failures: node never transmits, infinite age, diverged training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace specshare
