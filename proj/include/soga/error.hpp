#pragma once

#include <stdexcept>
#include <string>

namespace soga {

// Bad configuration or CLI usage. Mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, graphs, checkpoints). Exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor/graph dimensions. A flavor of data error.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite values where finite ones are required (NaN loss etc.). Exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace soga
