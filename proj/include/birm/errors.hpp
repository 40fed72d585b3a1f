#pragma once

#include <stdexcept>
#include <string>

namespace birm {

// Bad or inconsistent input data (missing files, malformed records,
// out-of-vocabulary words where the contract forbids them). CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during optimization (NaN/Inf in an update). Exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad command-line or config usage. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace birm
