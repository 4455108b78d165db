#pragma once

#include <stdexcept>
#include <string>

namespace polisim {

// Precondition or invariant violation on caller-supplied data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Language-model transport failure (unreachable endpoint, timeout, bad reply).
class DriverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Driver output that yields no usable opinion line.
class ParseFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polisim
