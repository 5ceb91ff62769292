#pragma once

#include <stdexcept>
#include <string>

namespace tricritic {

// Invalid configuration values (network specs, agent hyperparameters, transforms).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dimension mismatch between buffers, vectors or networks.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or infinite values where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An API was called in a state where the call is not allowed.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Arguments outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace tricritic
