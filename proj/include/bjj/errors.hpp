#pragma once

#include <stdexcept>
#include <string>

namespace bjj {

/// Argument outside the domain of an operation (bad index, angle, basis mismatch).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical result failed a consistency check or an iterative method did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration the model deliberately does not cover (odd q, odd N for cats, ...).
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent sampler or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bjj
