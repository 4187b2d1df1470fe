#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace syncstab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent parameters / configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The model has no equilibrium (or the requested construction is not
/// defined) for the given parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
/// Carries the offending Lambda value when the domain is the field-current
/// interval.
class DomainError : public Error {
 public:
  using Error::Error;
  DomainError(const std::string& msg, double lambda_value)
      : Error(msg), lambda(lambda_value) {}

  std::optional<double> lambda;
};

/// A numerical routine failed to converge or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace syncstab
