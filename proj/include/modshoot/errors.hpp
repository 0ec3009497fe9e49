#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace modshoot {

/// Raised when caller-supplied dimensions or preconditions are violated.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed problem definitions, configs and unknown names.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model evaluation produced a non-finite value. The offending point is kept
/// so callers can report or reproduce it.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point = {})
      : std::runtime_error(what), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

}  // namespace modshoot
