#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hypoco {

/// A mathematical precondition of a formula does not hold (degenerate observable,
/// rate above the admissible range, empty region, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller misuse: bad sizes, empty inputs, parameters outside their documented range.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value cannot be honoured (truncation too small, unknown kind, ...).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A discretization failed one of its structural contracts at construction.
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear or eigen solve did not produce an acceptable answer.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced by a stochastic integrator; carries the offending state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::vector<double> state)
      : std::runtime_error(what), state_(std::move(state)) {}

  const std::vector<double>& state() const noexcept { return state_; }

 private:
  std::vector<double> state_;
};

}  // namespace hypoco
