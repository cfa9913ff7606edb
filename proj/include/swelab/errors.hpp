#pragma once

#include <stdexcept>
#include <string>

namespace swelab {

/// Violated input contract (bad argument, invariant breach).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside the domain where the quantity is defined (e.g. a
/// non-integrable endpoint exponent).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Tail integral requested for an envelope that is not absolutely integrable.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series evaluation requested outside the regime where it is trusted.
class RegimeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Quadrature did not meet its tolerance; carries the best estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

  [[nodiscard]] double partial_value() const noexcept { return partial_value_; }
  [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_value_;
  double error_estimate_;
};

/// Covariance could not be factorized even after the allowed jitter escalation.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double smallest_failing_jitter)
      : std::runtime_error(what), smallest_failing_jitter_(smallest_failing_jitter) {}

  [[nodiscard]] double smallest_failing_jitter() const noexcept { return smallest_failing_jitter_; }

 private:
  double smallest_failing_jitter_;
};

}  // namespace swelab
