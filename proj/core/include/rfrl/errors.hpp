#pragma once

#include <stdexcept>
#include <string>

namespace rfrl {

/// Index outside the state/action/step ranges of an environment.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Input outside the mathematical domain of an operation (non-unit z, NaN payoffs, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Violated precondition on arguments (shape mismatch, empty dataset, lambda <= 0).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear algebra failure, e.g. Cholesky breakdown after the jitter ladder is exhausted.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gradient descent diverged.
class OptimizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Brute-force oracle request larger than its enumeration budget.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace rfrl
