#pragma once

#include <stdexcept>
#include <string>

namespace fbmclt {

/// Input outside the domain where a quantity is defined (e.g. a divergent integral).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition on numerical resolution or call order was violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature failed to reach its tolerance within the evaluation budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double last_error)
      : std::runtime_error(what + " (last error estimate " + std::to_string(last_error) + ")"),
        last_error_(last_error) {}
  double last_error() const noexcept { return last_error_; }

 private:
  double last_error_;
};

/// The circulant embedding could not be made nonnegative.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// An identity or bound checked numerically did not hold.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input does not support the requested operation (e.g. no Fourier data).
class UnsupportedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fbmclt
