#pragma once

#include <stdexcept>
#include <string>

namespace opid {

/// Malformed input: bad dimensions, missing parameters, out-of-range options.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside [0, l].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature failed to reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// A theorem hypothesis or operation precondition does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator too close to singular to invert.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double min_eig)
      : std::runtime_error(what), min_eig_(min_eig) {}
  double min_eigenvalue() const { return min_eig_; }

 private:
  double min_eig_;
};

/// Cholesky breakdown: the matrix is not numerically positive definite.
class NotPositiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opid
