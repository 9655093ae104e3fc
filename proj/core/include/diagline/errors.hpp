#pragma once

#include <stdexcept>
#include <string>

namespace diagline {

// Invalid input: violated domain invariant or precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A work or memory budget would be exceeded. `required` is the estimate
// (evaluations or bytes) that the request would have needed.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : std::runtime_error(what), required_(required), budget_(budget) {}
  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  double required_;
  double budget_;
};

// Adaptive quadrature ran out of panels before reaching its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double re, double im, double bound)
      : std::runtime_error(what), re_(re), im_(im), bound_(bound) {}
  double estimate_real() const noexcept { return re_; }
  double estimate_imag() const noexcept { return im_; }
  double error_bound() const noexcept { return bound_; }

 private:
  double re_, im_, bound_;
};

// An identity that must hold by theory did not hold numerically or exactly.
// Indicates a bug, not bad input.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace diagline
