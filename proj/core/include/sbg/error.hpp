#pragma once

#include <stdexcept>
#include <string>

namespace sbg {

/// An observation that has zero likelihood under every class the prior supports.
class ContradictionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Value iteration hit its sweep budget before the residual fell below tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(double residual, int sweeps);

  double residual() const noexcept { return residual_; }
  int sweeps() const noexcept { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

/// A policy was asked for an action at a node it does not cover.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sbg
