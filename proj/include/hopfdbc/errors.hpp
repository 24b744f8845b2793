#pragma once

#include <stdexcept>
#include <string>

namespace hopfdbc {

/// Base class for failures of an iterative or numerical procedure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration exhausted its budget without meeting its tolerance.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : NumericalError(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A linear system is numerically singular (fold, symmetry degeneracy).
class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A square root symbol was evaluated on its branch cut (-inf, 0].
class BranchCutError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No Hopf point exists for the requested parameters.
class HopfAbsent : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Time integration left the admissible range.
class Divergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A time series carries no oscillation.
class SteadyState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A truncated spectral problem did not resolve under refinement.
class UnresolvedTruncation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hopfdbc
