#pragma once

#include <stdexcept>
#include <string>

namespace specsing {

// Base class for every failure raised by the library. The CLI maps the
// concrete type onto an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range or inconsistent input (k <= 0, a <= 0, eta <= 1 where a
// dielectric is required, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A formula hit a pole or a division by zero (n = 0, n = -1, nK = 0, a
// vanishing denominator).
class SingularParameter : public Error {
 public:
  using Error::Error;
};

// A formula that is only valid at a linear spectral singularity was called
// away from one. Carries the measured residual of the root condition.
class InvalidRegime : public Error {
 public:
  InvalidRegime(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// An iterative solver (Newton, secant, adaptive quadrature) ran out of
// iterations. `residual` is the last achieved residual or error estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Non-finite field encountered while integrating across the slab.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double x) : Error(what), x_(x) {}
  double position() const noexcept { return x_; }

 private:
  double x_;
};

// |G+| fell below the division floor; the scattering coefficients are not
// representable.
class SingularityProximity : public Error {
 public:
  SingularityProximity(const std::string& what, double abs_g_plus)
      : Error(what), abs_g_plus_(abs_g_plus) {}
  double abs_g_plus() const noexcept { return abs_g_plus_; }

 private:
  double abs_g_plus_;
};

// A 2x2 linear system whose determinant is negligible against its scale.
class DegenerateSystem : public Error {
 public:
  using Error::Error;
};

// Requested gain does not exceed the linear threshold.
class BelowThreshold : public Error {
 public:
  BelowThreshold(const std::string& what, double g, double g0)
      : Error(what), g_(g), g0_(g0) {}
  double gain() const noexcept { return g_; }
  double threshold() const noexcept { return g0_; }

 private:
  double g_;
  double g0_;
};

}  // namespace specsing
