#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of complex-valued integrands on
// a finite interval. The interval is first split into equal panels; the
// panel with the largest error estimate is bisected until the summed
// estimate meets max(abs_tol, rel_tol * |integral|).

#include <complex>
#include <functional>

namespace specsing {

struct QuadratureOptions {
  int initial_panels = 64;
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_panels = 20000;
};

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  int panels = 0;
};

// Throws ConvergenceError (carrying the achieved estimate) when max_panels
// is reached first. b < a is allowed and flips the sign.
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, const QuadratureOptions& opts = {});

}  // namespace specsing
