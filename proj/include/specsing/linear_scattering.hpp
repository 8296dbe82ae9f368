#pragma once

// Closed-form scattering by a linear (gamma = 0) slab and the linear
// spectral singularities, i.e. the zeros of
//
//   L(n, K) = exp(-2 i n K) - ((n - 1)/(n + 1))^2.
//
// Mode branches. L vanishes on two families, exp(-i n K) = +R and
// exp(-i n K) = -R with R = (n-1)/(n+1). The perturbative formulas of
// perturbation.hpp are written for the +R family, so mode_index m >= 1
// labels that family only: K0 ~ (2 pi m - arg R)/eta0.

#include "specsing/nonlinear_bvp.hpp"
#include "specsing/slab_model.hpp"

namespace specsing {

// zeta0 and its derivative, the linear solution with outgoing terminal data.
FieldState zeta0(double x, cplx n, double K, cplx N_plus);

// G-(0) and G+(0), the boundary functions of zeta0:
//   G-(0) = N+ e^{iK} K (n^2-1) sin(nK) / n
//   G+(0) = i K N+ e^{i(n+1)K} (n+1)^2 / (2n) * L(n, K)
BoundaryFunctions G0_pm(cplx n, double K, cplx N_plus);

cplx L_function(cplx n, double K);

// (n-1)/(n+1)
cplx fresnel_ratio(cplx n);

struct ScatteringCoefficients {
  cplx R_left;
  cplx T_left;
  double abs_G_plus;
  // |G+| is within the near-singular band (|T| > 1e12): the coefficients are
  // finite but dominated by the divergence.
  bool overflow = false;
};

// R = -G-/G+, T = 2iK N+/G+. For kind None the closed forms are used,
// otherwise G+- come from nonlinear_bvp. Throws SingularityProximity when
// |G+| < 1e-300.
ScatteringCoefficients reflection_transmission(cplx n, double K, const NonlinearitySpec& nl,
                                               cplx N_plus, const ShootingConfig& cfg = {});

struct LinearSingularity {
  double eta0 = 0.0;
  double kappa0 = 0.0;
  double K0 = 0.0;
  int mode_index = 0;
  double residual = 0.0;  // |L(n0, K0)|
  int iterations = 0;

  cplx index() const noexcept { return {eta0, kappa0}; }
};

inline constexpr double kDefaultLinearTolerance = 1e-12;

// Damped 2-D Newton on (Re L, Im L) over (kappa, K). Throws
// InvalidParameter for eta0 <= 1 or m < 1 and ConvergenceError when |L|
// stays above tol after 100 iterations or the iterate leaves the branch.
LinearSingularity find_linear_singularity(double eta0, int mode_index,
                                          double tol = kDefaultLinearTolerance);

// Initial guess used by find_linear_singularity: K = 2 pi m / eta0 and the
// kappa that makes |exp(-i n K)| = |R| for real n.
LinearSingularity linear_seed(double eta0, int mode_index);

// g0 = (1/a) ln(1/|R|^2) with R = (n0-1)/(n0+1). At a root this equals
// -2 K0 kappa0 / a.
double threshold_gain_g0(double eta0, double kappa0, double K0, double thickness_a);

// Small-kappa0 form: g0 ~ (2/a) ln((eta0+1)/(eta0-1)).
double threshold_gain_g0_approx(double eta0, double thickness_a);

}  // namespace specsing
