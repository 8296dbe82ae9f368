#pragma once

// First-order perturbation theory in gamma around a linear spectral
// singularity (n0, K0) on the exp(-i n0 K0) = (n0-1)/(n0+1) branch.
//
// With zeta ~ zeta0 + gamma zeta1 the boundary function expands as
// G+ ~ G+(0)(n, K) + gamma G+(1)(n, K); moving the singularity to
// (n0 + gamma n1, K0 + gamma K1) keeps G+ = 0 to first order iff
//
//   dG+(0)/dn * n1 + dG+(0)/dK * K1 + G+(1) = 0.            (shift equation)
//
// This is one complex equation for three real unknowns; the closure is a
// ShiftConstraint.

#include "specsing/nonlinear_bvp.hpp"
#include "specsing/quadrature.hpp"
#include "specsing/slab_model.hpp"

namespace specsing {

// Formulas below are only valid at a linear singularity. Enforce checks
// |exp(-i n0 K0) - (n0-1)/(n0+1)| <= 1e-10 and throws InvalidRegime; Skip
// evaluates the formula as written (used for limit studies).
enum class RegimeCheck { Enforce, Skip };

inline constexpr double kRootResidualLimit = 1e-10;

// |exp(-i n0 K0) - (n0-1)/(n0+1)|
double branch_residual(cplx n0, double K0);

// sin(n K u) / (n K)
cplx green_kernel(double u, cplx n, double K);

// zeta1(x) = int_1^x G(x-y) f(|zeta0(y)|) zeta0(y) dy and its x-derivative.
FieldState zeta1(double x, cplx n0, double K0, cplx N_plus, const Nonlinearity& f,
                 const QuadratureOptions& opts = {});

// G+(1) for an arbitrary response, with c = (n0+1)/(2 n0) and
// h(x) = exp(i n0 K0 (x-1)) + exp(-i n0 K0 x):
//   G+(1) = -N+ e^{iK0} c^2 int_0^1 f(|N+ c h|) h^2 dx
cplx G1_plus_quadrature(cplx n0, double K0, cplx N_plus, const Nonlinearity& f,
                        RegimeCheck check = RegimeCheck::Enforce,
                        const QuadratureOptions& opts = {});

// Kerr closed form
//   G+(1) = 8i |N+|^2 N+ e^{iK0} (4 n0^2 - n0*^2 - 3) / (K0 (9 n0^4 + n0*^4 - 10 |n0|^4)).
// Throws SingularParameter when the denominator vanishes (real n0).
cplx G1_plus_kerr_closed(cplx n0, double K0, cplx N_plus,
                         RegimeCheck check = RegimeCheck::Enforce);

// Leading order in kappa0: 3 |N+|^2 N+ e^{iK0} (eta0^2 - 1) / (4 eta0^3 K0 kappa0).
cplx G1_plus_kerr_small_kappa(double eta0, double kappa0, double K0, cplx N_plus);

struct G0Derivatives {
  cplx dG_dn;
  cplx dG_dK;
};

// dG+(0)/dn = N+ e^{iK0} K0 [(n0^2-1) K0 - 2i] / n0
// dG+(0)/dK = N+ e^{iK0} K0 (n0^2-1)
G0Derivatives dG0_derivatives(cplx n0, double K0, cplx N_plus,
                              RegimeCheck check = RegimeCheck::Enforce);

// The same with n0 -> eta0.
G0Derivatives dG0_derivatives_small_kappa(double eta0, double K0, cplx N_plus);

enum class ShiftConstraint {
  FixK,         // K1 = 0: same wavelength as the linear mode
  FixEta,       // Re n1 = 0: same material index
  CustomRatio,  // Re n1 = ratio * K1
};

struct FirstOrderShift {
  cplx n1;
  double K1 = 0.0;
  ShiftConstraint constraint = ShiftConstraint::FixK;
  double residual = 0.0;  // |shift equation| at the solution

  double kappa1() const noexcept { return n1.imag(); }
};

// G+(1) for the given nonlinearity: zero for None, closed form for Kerr,
// quadrature for Custom.
cplx G1_plus(cplx n0, double K0, cplx N_plus, const NonlinearitySpec& nl);

FirstOrderShift solve_shift(cplx n0, double K0, cplx N_plus, const NonlinearitySpec& nl,
                            ShiftConstraint constraint = ShiftConstraint::FixK,
                            double ratio = 0.0);

struct ModifiedGain {
  GainReport report;
  // |gamma| max(|kappa1/kappa0|, |K1/K0|) <= 0.1
  bool within_first_order = true;
};

// g = g0 [1 + gamma (kappa1/kappa0 + K1/K0)], g0 = -2 K0 kappa0 / a.
ModifiedGain modified_gain(const FirstOrderShift& shift, cplx n0, double K0, double thickness_a,
                           double gamma);

// Kerr, K1 = 0, leading order in kappa0: g = g0 (1 + slope * sigma |N+|^2)
// with slope = 3 / (2 eta0^2 (eta0^2-1) ln^2((eta0+1)/(eta0-1))).
double kerr_gain_slope(double eta0);

struct KerrThreshold {
  double g0 = 0.0;            // small-kappa0 threshold, (2/a) ln((eta0+1)/(eta0-1))
  double g_finite_K = 0.0;    // keeps the 4 / ((eta0^2-1)^2 K0^2) term
  double g_asymptotic = 0.0;  // drops it: g0 (1 + slope sigma |N+|^2)
};

KerrThreshold kerr_threshold(double eta0, double K0, double sigma, double N_plus_mag,
                             double thickness_a);

struct EmissionReport {
  double half_intensity = 0.0;  // |N+|^2 / 2, W/cm^2
  double N_plus_mag2 = 0.0;
  double validity_gauge = 0.0;  // sigma |N+|^2
  bool below_threshold = false;
  bool reliable = true;  // validity_gauge <= 1e-3
};

inline constexpr double kValidityGaugeLimit = 1e-3;

// Inverse of kerr_threshold's asymptotic line:
//   |N+|^2 / 2 = (g - g0) / (2 slope sigma g0).
// g <= g0 yields a below-threshold report with zero intensity. Throws
// InvalidRegime for sigma <= 0.
EmissionReport emitted_intensity(double eta0, double g, double g0, double sigma);

// |N-/(N+ e^{iK}) - 1| from a direct integration.
double left_emission_check(cplx n, double K, double gamma, const Nonlinearity& f, cplx N_plus,
                           const ShootingConfig& cfg = {});

}  // namespace specsing
