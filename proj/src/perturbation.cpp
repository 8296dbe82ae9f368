#include "specsing/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "specsing/errors.hpp"
#include "specsing/linear_scattering.hpp"

namespace specsing {
namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kFirstOrderGuard = 0.1;

void enforce_regime(cplx n0, double K0, RegimeCheck check, const char* where) {
  if (check == RegimeCheck::Skip) return;
  const double r = branch_residual(n0, K0);
  if (!(r <= kRootResidualLimit)) {
    std::ostringstream msg;
    msg << where << ": (n0, K0) is not a linear spectral singularity, |L| = "
        << std::abs(L_function(n0, K0));
    throw InvalidRegime(msg.str(), std::abs(L_function(n0, K0)));
  }
}

double log_ratio(double eta0) { return std::log((eta0 + 1.0) / (eta0 - 1.0)); }

}  // namespace

double branch_residual(cplx n0, double K0) {
  return std::abs(std::exp(-I * n0 * K0) - fresnel_ratio(n0));
}

cplx green_kernel(double u, cplx n, double K) {
  const cplx nK = n * K;
  if (nK == cplx(0.0, 0.0)) throw SingularParameter("green_kernel: n K = 0");
  return std::sin(nK * u) / nK;
}

FieldState zeta1(double x, cplx n0, double K0, cplx N_plus, const Nonlinearity& f,
                 const QuadratureOptions& opts) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("zeta1: x must lie in [0,1]");
  const cplx nK = n0 * K0;
  if (nK == cplx(0.0, 0.0)) throw SingularParameter("zeta1: n K = 0");
  if (x == 1.0 || N_plus == cplx(0.0, 0.0)) return {x, cplx{}, cplx{}};

  auto source = [&](double y) {
    const cplx z = zeta0(y, n0, K0, N_plus).psi;
    return f(std::abs(z)) * z;
  };
  const QuadratureResult value = integrate_adaptive(
      [&](double y) { return std::sin(nK * (x - y)) / nK * source(y); }, 1.0, x, opts);
  const QuadratureResult slope = integrate_adaptive(
      [&](double y) { return std::cos(nK * (x - y)) * source(y); }, 1.0, x, opts);
  return {x, value.value, slope.value};
}

cplx G1_plus_quadrature(cplx n0, double K0, cplx N_plus, const Nonlinearity& f,
                        RegimeCheck check, const QuadratureOptions& opts) {
  enforce_regime(n0, K0, check, "G1_plus_quadrature");
  if (N_plus == cplx(0.0, 0.0)) return {};
  const cplx c = (n0 + 1.0) / (2.0 * n0);
  const cplx nK = n0 * K0;
  auto integrand = [&](double x) {
    const cplx h = std::exp(I * nK * (x - 1.0)) + std::exp(-I * nK * x);
    return f(std::abs(N_plus * c * h)) * h * h;
  };
  const QuadratureResult q = integrate_adaptive(integrand, 0.0, 1.0, opts);
  return -N_plus * std::exp(I * K0) * c * c * q.value;
}

cplx G1_plus_kerr_closed(cplx n0, double K0, cplx N_plus, RegimeCheck check) {
  enforce_regime(n0, K0, check, "G1_plus_kerr_closed");
  const cplx nc = std::conj(n0);
  const double mod2 = std::norm(n0);
  const cplx den = K0 * (9.0 * std::pow(n0, 4) + std::pow(nc, 4) - 10.0 * mod2 * mod2);
  if (std::abs(den) <= 1e-14 * 20.0 * mod2 * mod2 * std::abs(K0))
    throw SingularParameter("G1_plus_kerr_closed: vanishing denominator (real index?)");
  const cplx num = 8.0 * I * std::norm(N_plus) * N_plus * std::exp(I * K0) *
                   (4.0 * n0 * n0 - nc * nc - 3.0);
  return num / den;
}

cplx G1_plus_kerr_small_kappa(double eta0, double kappa0, double K0, cplx N_plus) {
  if (kappa0 == 0.0 || K0 == 0.0) throw SingularParameter("G1 small-kappa form: kappa0 K0 = 0");
  return 3.0 * std::norm(N_plus) * N_plus * std::exp(I * K0) * (eta0 * eta0 - 1.0) /
         (4.0 * eta0 * eta0 * eta0 * K0 * kappa0);
}

G0Derivatives dG0_derivatives(cplx n0, double K0, cplx N_plus, RegimeCheck check) {
  enforce_regime(n0, K0, check, "dG0_derivatives");
  if (n0 == cplx(0.0, 0.0)) throw SingularParameter("dG0_derivatives: n0 = 0");
  const cplx a = N_plus * std::exp(I * K0) * K0;
  return {a * ((n0 * n0 - 1.0) * K0 - 2.0 * I) / n0, a * (n0 * n0 - 1.0)};
}

G0Derivatives dG0_derivatives_small_kappa(double eta0, double K0, cplx N_plus) {
  const cplx a = N_plus * std::exp(I * K0) * K0;
  const double e2 = eta0 * eta0 - 1.0;
  return {a * (e2 * K0 - 2.0 * I) / eta0, a * e2};
}

cplx G1_plus(cplx n0, double K0, cplx N_plus, const NonlinearitySpec& nl) {
  switch (nl.kind()) {
    case NonlinearityKind::None:
      return {};
    case NonlinearityKind::Kerr:
      return G1_plus_kerr_closed(n0, K0, N_plus);
    case NonlinearityKind::Custom:
      return G1_plus_quadrature(n0, K0, N_plus, nl.function());
  }
  return {};
}

FirstOrderShift solve_shift(cplx n0, double K0, cplx N_plus, const NonlinearitySpec& nl,
                            ShiftConstraint constraint, double ratio) {
  const G0Derivatives d = dG0_derivatives(n0, K0, N_plus);
  const cplx g1 = G1_plus(n0, K0, N_plus, nl);

  FirstOrderShift shift;
  shift.constraint = constraint;
  if (constraint == ShiftConstraint::FixK) {
    if (std::abs(d.dG_dn) == 0.0) throw DegenerateSystem("solve_shift: dG/dn vanishes");
    shift.n1 = -g1 / d.dG_dn;
    shift.K1 = 0.0;
  } else {
    // Unknowns (kappa1, K1): i dG/dn kappa1 + (r dG/dn + dG/dK) K1 = -G1.
    const double r = constraint == ShiftConstraint::FixEta ? 0.0 : ratio;
    const cplx col_kappa = I * d.dG_dn;
    const cplx col_K = r * d.dG_dn + d.dG_dK;
    const double det = col_kappa.real() * col_K.imag() - col_K.real() * col_kappa.imag();
    const double scale = std::abs(col_kappa) * std::abs(col_K);
    if (!(std::abs(det) > 1e-14 * scale))
      throw DegenerateSystem("solve_shift: constraint leaves a singular 2x2 system");
    const double kappa1 = (-g1.real() * col_K.imag() + g1.imag() * col_K.real()) / det;
    const double K1 = (-col_kappa.real() * g1.imag() + col_kappa.imag() * g1.real()) / det;
    shift.n1 = cplx(r * K1, kappa1);
    shift.K1 = K1;
  }
  shift.residual = std::abs(d.dG_dn * shift.n1 + d.dG_dK * shift.K1 + g1);
  return shift;
}

ModifiedGain modified_gain(const FirstOrderShift& shift, cplx n0, double K0, double thickness_a,
                           double gamma) {
  const double kappa0 = n0.imag();
  if (kappa0 == 0.0 || K0 == 0.0) throw SingularParameter("modified_gain: kappa0 K0 = 0");
  const double g0 = gain_from_kappa(kappa0, K0, thickness_a);
  const double rk = shift.kappa1() / kappa0;
  const double rK = shift.K1 / K0;
  ModifiedGain out;
  out.report = make_gain_report(g0 * (1.0 + gamma * (rk + rK)), g0);
  out.within_first_order = std::abs(gamma) * std::max(std::abs(rk), std::abs(rK)) <= kFirstOrderGuard;
  return out;
}

double kerr_gain_slope(double eta0) {
  if (!(eta0 > 1.0)) throw InvalidParameter("kerr_gain_slope: eta0 must exceed 1");
  const double l = log_ratio(eta0);
  return 1.5 / (eta0 * eta0 * (eta0 * eta0 - 1.0) * l * l);
}

KerrThreshold kerr_threshold(double eta0, double K0, double sigma, double N_plus_mag,
                             double thickness_a) {
  if (!(K0 > 0.0)) throw InvalidParameter("kerr_threshold: K0 must be positive");
  KerrThreshold t;
  t.g0 = threshold_gain_g0_approx(eta0, thickness_a);
  const double e2 = eta0 * eta0 - 1.0;
  const double l = log_ratio(eta0);
  const double gamma = -K0 * K0 * sigma;
  const double n2 = N_plus_mag * N_plus_mag;
  t.g_finite_K =
      t.g0 * (1.0 - 1.5 * e2 * gamma * n2 / (eta0 * eta0 * (e2 * e2 * K0 * K0 + 4.0) * l * l));
  t.g_asymptotic = t.g0 * (1.0 + kerr_gain_slope(eta0) * sigma * n2);
  return t;
}

EmissionReport emitted_intensity(double eta0, double g, double g0, double sigma) {
  if (!(sigma > 0.0))
    throw InvalidRegime("emitted_intensity: only sigma > 0 supports emission above threshold", sigma);
  if (!(g0 > 0.0)) throw InvalidParameter("emitted_intensity: g0 must be positive");
  EmissionReport r;
  if (g <= g0) {
    r.below_threshold = true;
    return r;
  }
  r.N_plus_mag2 = (g - g0) / (kerr_gain_slope(eta0) * sigma * g0);
  r.half_intensity = 0.5 * r.N_plus_mag2;
  r.validity_gauge = sigma * r.N_plus_mag2;
  r.reliable = r.validity_gauge <= kValidityGaugeLimit;
  return r;
}

double left_emission_check(cplx n, double K, double gamma, const Nonlinearity& f, cplx N_plus,
                           const ShootingConfig& cfg) {
  if (N_plus == cplx(0.0, 0.0)) throw InvalidParameter("left_emission_check: N+ = 0");
  const BoundaryFunctions G = shoot_G(n, K, gamma, f, N_plus, cfg);
  const ScatteringAmplitudes amp = assemble_left_solution(G, K, N_plus);
  return std::abs(amp.N_minus / (N_plus * std::exp(I * K)) - 1.0);
}

}  // namespace specsing
