#include "specsing/linear_scattering.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "specsing/errors.hpp"

namespace specsing {
namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kGPlusFloor = 1e-300;
constexpr double kOverflowT = 1e12;
constexpr int kMaxNewton = 100;

void require_nonzero_index(cplx n, const char* where) {
  if (n == cplx(0.0, 0.0))
    throw SingularParameter(std::string(where) + ": refractive index n = 0");
}

// dL/dn and dL/dK (L is analytic in n).
struct LGradient {
  cplx dn;
  cplx dK;
};

LGradient L_gradient(cplx n, double K) {
  const cplx e = std::exp(-2.0 * I * n * K);
  const cplx R = fresnel_ratio(n);
  const cplx dR = 2.0 / ((n + 1.0) * (n + 1.0));
  return {-2.0 * I * K * e - 2.0 * R * dR, -2.0 * I * n * e};
}

}  // namespace

FieldState zeta0(double x, cplx n, double K, cplx N_plus) {
  require_nonzero_index(n, "zeta0");
  if (!(K > 0.0)) throw InvalidParameter("zeta0: K must be positive");
  const cplx pref = N_plus * std::exp(I * K) / (2.0 * n);
  const cplx up = std::exp(I * n * K * (x - 1.0));
  const cplx down = std::exp(-I * n * K * (x - 1.0));
  const cplx ink = I * n * K;
  return {x, pref * ((n + 1.0) * up + (n - 1.0) * down),
          pref * ink * ((n + 1.0) * up - (n - 1.0) * down)};
}

BoundaryFunctions G0_pm(cplx n, double K, cplx N_plus) {
  require_nonzero_index(n, "G0_pm");
  if (!(K > 0.0)) throw InvalidParameter("G0_pm: K must be positive");
  const cplx eiK = std::exp(I * K);
  const cplx g_minus = N_plus * eiK * K * (n * n - 1.0) * std::sin(n * K) / n;
  // (n+1)^2 e^{inK} L written out so that n = -1 stays finite.
  const cplx bracket = (n + 1.0) * (n + 1.0) * std::exp(-I * n * K) -
                       (n - 1.0) * (n - 1.0) * std::exp(I * n * K);
  const cplx g_plus = I * K * N_plus * eiK / (2.0 * n) * bracket;
  return {g_plus, g_minus};
}

cplx fresnel_ratio(cplx n) {
  if (n == cplx(-1.0, 0.0)) throw SingularParameter("fresnel ratio: pole at n = -1");
  return (n - 1.0) / (n + 1.0);
}

cplx L_function(cplx n, double K) {
  if (n == cplx(-1.0, 0.0)) throw SingularParameter("L(n,K): pole at n = -1");
  const cplx R = fresnel_ratio(n);
  return std::exp(-2.0 * I * n * K) - R * R;
}

ScatteringCoefficients reflection_transmission(cplx n, double K, const NonlinearitySpec& nl,
                                               cplx N_plus, const ShootingConfig& cfg) {
  if (!(K > 0.0)) throw InvalidParameter("reflection_transmission: K must be positive");
  const BoundaryFunctions G =
      nl.kind() == NonlinearityKind::None
          ? G0_pm(n, K, N_plus)
          : shoot_G(n, K, nl.gamma(K), nl.function(), N_plus, cfg);

  const double abs_gp = std::abs(G.G_plus);
  if (abs_gp < kGPlusFloor) {
    std::ostringstream msg;
    msg << "reflection_transmission: |G+| = " << abs_gp << " is at a spectral singularity";
    throw SingularityProximity(msg.str(), abs_gp);
  }
  ScatteringCoefficients out;
  out.R_left = -G.G_minus / G.G_plus;
  out.T_left = 2.0 * I * K * N_plus / G.G_plus;
  out.abs_G_plus = abs_gp;
  out.overflow = std::abs(out.T_left) > kOverflowT || !std::isfinite(std::abs(out.R_left));
  return out;
}

LinearSingularity linear_seed(double eta0, int mode_index) {
  if (!(eta0 > 1.0)) throw InvalidParameter("linear singularity: eta0 must exceed 1");
  if (mode_index < 1) throw InvalidParameter("linear singularity: mode_index must be >= 1");
  LinearSingularity seed;
  seed.eta0 = eta0;
  seed.mode_index = mode_index;
  seed.K0 = 2.0 * std::numbers::pi * mode_index / eta0;
  seed.kappa0 = std::log((eta0 - 1.0) / (eta0 + 1.0)) / seed.K0;
  seed.residual = std::abs(L_function(seed.index(), seed.K0));
  return seed;
}

LinearSingularity find_linear_singularity(double eta0, int mode_index, double tol) {
  LinearSingularity s = linear_seed(eta0, mode_index);
  if (!(tol > 0.0)) throw InvalidParameter("linear singularity: tol must be positive");

  double kappa = s.kappa0;
  double K = s.K0;
  double res = s.residual;
  int it = 0;
  for (; it < kMaxNewton && res > tol; ++it) {
    const cplx n(eta0, kappa);
    const cplx Lv = L_function(n, K);
    const LGradient grad = L_gradient(n, K);
    // d/dkappa = i d/dn.
    const cplx dkappa = I * grad.dn;
    const double j11 = dkappa.real(), j12 = grad.dK.real();
    const double j21 = dkappa.imag(), j22 = grad.dK.imag();
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    double step_kappa = (-Lv.real() * j22 + Lv.imag() * j12) / det;
    double step_K = (-j11 * Lv.imag() + j21 * Lv.real()) / det;

    // Halve until |L| decreases.
    double trial = res;
    for (int halvings = 0; halvings < 30; ++halvings) {
      const double K_new = K + step_K;
      if (K_new > 0.0) {
        trial = std::abs(L_function(cplx(eta0, kappa + step_kappa), K_new));
        if (trial < res) break;
      }
      step_kappa *= 0.5;
      step_K *= 0.5;
    }
    if (!(trial < res)) break;
    kappa += step_kappa;
    K += step_K;
    res = trial;
  }

  s.kappa0 = kappa;
  s.K0 = K;
  s.residual = res;
  s.iterations = it;

  if (!(res <= tol)) {
    std::ostringstream msg;
    msg << "linear singularity (eta0=" << eta0 << ", m=" << mode_index
        << ") did not converge: |L| = " << res << " at kappa=" << kappa << ", K=" << K;
    throw ConvergenceError(msg.str(), res, it);
  }
  // The iterate must still sit on the exp(-inK) = +R family with the
  // requested winding.
  const cplx n0 = s.index();
  const double branch = std::abs(std::exp(-I * n0 * K) - fresnel_ratio(n0));
  const double winding = (eta0 * K + std::arg(fresnel_ratio(n0))) / (2.0 * std::numbers::pi);
  if (branch > 1e-6 || std::abs(winding - mode_index) > 0.25 || !(kappa < 0.0)) {
    std::ostringstream msg;
    msg << "linear singularity (eta0=" << eta0 << ", m=" << mode_index
        << ") converged off the requested branch (K=" << K << ", kappa=" << kappa << ")";
    throw ConvergenceError(msg.str(), res, it);
  }
  return s;
}

double threshold_gain_g0(double eta0, double kappa0, double /*K0*/, double thickness_a) {
  if (!(thickness_a > 0.0)) throw InvalidParameter("threshold gain: thickness must be positive");
  const double r = std::abs(fresnel_ratio(cplx(eta0, kappa0)));
  return std::log(1.0 / (r * r)) / thickness_a;
}

double threshold_gain_g0_approx(double eta0, double thickness_a) {
  if (!(eta0 > 1.0)) throw InvalidParameter("threshold gain: eta0 must exceed 1");
  if (!(thickness_a > 0.0)) throw InvalidParameter("threshold gain: thickness must be positive");
  return 2.0 * std::log((eta0 + 1.0) / (eta0 - 1.0)) / thickness_a;
}

}  // namespace specsing
