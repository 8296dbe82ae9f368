#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracle.hpp"
#include "specsing/errors.hpp"
#include "specsing/linear_scattering.hpp"
#include "specsing/nonlinear_bvp.hpp"

using namespace specsing;

namespace {
const cplx I(0.0, 1.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Roots for eta0 = 3 from an independent 40-digit solve of
// exp(-i n K) = (n-1)/(n+1).
struct FrozenRoot {
  int m;
  double kappa0;
  double K0;
};
constexpr FrozenRoot kRoots[] = {
    {1, -0.32230583324932905184, 2.120853917856471166},
    {2, -0.16433958919329853562, 4.2024314723814728011},
    {5, -0.066116807068608537089, 10.477481735977991295},
};
}  // namespace

TEST_CASE("zeta0 terminal data and empty slab") {
  const cplx N(0.3, 1.2);
  const FieldState t = zeta0(1.0, cplx(3.0, -0.1), 2.5, N);
  CHECK(rel(t.psi, N * std::exp(I * 2.5)) < 1e-15);
  CHECK(rel(t.dpsi, I * 2.5 * N * std::exp(I * 2.5)) < 1e-15);
  for (double x : {0.0, 0.3, 0.77}) {
    const FieldState s = zeta0(x, cplx(1.0, 0.0), 4.0, N);
    CHECK(rel(s.psi, N * std::exp(I * 4.0 * x)) < 1e-14);
  }
  CHECK_THROWS_AS(zeta0(0.5, cplx(0.0, 0.0), 1.0, N), SingularParameter);
}

TEST_CASE("zeta0 against an independent integrator") {
  const oracle::State ref =
      oracle::integrate(cplx(3.0, 0.0), 2.0, 0.0, [](double) { return 0.0; },
                        oracle::outgoing(2.0, 1.0));
  const FieldState s = zeta0(0.0, cplx(3.0, 0.0), 2.0, 1.0);
  CHECK(rel(s.psi, ref.psi) < 1e-10);
  CHECK(rel(s.dpsi, ref.dpsi) < 1e-10);
}

TEST_CASE("zeta0 satisfies the linear equation") {
  // Fourth-order central differences of psi and psi' at 50 points.
  const cplx n(3.0, -0.05);
  const double K = 2.0, h = 1e-3;
  const cplx N(1.0, 0.0);
  auto d1 = [&](auto get, double x) {
    return (get(zeta0(x - 2 * h, n, K, N)) - 8.0 * get(zeta0(x - h, n, K, N)) +
            8.0 * get(zeta0(x + h, n, K, N)) - get(zeta0(x + 2 * h, n, K, N))) /
           (12.0 * h);
  };
  for (int i = 0; i < 50; ++i) {
    const double x = 0.01 + 0.98 * i / 49.0;
    const FieldState s = zeta0(x, n, K, N);
    const cplx dpsi = d1([](const FieldState& f) { return f.psi; }, x);
    const cplx ddpsi = d1([](const FieldState& f) { return f.dpsi; }, x);
    CHECK(std::abs(dpsi - s.dpsi) < 1e-9);
    CHECK(std::abs(ddpsi + n * n * K * K * s.psi) < 1e-9 * std::abs(n * n * K * K));
  }
}

TEST_CASE("G0_pm") {
  CHECK(std::abs(G0_pm(cplx(1.0, 0.0), 3.0, 1.0).G_minus) == 0.0);

  const cplx n(3.0, -0.005);
  const double K = 10.0;
  const FieldState s = zeta0(0.0, n, K, 1.0);
  const BoundaryFunctions G = G0_pm(n, K, 1.0);
  CHECK(rel(G.G_plus, s.dpsi + I * K * s.psi) < 1e-12);
  CHECK(rel(G.G_minus, s.dpsi - I * K * s.psi) < 1e-12);

  const LinearSingularity r = find_linear_singularity(3.0, 2);
  CHECK(std::abs(G0_pm(r.index(), r.K0, 1.0).G_plus) < 1e-12);
}

TEST_CASE("G+ vanishes exactly where L does") {
  // Along a K-sweep at the root's index the sign changes of Re and the
  // minimum of |G+|/|L| stay locked: the ratio is the nonvanishing prefactor.
  const LinearSingularity r = find_linear_singularity(3.0, 1);
  for (int i = 0; i < 100; ++i) {
    const double K = 0.5 + 10.0 * i / 99.0;
    const cplx ratio = G0_pm(r.index(), K, 1.0).G_plus / L_function(r.index(), K);
    const cplx n = r.index();
    const cplx prefactor = I * K * std::exp(I * (n + 1.0) * K) * (n + 1.0) * (n + 1.0) / (2.0 * n);
    CHECK(rel(ratio, prefactor) < 1e-10);
  }
}

TEST_CASE("L_function") {
  CHECK(rel(L_function(cplx(1.0, 0.0), 0.7), std::exp(-2.0 * I * 0.7)) < 1e-15);
  CHECK(std::abs(L_function(cplx(2.0, 0.0), std::numbers::pi) - 8.0 / 9.0) < 1e-14);
  CHECK_THROWS_AS(L_function(cplx(-1.0, 0.0), 1.0), SingularParameter);
}

TEST_CASE("reflection and transmission") {
  const ScatteringCoefficients empty =
      reflection_transmission(cplx(1.0, 0.0), 2.0, NonlinearitySpec::none(), 1.0);
  CHECK(std::abs(empty.R_left) < 1e-15);
  CHECK(std::abs(empty.T_left - 1.0) < 1e-15);

  for (int i = 0; i < 150; ++i) {
    const double K = 0.05 + 30.0 * i / 149.0;
    const ScatteringCoefficients s =
        reflection_transmission(cplx(1.7, 0.0), K, NonlinearitySpec::none(), 1.0);
    CHECK(std::abs(std::norm(s.R_left) + std::norm(s.T_left) - 1.0) < 1e-10);
  }

  // |T| grows like 1/|L| on the approach to a singularity.
  const LinearSingularity r = find_linear_singularity(3.0, 1);
  double previous = 0.0;
  for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const ScatteringCoefficients s =
        reflection_transmission(r.index(), r.K0 + d, NonlinearitySpec::none(), 1.0);
    const double product = std::abs(s.T_left) * std::abs(L_function(r.index(), r.K0 + d));
    if (previous > 0.0) CHECK(product == doctest::Approx(previous).epsilon(2e-2));
    previous = product;
  }
  CHECK(reflection_transmission(r.index(), r.K0 + 1e-14, NonlinearitySpec::none(), 1.0).overflow);

  // The nonlinear path reproduces the closed form when the response is off.
  ShootingConfig cfg;
  cfg.steps = 4096;
  const ScatteringCoefficients closed =
      reflection_transmission(cplx(2.0, -0.05), 3.0, NonlinearitySpec::none(), 1.0);
  const ScatteringCoefficients shot =
      reflection_transmission(cplx(2.0, -0.05), 3.0, NonlinearitySpec::kerr(0.0), 1.0, cfg);
  CHECK(rel(shot.T_left, closed.T_left) < 1e-10);
  CHECK(rel(shot.R_left, closed.R_left) < 1e-10);
}

TEST_CASE("linear roots match frozen values") {
  for (const FrozenRoot& f : kRoots) {
    const LinearSingularity r = find_linear_singularity(3.0, f.m);
    CHECK(r.residual <= kDefaultLinearTolerance);
    CHECK(r.kappa0 < 0.0);
    CHECK(std::abs(r.kappa0 - f.kappa0) < 1e-13);
    CHECK(std::abs(r.K0 - f.K0) < 1e-13);
    // Branch condition exp(-i n0 K0) = (n0-1)/(n0+1).
    CHECK(std::abs(std::exp(-I * r.index() * r.K0) - fresnel_ratio(r.index())) < 1e-10);
  }
}

TEST_CASE("root near K = 30") {
  const int m = static_cast<int>(std::lround(30.0 * 3.0 / (2.0 * std::numbers::pi)));
  const LinearSingularity r = find_linear_singularity(3.0, m);
  CHECK(std::abs(r.K0 - 30.0) < 2.0);
  CHECK(std::abs(L_function(r.index(), r.K0)) < 1e-12);
  CHECK(r.kappa0 == doctest::Approx(-std::log(2.0) / r.K0).epsilon(1e-3));
}

TEST_CASE("root finder preconditions") {
  CHECK_THROWS_AS(find_linear_singularity(1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(find_linear_singularity(3.0, 0), InvalidParameter);
}

TEST_CASE("threshold gain") {
  CHECK(threshold_gain_g0_approx(3.0, 1.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  for (int m = 1; m <= 8; ++m) {
    const LinearSingularity r = find_linear_singularity(3.0, m);
    const double g0 = threshold_gain_g0(r.eta0, r.kappa0, r.K0, 1.0);
    const double R = std::abs(fresnel_ratio(r.index()));
    CHECK(g0 == doctest::Approx(std::log(1.0 / (R * R))).epsilon(1e-12));
    CHECK(g0 == doctest::Approx(gain_from_kappa(r.kappa0, r.K0, 1.0)).epsilon(1e-8));
  }
  // Exact vs approximate: the gap closes as kappa0 -> 0 along the ladder.
  const LinearSingularity far = find_linear_singularity(3.0, 400);
  CHECK(std::abs(far.kappa0) < 1e-3);
  const double gap = std::abs(threshold_gain_g0(far.eta0, far.kappa0, far.K0, 1.0) -
                              threshold_gain_g0_approx(3.0, 1.0)) /
                     threshold_gain_g0_approx(3.0, 1.0);
  CHECK(gap < 1e-4);
}
