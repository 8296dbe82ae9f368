#pragma once

// Non-perturbative nonlinear spectral singularities: drive the integrated
// G+ to zero with a 2-D Newton iteration, then layer continuation sweeps and
// the gain -> intensity inverse problem on top.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specsing/linear_scattering.hpp"
#include "specsing/nonlinear_bvp.hpp"
#include "specsing/perturbation.hpp"
#include "specsing/slab_model.hpp"

namespace specsing {

enum class SeedOrigin { LinearRoot, PerturbativeShift, UserSupplied };

// Which pair of real parameters the Newton iteration moves.
enum class FinderConstraint {
  FixEta,  // unknowns (kappa, K) at the given eta
  FixK,    // unknowns (eta, kappa) at K = K0 of the linear branch
};

struct FinderConfig {
  ShootingConfig shooting{};
  double tol = 1e-10;  // on |G+| / (|N+| K)
  int max_iterations = 50;
  double jacobian_step = 1e-7;
  SeedOrigin seed = SeedOrigin::PerturbativeShift;
  FinderConstraint constraint = FinderConstraint::FixEta;
  // Used when seed == UserSupplied: (kappa, K) for FixEta, (eta, kappa) for FixK.
  std::optional<std::pair<double, double>> user_seed;
};

struct SingularityResult {
  double eta = 0.0;
  double kappa_star = 0.0;
  double K_star = 0.0;
  cplx N_plus;
  double thickness_a = 1.0;
  double residual = 0.0;  // |G+| / (|N+| K)
  GainReport gain;        // g = -2 K* kappa* / a, g0 of the linear branch
  int iterations = 0;
  int mode_index = 0;
  SeedOrigin seed_origin = SeedOrigin::LinearRoot;
  FinderConstraint constraint = FinderConstraint::FixEta;

  cplx index() const noexcept { return {eta, kappa_star}; }
  double intensity() const noexcept { return 0.5 * std::norm(N_plus); }
};

// Solves G+(n, K) = 0 for the branch mode_index of the linear problem at
// eta. For FixK the returned eta is the converged one.
SingularityResult find_nonlinear_singularity(double eta, const NonlinearitySpec& nl, cplx N_plus,
                                             double thickness_a, int mode_index,
                                             const FinderConfig& cfg = {});

struct IntensityResult {
  double N_plus_mag2 = 0.0;
  SingularityResult result;
  int iterations = 0;  // secant iterations
};

// Secant iteration on |N+|^2 until the singularity's gain equals g_target.
// Throws BelowThreshold when g_target <= g0 of the branch.
IntensityResult intensity_for_gain(double eta, const NonlinearitySpec& nl, double g_target,
                                   double thickness_a, int mode_index,
                                   const FinderConfig& cfg = {});

// Time-reversed problem on the lossy slab: incoming waves only, terminal
// data zeta(1) = M e^{-iK}, absorbed when zeta'(0) - iK zeta(0) = 0.
struct CpaResult {
  double eta = 0.0;
  double kappa_star = 0.0;  // > 0
  double K_star = 0.0;
  cplx M;                   // incident amplitude from the right
  double thickness_a = 1.0;
  double loss = 0.0;        // 2 K* kappa* / a
  double residual = 0.0;
  int iterations = 0;

  double intensity() const noexcept { return 0.5 * std::norm(M); }
};

CpaResult find_cpa_point(double eta, const NonlinearitySpec& nl, cplx M, double thickness_a,
                         int mode_index, const FinderConfig& cfg = {});

struct CpaIntensityResult {
  double M_mag2 = 0.0;
  CpaResult result;
  int iterations = 0;
};

// Incident |M|^2 at which the lossy slab with loss coefficient alpha is a
// coherent perfect absorber. Throws BelowThreshold when alpha <= g0.
CpaIntensityResult cpa_intensity_for_loss(double eta, const NonlinearitySpec& nl, double alpha,
                                          double thickness_a, int mode_index,
                                          const FinderConfig& cfg = {});

struct SweepRow {
  double parameter = 0.0;  // |N+|^2 or mode index
  std::optional<SingularityResult> result;
  std::string status = "ok";  // "ok" or the failure message
};

// Continuation in |N+|^2 along a monotone grid; each point is seeded from
// the previous converged point. Failures are recorded and the sweep goes on.
std::vector<SweepRow> sweep_intensity(double eta, const NonlinearitySpec& nl, double thickness_a,
                                      int mode_index, std::span<const double> N_plus_mag2,
                                      const FinderConfig& cfg = {});

// One solve per mode branch at fixed |N+|.
std::vector<SweepRow> sweep_modes(double eta, const NonlinearitySpec& nl, cplx N_plus,
                                  double thickness_a, std::span<const int> modes,
                                  const FinderConfig& cfg = {});

const char* to_string(SeedOrigin origin) noexcept;
const char* to_string(FinderConstraint constraint) noexcept;

}  // namespace specsing
