#pragma once

// Direct integration of the scaled field equation inside the slab,
//
//   psi'' = -n^2 K^2 psi + gamma f(|psi|) psi,   0 <= x <= 1,
//
// backward from exact terminal data at x = 1, plus the boundary functions
// G+- and the exterior plane-wave amplitudes they determine.

#include <optional>

#include "specsing/slab_model.hpp"

namespace specsing {

struct ShootingConfig {
  int steps = 2048;  // fixed RK4 step count, >= 16
  bool record_trajectory = false;
  bool richardson_check = false;  // repeat at 2*steps and estimate the error
};

struct ShootingResult {
  FieldState state0;                        // x = 0
  std::optional<FieldTrajectory> trajectory;  // x = 1 down to x = 0, steps+1 rows
  std::optional<double> error_estimate;     // |y_h - y_{h/2}| / 15 over (psi, dpsi)
};

// Integrates from an arbitrary state at x = 1 down to x = 0.
ShootingResult integrate_from(cplx n, double K, double gamma, const Nonlinearity& f,
                              const FieldState& terminal, const ShootingConfig& cfg = {});

// Terminal data zeta(1) = N+ e^{iK}, zeta'(1) = iK N+ e^{iK}: a purely
// outgoing wave to the right of the slab.
FieldState outgoing_terminal_state(double K, cplx N_plus);

// Terminal data zeta(1) = M e^{-iK}, zeta'(1) = -iK M e^{-iK}: a purely
// incoming wave from the right (the time-reversed problem).
FieldState incoming_terminal_state(double K, cplx M);

ShootingResult integrate_zeta(cplx n, double K, double gamma, const Nonlinearity& f,
                              cplx N_plus, const ShootingConfig& cfg = {});

struct BoundaryFunctions {
  cplx G_plus;   // zeta'(0) + iK zeta(0)
  cplx G_minus;  // zeta'(0) - iK zeta(0)
};

// Throws std::invalid_argument unless state0.x == 0.
BoundaryFunctions compute_G(const FieldState& state0, double K);

struct ScatteringAmplitudes {
  cplx N_plus;         // transmitted, x > 1
  cplx N_minus;        // coefficient of e^{-iKx} for x < 0 (leaving to the left)
  cplx N_minus_tilde;  // coefficient of e^{+iKx} for x < 0 (arriving from the left)
  cplx G_plus;
  cplx G_minus;
};

ScatteringAmplitudes assemble_left_solution(const BoundaryFunctions& G, double K, cplx N_plus);

// Convenience: integrate_zeta + compute_G.
BoundaryFunctions shoot_G(cplx n, double K, double gamma, const Nonlinearity& f, cplx N_plus,
                          const ShootingConfig& cfg = {});

}  // namespace specsing
