#include "specsing/nonlinear_bvp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "specsing/errors.hpp"

namespace specsing {
namespace {

struct Derivative {
  cplx dpsi;
  cplx d2psi;
};

class FieldEquation {
 public:
  FieldEquation(cplx n, double K, double gamma, const Nonlinearity& f)
      : n2K2_(n * n * K * K), gamma_(gamma), f_(f) {}

  Derivative operator()(cplx psi, cplx dpsi) const {
    cplx d2 = -n2K2_ * psi;
    if (gamma_ != 0.0) d2 += gamma_ * f_(std::abs(psi)) * psi;
    return {dpsi, d2};
  }

 private:
  cplx n2K2_;
  double gamma_;
  const Nonlinearity& f_;
};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

ShootingResult run_rk4(const FieldEquation& eq, const FieldState& terminal, int steps,
                       bool record) {
  const double h = -1.0 / steps;
  cplx psi = terminal.psi;
  cplx dpsi = terminal.dpsi;

  ShootingResult result;
  if (record) {
    result.trajectory.emplace();
    result.trajectory->reserve(static_cast<std::size_t>(steps) + 1);
    result.trajectory->push_back({1.0, psi, dpsi});
  }

  for (int i = 0; i < steps; ++i) {
    const Derivative k1 = eq(psi, dpsi);
    const Derivative k2 = eq(psi + 0.5 * h * k1.dpsi, dpsi + 0.5 * h * k1.d2psi);
    const Derivative k3 = eq(psi + 0.5 * h * k2.dpsi, dpsi + 0.5 * h * k2.d2psi);
    const Derivative k4 = eq(psi + h * k3.dpsi, dpsi + h * k3.d2psi);
    psi += h / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    dpsi += h / 6.0 * (k1.d2psi + 2.0 * k2.d2psi + 2.0 * k3.d2psi + k4.d2psi);

    // Grid positions are computed from the index, not accumulated.
    const double x = i + 1 == steps ? 0.0 : 1.0 - static_cast<double>(i + 1) / steps;
    if (!finite(psi) || !finite(dpsi)) {
      std::ostringstream msg;
      msg << "field integration blew up at x = " << x;
      throw BlowUpError(msg.str(), x);
    }
    if (record) result.trajectory->push_back({x, psi, dpsi});
  }
  result.state0 = {0.0, psi, dpsi};
  return result;
}

}  // namespace

ShootingResult integrate_from(cplx n, double K, double gamma, const Nonlinearity& f,
                              const FieldState& terminal, const ShootingConfig& cfg) {
  if (cfg.steps < 16) throw InvalidParameter("shooting: steps must be >= 16");
  if (!(K > 0.0)) throw InvalidParameter("shooting: K must be positive");
  if (!finite(n) || !std::isfinite(gamma)) throw InvalidParameter("shooting: non-finite n or gamma");
  if (gamma != 0.0 && !f) throw InvalidParameter("shooting: nonlinear term needs a response function");

  const FieldEquation eq(n, K, gamma, f);
  ShootingResult result = run_rk4(eq, terminal, cfg.steps, cfg.record_trajectory);
  if (cfg.richardson_check) {
    const ShootingResult fine = run_rk4(eq, terminal, 2 * cfg.steps, false);
    const double diff = std::hypot(std::abs(result.state0.psi - fine.state0.psi),
                                   std::abs(result.state0.dpsi - fine.state0.dpsi));
    result.error_estimate = diff / 15.0;
  }
  return result;
}

FieldState outgoing_terminal_state(double K, cplx N_plus) {
  const cplx value = N_plus * std::exp(cplx(0.0, K));
  return {1.0, value, cplx(0.0, K) * value};
}

FieldState incoming_terminal_state(double K, cplx M) {
  const cplx value = M * std::exp(cplx(0.0, -K));
  return {1.0, value, cplx(0.0, -K) * value};
}

ShootingResult integrate_zeta(cplx n, double K, double gamma, const Nonlinearity& f,
                              cplx N_plus, const ShootingConfig& cfg) {
  return integrate_from(n, K, gamma, f, outgoing_terminal_state(K, N_plus), cfg);
}

BoundaryFunctions compute_G(const FieldState& state0, double K) {
  if (state0.x != 0.0)
    throw std::invalid_argument("compute_G: state must be at x = 0");
  const cplx iK(0.0, K);
  return {state0.dpsi + iK * state0.psi, state0.dpsi - iK * state0.psi};
}

ScatteringAmplitudes assemble_left_solution(const BoundaryFunctions& G, double K, cplx N_plus) {
  if (!(K > 0.0)) throw InvalidParameter("assemble_left_solution: K must be positive");
  const cplx i(0.0, 1.0);
  return {N_plus, i * G.G_minus / (2.0 * K), -i * G.G_plus / (2.0 * K), G.G_plus, G.G_minus};
}

BoundaryFunctions shoot_G(cplx n, double K, double gamma, const Nonlinearity& f, cplx N_plus,
                          const ShootingConfig& cfg) {
  ShootingConfig plain = cfg;
  plain.record_trajectory = false;
  plain.richardson_check = false;
  return compute_G(integrate_zeta(n, K, gamma, f, N_plus, plain).state0, K);
}

}  // namespace specsing
