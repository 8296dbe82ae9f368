#include "specsing/singularity_finder.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

#include "specsing/errors.hpp"
#include "specsing/log.hpp"

namespace specsing {
namespace {

constexpr cplx I{0.0, 1.0};
constexpr int kMaxHalvings = 30;
constexpr int kMaxSecant = 50;
const NonlinearitySpec kNoResponse = NonlinearitySpec::none();

using Residual = std::function<cplx(double, double)>;

struct NewtonOutcome {
  double u;
  double v;
  double residual;
  int iterations;
};

// Damped Newton on (Re r, Im r) with a central-difference Jacobian.
NewtonOutcome newton_2d(const Residual& r, double u, double v, const FinderConfig& cfg,
                        const std::string& label) {
  cplx value = r(u, v);
  double res = std::abs(value);
  int it = 0;
  const double h = cfg.jacobian_step;
  while (res > cfg.tol) {
    if (it >= cfg.max_iterations) {
      std::ostringstream msg;
      msg << label << ": Newton did not converge after " << it << " iterations, residual " << res
          << " at (" << u << ", " << v << ")";
      throw ConvergenceError(msg.str(), res, it);
    }
    const cplx du = (r(u + h, v) - r(u - h, v)) / (2.0 * h);
    const cplx dv = (r(u, v + h) - r(u, v - h)) / (2.0 * h);
    const double det = du.real() * dv.imag() - dv.real() * du.imag();
    if (det == 0.0 || !std::isfinite(det)) {
      std::ostringstream msg;
      msg << label << ": singular Jacobian at (" << u << ", " << v << ")";
      throw ConvergenceError(msg.str(), res, it);
    }
    double step_u = (-value.real() * dv.imag() + value.imag() * dv.real()) / det;
    double step_v = (-du.real() * value.imag() + du.imag() * value.real()) / det;

    bool accepted = false;
    for (int k = 0; k < kMaxHalvings; ++k) {
      const cplx trial = r(u + step_u, v + step_v);
      const double trial_res = std::abs(trial);
      if (trial_res < res) {
        u += step_u;
        v += step_v;
        value = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      step_u *= 0.5;
      step_v *= 0.5;
    }
    ++it;
    log::debug("{} iteration {}: residual {:.3e} at ({:.15g}, {:.15g})", label, it, res, u, v);
    if (!accepted) {
      std::ostringstream msg;
      msg << label << ": line search failed, residual " << res << " at (" << u << ", " << v << ")";
      throw ConvergenceError(msg.str(), res, it);
    }
  }
  return {u, v, res, it};
}

void require_common(double eta, double thickness_a, const FinderConfig& cfg) {
  if (!(eta > 1.0)) throw InvalidParameter("finder: eta must exceed 1");
  if (!(thickness_a > 0.0)) throw InvalidParameter("finder: thickness must be positive");
  if (!(cfg.tol > 0.0)) throw InvalidParameter("finder: tol must be positive");
  if (!(cfg.jacobian_step > 0.0)) throw InvalidParameter("finder: jacobian_step must be positive");
}

// Seed in the unknowns of the chosen constraint: (kappa, K) or (eta, kappa).
std::pair<double, double> laser_seed(const LinearSingularity& lin, const NonlinearitySpec& nl,
                                     cplx N_plus, const FinderConfig& cfg) {
  const bool fix_k = cfg.constraint == FinderConstraint::FixK;
  switch (cfg.seed) {
    case SeedOrigin::UserSupplied:
      if (!cfg.user_seed) throw InvalidParameter("finder: seed UserSupplied without user_seed");
      return *cfg.user_seed;
    case SeedOrigin::LinearRoot:
      return fix_k ? std::pair{lin.eta0, lin.kappa0} : std::pair{lin.kappa0, lin.K0};
    case SeedOrigin::PerturbativeShift: {
      const double gamma = nl.gamma(lin.K0);
      const FirstOrderShift s =
          solve_shift(lin.index(), lin.K0, N_plus, nl,
                      fix_k ? ShiftConstraint::FixK : ShiftConstraint::FixEta);
      if (fix_k) return {lin.eta0 + gamma * s.n1.real(), lin.kappa0 + gamma * s.kappa1()};
      return {lin.kappa0 + gamma * s.kappa1(), lin.K0 + gamma * s.K1};
    }
  }
  return {lin.kappa0, lin.K0};
}

// Splits the unknown pair back into (eta, kappa, K).
struct Point {
  double eta;
  double kappa;
  double K;
};

Point unpack(FinderConstraint c, double eta, double K0, double u, double v) {
  return c == FinderConstraint::FixK ? Point{u, v, K0} : Point{eta, u, v};
}

// Secant iteration on an intensity variable x >= 0 such that value(x) hits
// target. `first_guess` is a positive starting intensity.
template <typename Eval>
auto secant_on_intensity(Eval&& eval, double target, double scale, double first_guess,
                         const std::string& label) {
  double x0 = first_guess;
  auto r0 = eval(x0);
  double f0 = (r0.first - target) / scale;
  double x1 = 1.1 * first_guess;
  auto r1 = eval(x1);
  double f1 = (r1.first - target) / scale;

  std::ostringstream history;
  history << "[" << x0 << ": " << f0 << "] [" << x1 << ": " << f1 << "]";
  int it = 0;
  while (std::abs(f1) > 1e-12 && std::abs(x1 - x0) > 1e-12 * std::abs(x1)) {
    // Stalled at the shooting noise floor.
    if (f1 == f0 && std::abs(f1) < 1e-9) break;
    if (it >= kMaxSecant || f1 == f0) {
      std::ostringstream msg;
      msg << label << ": secant did not converge; history " << history.str();
      throw ConvergenceError(msg.str(), std::abs(f1), it);
    }
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 > 0.0)) x2 = 0.5 * x1;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    r1 = eval(x1);
    f1 = (r1.first - target) / scale;
    history << " [" << x1 << ": " << f1 << "]";
    ++it;
  }
  return std::tuple{x1, std::move(r1.second), it};
}

// Relative gain excess per unit |N+|^2 predicted by first-order theory.
double perturbative_excess_per_intensity(const LinearSingularity& lin,
                                         const NonlinearitySpec& nl, double thickness_a,
                                         FinderConstraint constraint) {
  const FirstOrderShift s =
      solve_shift(lin.index(), lin.K0, cplx(1.0, 0.0), nl,
                  constraint == FinderConstraint::FixK ? ShiftConstraint::FixK
                                                       : ShiftConstraint::FixEta);
  const ModifiedGain mg = modified_gain(s, lin.index(), lin.K0, thickness_a, nl.gamma(lin.K0));
  return mg.report.excess / mg.report.g0;
}

}  // namespace

SingularityResult find_nonlinear_singularity(double eta, const NonlinearitySpec& nl, cplx N_plus,
                                             double thickness_a, int mode_index,
                                             const FinderConfig& cfg) {
  require_common(eta, thickness_a, cfg);
  const LinearSingularity lin = find_linear_singularity(eta, mode_index);
  // Zero amplitude is the linear limit: the equation is then linear, so shoot
  // with unit amplitude and no response term.
  const bool dark = N_plus == cplx(0.0, 0.0);
  const NonlinearitySpec& nl_eff = dark ? kNoResponse : nl;
  const cplx shoot_amp = dark ? cplx(1.0, 0.0) : N_plus;
  const auto [u0, v0] = laser_seed(lin, nl_eff, shoot_amp, cfg);
  const Nonlinearity f = nl_eff.function();
  const double norm = std::abs(shoot_amp);
  const FinderConstraint c = cfg.constraint;

  const Residual residual = [&](double u, double v) {
    const Point p = unpack(c, eta, lin.K0, u, v);
    const BoundaryFunctions G =
        shoot_G(cplx(p.eta, p.kappa), p.K, nl_eff.gamma(p.K), f, shoot_amp, cfg.shooting);
    return G.G_plus / (norm * p.K);
  };
  const NewtonOutcome out = newton_2d(residual, u0, v0, cfg, "nonlinear singularity");
  const Point p = unpack(c, eta, lin.K0, out.u, out.v);

  SingularityResult result;
  result.eta = p.eta;
  result.kappa_star = p.kappa;
  result.K_star = p.K;
  result.N_plus = N_plus;
  result.thickness_a = thickness_a;
  result.residual = out.residual;
  result.gain = make_gain_report(gain_from_kappa(p.kappa, p.K, thickness_a),
                                 threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, thickness_a));
  result.iterations = out.iterations;
  result.mode_index = mode_index;
  result.seed_origin = cfg.seed;
  result.constraint = c;
  return result;
}

IntensityResult intensity_for_gain(double eta, const NonlinearitySpec& nl, double g_target,
                                   double thickness_a, int mode_index, const FinderConfig& cfg) {
  if (nl.kind() == NonlinearityKind::None || !(nl.sigma() > 0.0))
    throw InvalidParameter("intensity_for_gain: needs a nonlinearity with sigma > 0");
  const LinearSingularity lin = find_linear_singularity(eta, mode_index);
  const double g0 = threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, thickness_a);
  if (!(g_target > g0)) {
    std::ostringstream msg;
    msg << "gain " << g_target << " does not exceed the threshold g0 = " << g0;
    throw BelowThreshold(msg.str(), g_target, g0);
  }

  const double slope = perturbative_excess_per_intensity(lin, nl, thickness_a, cfg.constraint);
  if (!(slope > 0.0))
    throw InvalidParameter("intensity_for_gain: nonlinearity does not raise the threshold");
  const double guess = (g_target - g0) / g0 / slope;

  FinderConfig local = cfg;
  std::optional<std::pair<double, double>> previous;
  auto eval = [&](double x) {
    if (previous) {
      local.seed = SeedOrigin::UserSupplied;
      local.user_seed = previous;
    }
    SingularityResult r = find_nonlinear_singularity(eta, nl, cplx(std::sqrt(x), 0.0),
                                                     thickness_a, mode_index, local);
    previous = cfg.constraint == FinderConstraint::FixK
                   ? std::pair{r.eta, r.kappa_star}
                   : std::pair{r.kappa_star, r.K_star};
    return std::pair{r.gain.g, std::move(r)};
  };
  auto [x, result, it] = secant_on_intensity(eval, g_target, g0, guess, "intensity_for_gain");
  result.seed_origin = cfg.seed;
  return {x, std::move(result), it};
}

CpaResult find_cpa_point(double eta, const NonlinearitySpec& nl, cplx M, double thickness_a,
                         int mode_index, const FinderConfig& cfg) {
  require_common(eta, thickness_a, cfg);
  if (M == cplx(0.0, 0.0)) throw InvalidParameter("cpa: amplitude must be nonzero");
  const LinearSingularity lin = find_linear_singularity(eta, mode_index);
  const FinderConstraint c = cfg.constraint;

  // The lossy problem is the complex conjugate of the laser problem with
  // N+ = conj(M); seed from the conjugated laser seed.
  std::pair<double, double> seed;
  if (cfg.seed == SeedOrigin::UserSupplied) {
    seed = laser_seed(lin, nl, std::conj(M), cfg);
  } else {
    const auto [a, b] = laser_seed(lin, nl, std::conj(M), cfg);
    seed = c == FinderConstraint::FixK ? std::pair{a, -b} : std::pair{-a, b};
  }

  const Nonlinearity f = nl.function();
  const double norm = std::abs(M);
  ShootingConfig shooting = cfg.shooting;
  shooting.record_trajectory = false;
  shooting.richardson_check = false;
  const Residual residual = [&](double u, double v) {
    const Point p = unpack(c, eta, lin.K0, u, v);
    const ShootingResult s = integrate_from(cplx(p.eta, p.kappa), p.K, nl.gamma(p.K), f,
                                            incoming_terminal_state(p.K, M), shooting);
    return compute_G(s.state0, p.K).G_minus / (norm * p.K);
  };
  const NewtonOutcome out = newton_2d(residual, seed.first, seed.second, cfg, "CPA point");
  const Point p = unpack(c, eta, lin.K0, out.u, out.v);

  CpaResult result;
  result.eta = p.eta;
  result.kappa_star = p.kappa;
  result.K_star = p.K;
  result.M = M;
  result.thickness_a = thickness_a;
  result.loss = -gain_from_kappa(p.kappa, p.K, thickness_a);
  result.residual = out.residual;
  result.iterations = out.iterations;
  return result;
}

CpaIntensityResult cpa_intensity_for_loss(double eta, const NonlinearitySpec& nl, double alpha,
                                          double thickness_a, int mode_index,
                                          const FinderConfig& cfg) {
  if (nl.kind() == NonlinearityKind::None || !(nl.sigma() > 0.0))
    throw InvalidParameter("cpa_intensity_for_loss: needs a nonlinearity with sigma > 0");
  const LinearSingularity lin = find_linear_singularity(eta, mode_index);
  const double g0 = threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, thickness_a);
  if (!(alpha > g0)) {
    std::ostringstream msg;
    msg << "loss " << alpha << " does not exceed the threshold g0 = " << g0;
    throw BelowThreshold(msg.str(), alpha, g0);
  }
  const double slope = perturbative_excess_per_intensity(lin, nl, thickness_a, cfg.constraint);
  if (!(slope > 0.0))
    throw InvalidParameter("cpa_intensity_for_loss: nonlinearity does not raise the threshold");
  const double guess = (alpha - g0) / g0 / slope;

  FinderConfig local = cfg;
  std::optional<std::pair<double, double>> previous;
  auto eval = [&](double x) {
    if (previous) {
      local.seed = SeedOrigin::UserSupplied;
      local.user_seed = previous;
    }
    CpaResult r = find_cpa_point(eta, nl, cplx(std::sqrt(x), 0.0), thickness_a, mode_index, local);
    previous = cfg.constraint == FinderConstraint::FixK ? std::pair{r.eta, r.kappa_star}
                                                        : std::pair{r.kappa_star, r.K_star};
    return std::pair{r.loss, std::move(r)};
  };
  auto [x, result, it] = secant_on_intensity(eval, alpha, g0, guess, "cpa_intensity_for_loss");
  return {x, std::move(result), it};
}

namespace {

template <typename T>
void require_monotone(std::span<const T> grid, const char* what) {
  if (grid.size() < 2) return;
  const bool increasing = grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool ok = increasing ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
    if (!ok) throw InvalidParameter(std::string(what) + ": grid must be strictly monotone");
  }
}

}  // namespace

std::vector<SweepRow> sweep_intensity(double eta, const NonlinearitySpec& nl, double thickness_a,
                                      int mode_index, std::span<const double> N_plus_mag2,
                                      const FinderConfig& cfg) {
  require_monotone(N_plus_mag2, "sweep_intensity");
  std::vector<SweepRow> rows;
  rows.reserve(N_plus_mag2.size());
  FinderConfig local = cfg;
  for (const double x : N_plus_mag2) {
    SweepRow row;
    row.parameter = x;
    try {
      if (!(x >= 0.0) || !std::isfinite(x))
        throw InvalidParameter("sweep_intensity: |N+|^2 must be finite and nonnegative");
      SingularityResult r =
          find_nonlinear_singularity(eta, nl, cplx(std::sqrt(x), 0.0), thickness_a, mode_index, local);
      r.seed_origin = local.seed;
      local.seed = SeedOrigin::UserSupplied;
      local.user_seed = cfg.constraint == FinderConstraint::FixK
                            ? std::pair{r.eta, r.kappa_star}
                            : std::pair{r.kappa_star, r.K_star};
      row.result = std::move(r);
    } catch (const Error& e) {
      row.status = e.what();
      log::warn("sweep point |N+|^2 = {} failed: {}", x, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> sweep_modes(double eta, const NonlinearitySpec& nl, cplx N_plus,
                                  double thickness_a, std::span<const int> modes,
                                  const FinderConfig& cfg) {
  require_monotone(modes, "sweep_modes");
  std::vector<SweepRow> rows;
  rows.reserve(modes.size());
  for (const int m : modes) {
    SweepRow row;
    row.parameter = m;
    try {
      row.result = find_nonlinear_singularity(eta, nl, N_plus, thickness_a, m, cfg);
    } catch (const Error& e) {
      row.status = e.what();
      log::warn("sweep point mode {} failed: {}", m, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* to_string(SeedOrigin origin) noexcept {
  switch (origin) {
    case SeedOrigin::LinearRoot:
      return "linear-root";
    case SeedOrigin::PerturbativeShift:
      return "perturbative-shift";
    case SeedOrigin::UserSupplied:
      return "user-supplied";
  }
  return "unknown";
}

const char* to_string(FinderConstraint constraint) noexcept {
  return constraint == FinderConstraint::FixK ? "fix-k" : "fix-eta";
}

}  // namespace specsing
