#include "specsing/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "specsing/errors.hpp"

namespace specsing {
namespace {

using cplx = std::complex<double>;

// 15-point Kronrod abscissae (positive half) and weights; every second node
// is shared with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  cplx value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kronrod = kKronrod[7] * fc;
  cplx gauss = kGauss[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kNodes[static_cast<std::size_t>(j)];
    const cplx pair = f(c - dx) + f(c + dx);
    kronrod += kKronrod[static_cast<std::size_t>(j)] * pair;
    if (j % 2 == 1) gauss += kGauss[static_cast<std::size_t>(j / 2)] * pair;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    const QuadratureOptions& opts) {
  if (a == b) return {cplx{}, 0.0, 0};
  if (b < a) {
    QuadratureResult r = integrate_adaptive(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  if (opts.initial_panels < 1) throw InvalidParameter("quadrature: initial_panels must be >= 1");

  std::priority_queue<Panel> queue;
  cplx total{};
  double error = 0.0;
  const double width = (b - a) / opts.initial_panels;
  for (int i = 0; i < opts.initial_panels; ++i) {
    const double lo = a + i * width;
    const double hi = i + 1 == opts.initial_panels ? b : a + (i + 1) * width;
    Panel p = gk15(f, lo, hi);
    total += p.value;
    error += p.error;
    queue.push(p);
  }

  int panels = opts.initial_panels;
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (panels >= opts.max_panels) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge: error estimate " << error << " after "
          << panels << " panels";
      throw ConvergenceError(msg.str(), error, panels);
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }

  // Re-sum to drop the cancellation noise of the running updates.
  cplx sum{};
  double err = 0.0;
  while (!queue.empty()) {
    sum += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {sum, err, panels};
}

}  // namespace specsing
