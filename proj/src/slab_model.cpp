#include "specsing/slab_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "specsing/errors.hpp"

namespace specsing {

SlabMedium::SlabMedium(double eta, double kappa, double thickness_a)
    : eta_(eta), kappa_(kappa), thickness_a_(thickness_a) {
  if (!std::isfinite(eta) || !std::isfinite(kappa) || !std::isfinite(thickness_a))
    throw InvalidParameter("slab medium: non-finite field");
  if (eta <= 0.0)
    throw InvalidParameter("slab medium: eta must be positive, got " + std::to_string(eta));
  if (thickness_a <= 0.0)
    throw InvalidParameter("slab medium: thickness_a must be positive, got " +
                           std::to_string(thickness_a));
}

WavePoint WavePoint::from_k(const SlabMedium& medium, double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw InvalidParameter("wave point: k must be positive and finite");
  return {k, medium.thickness() * k};
}

WavePoint WavePoint::from_K(const SlabMedium& medium, double K) {
  if (!(K > 0.0) || !std::isfinite(K))
    throw InvalidParameter("wave point: K must be positive and finite");
  return {K / medium.thickness(), K};
}

NonlinearitySpec NonlinearitySpec::kerr(double sigma) {
  if (!std::isfinite(sigma)) throw InvalidParameter("nonlinearity: sigma must be finite");
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::Kerr;
  spec.sigma_ = sigma;
  return spec;
}

NonlinearitySpec NonlinearitySpec::custom(double sigma, Nonlinearity f) {
  if (!std::isfinite(sigma)) throw InvalidParameter("nonlinearity: sigma must be finite");
  if (!f) throw InvalidParameter("nonlinearity: custom kind needs a response function");
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::Custom;
  spec.sigma_ = sigma;
  spec.custom_ = std::move(f);
  return spec;
}

double NonlinearitySpec::response(double amplitude) const {
  switch (kind_) {
    case NonlinearityKind::None:
      return 0.0;
    case NonlinearityKind::Kerr:
      return amplitude * amplitude;
    case NonlinearityKind::Custom: {
      const double value = custom_(amplitude);
      if (!std::isfinite(value))
        throw InvalidParameter("nonlinearity: custom response is not finite at |psi| = " +
                               std::to_string(amplitude));
      return value;
    }
  }
  return 0.0;
}

Nonlinearity NonlinearitySpec::function() const {
  switch (kind_) {
    case NonlinearityKind::None:
      return [](double) { return 0.0; };
    case NonlinearityKind::Kerr:
      return [](double r) { return r * r; };
    case NonlinearityKind::Custom:
      return [f = custom_](double r) {
        const double value = f(r);
        if (!std::isfinite(value))
          throw InvalidParameter("nonlinearity: custom response is not finite");
        return value;
      };
  }
  return [](double) { return 0.0; };
}

GainReport make_gain_report(double g, double g0) noexcept { return {g, g0, g - g0}; }

ScaledParameters scale_to_dimensionless(const SlabMedium& medium, double k,
                                        const NonlinearitySpec& nl) {
  const WavePoint wave = WavePoint::from_k(medium, k);
  const cplx n = medium.index();
  const double K = wave.K;
  return {K, K * K * (1.0 - n * n), nl.gamma(K)};
}

double gain_from_kappa(double kappa, double K, double thickness_a) noexcept {
  return -2.0 * K * kappa / thickness_a;
}

double gain_from_kappa(const SlabMedium& medium, double K) noexcept {
  return gain_from_kappa(medium.kappa(), K, medium.thickness());
}

double kappa_from_gain(double g, double K, double thickness_a) noexcept {
  return -g * thickness_a / (2.0 * K);
}

SlabMedium time_reverse_to_cpa(const SlabMedium& medium) noexcept {
  return SlabMedium(medium.eta(), -medium.kappa(), medium.thickness());
}

}  // namespace specsing
