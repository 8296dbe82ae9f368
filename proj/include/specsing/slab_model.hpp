#pragma once

// Domain types for a homogeneous planar slab occupying 0 <= z <= a, the
// scaling to the dimensionless coordinate x = z/a, and gain bookkeeping.
//
// Units: lengths in cm, wavenumbers and gain coefficients in 1/cm, Kerr
// coefficients in cm^2/W (so sigma*|N+|^2 is dimensionless).

#include <complex>
#include <functional>
#include <vector>

namespace specsing {

using cplx = std::complex<double>;

// Real-valued response f(|psi|) entering n^2 -> n^2 + sigma f(|psi|).
using Nonlinearity = std::function<double(double)>;

class SlabMedium {
 public:
  // Throws InvalidParameter unless eta > 0, thickness_a > 0 and all fields
  // are finite. Whether eta > 1 is required is up to the operation.
  SlabMedium(double eta, double kappa, double thickness_a);

  double eta() const noexcept { return eta_; }
  double kappa() const noexcept { return kappa_; }
  double thickness() const noexcept { return thickness_a_; }
  cplx index() const noexcept { return {eta_, kappa_}; }

  bool is_gain() const noexcept { return kappa_ < 0.0; }

  friend bool operator==(const SlabMedium&, const SlabMedium&) = default;

 private:
  double eta_;
  double kappa_;
  double thickness_a_;
};

struct WavePoint {
  double k;  // 1/cm
  double K;  // a*k

  static WavePoint from_k(const SlabMedium& medium, double k);
  static WavePoint from_K(const SlabMedium& medium, double K);
};

enum class NonlinearityKind { None, Kerr, Custom };

class NonlinearitySpec {
 public:
  NonlinearitySpec() = default;

  static NonlinearitySpec none() { return {}; }
  static NonlinearitySpec kerr(double sigma);
  static NonlinearitySpec custom(double sigma, Nonlinearity f);

  NonlinearityKind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return kind_ == NonlinearityKind::None ? 0.0 : sigma_; }

  // Scaled strength gamma = -K^2 sigma. Evaluated per call, never cached.
  double gamma(double K) const noexcept { return sigma() == 0.0 ? 0.0 : -K * K * sigma(); }

  // f(|psi|); identically zero for kind None, |psi|^2 for Kerr.
  double response(double amplitude) const;

  // Callable form of response() for the integrators.
  Nonlinearity function() const;

 private:
  NonlinearityKind kind_ = NonlinearityKind::None;
  double sigma_ = 0.0;
  Nonlinearity custom_;
};

struct FieldState {
  double x = 0.0;  // in [0,1]
  cplx psi{};
  cplx dpsi{};
};

using FieldTrajectory = std::vector<FieldState>;

struct GainReport {
  double g = 0.0;       // 1/cm
  double g0 = 0.0;      // linear threshold, 1/cm
  double excess = 0.0;  // g - g0
};

GainReport make_gain_report(double g, double g0) noexcept;

struct ScaledParameters {
  double K;      // a*k
  cplx z;        // K^2 (1 - n^2), the scaled barrier height
  double gamma;  // -K^2 sigma
};

ScaledParameters scale_to_dimensionless(const SlabMedium& medium, double k,
                                        const NonlinearitySpec& nl);

// g = -2 K kappa / a. Positive for gain (kappa < 0).
double gain_from_kappa(double kappa, double K, double thickness_a) noexcept;
double gain_from_kappa(const SlabMedium& medium, double K) noexcept;

// Inverse of gain_from_kappa at fixed K.
double kappa_from_gain(double g, double K, double thickness_a) noexcept;

// Gain <-> loss image of the medium (the coherent perfect absorber that is
// the time reverse of the laser).
SlabMedium time_reverse_to_cpa(const SlabMedium& medium) noexcept;

}  // namespace specsing
