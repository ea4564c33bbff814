#ifndef CALOREX_MODEL_HPP
#define CALOREX_MODEL_HPP

// Parameters of the spin-1/2 XXZ chain
//
//   H = J sum_n [S^x_n S^x_{n+1} + S^y_n S^y_{n+1} + Delta S^z_n S^z_{n+1}] - h sum_n S^z_n
//
// in units J = 1, and the maps between physical drives (strain, electric
// field), the anisotropy Delta and the deviation d = Delta - sign(Delta).

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "calorex/error.hpp"

namespace calorex {

enum class Regime { EasyPlane, EasyAxis };

constexpr const char* to_string(Regime r) noexcept {
  return r == Regime::EasyPlane ? "easy-plane" : "easy-axis";
}

/// Exchange constants before normalization. Thermodynamics does not depend on
/// the sign of J, so Delta = Jz / |J|.
struct ExchangeCouplings {
  double j = 1.0;
  double jz = 1.0;

  double delta() const {
    if (!(j != 0.0) || !std::isfinite(j) || !std::isfinite(jz))
      fail(ErrorKind::OutOfSupportedRange, "exchange couplings must be finite with J != 0");
    return jz / std::abs(j);
  }
};

/// Delta = cos(theta), 0 <= Delta <= 1.
struct EasyPlane {
  double theta;
};

/// Delta = cosh(phi), Delta > 1.
struct EasyAxisAF {
  double phi;
};

struct AnisotropyPoint {
  double delta = 0.0;
  std::variant<EasyPlane, EasyAxisAF> regime = EasyPlane{std::numbers::pi / 2};
  double d = -1.0;

  Regime regime_tag() const {
    return std::holds_alternative<EasyPlane>(regime) ? Regime::EasyPlane : Regime::EasyAxis;
  }
  bool easy_plane() const { return regime_tag() == Regime::EasyPlane; }
  /// theta on the easy-plane side, phi on the easy-axis side.
  double angle() const {
    return easy_plane() ? std::get<EasyPlane>(regime).theta : std::get<EasyAxisAF>(regime).phi;
  }
  /// Prefactor of the driving term: sin(theta) or sinh(phi).
  double amplitude() const { return easy_plane() ? std::sin(angle()) : std::sinh(angle()); }
};

inline constexpr double kDefaultDeltaMax = 3.0;

/// Classifies Delta on the antiferromagnetic branch. Delta = 0 (the XX point)
/// is accepted; Delta = 1 is classified as EasyPlane(theta = 0) even though
/// the solver never runs there.
inline AnisotropyPoint classify(double delta, double delta_max = kDefaultDeltaMax) {
  if (!std::isfinite(delta) || delta < 0.0 || delta > delta_max) {
    std::ostringstream os;
    os << "Delta = " << delta << " outside supported range [0, " << delta_max
       << "]; the ferromagnetic branch is reachable only through ferro_free_energy";
    fail(ErrorKind::OutOfSupportedRange, os.str());
  }
  AnisotropyPoint p;
  p.delta = delta;
  p.d = delta - 1.0;
  if (delta <= 1.0)
    p.regime = EasyPlane{std::acos(delta)};
  else
    p.regime = EasyAxisAF{std::acosh(delta)};
  return p;
}

/// Inverse of the deviation map on the antiferromagnetic branch (Delta = d + 1).
inline AnisotropyPoint from_deviation(double d, double delta_max = kDefaultDeltaMax) {
  AnisotropyPoint p = classify(d + 1.0, delta_max);
  p.d = d;
  return p;
}

/// Linear magneto-elastic (f_zz) and electro-magnetic (h_izz) couplings.
struct DriveCouplings {
  double f_zz = 0.0;
  std::array<double, 3> h_zz{0.0, 0.0, 0.0};
};

/// Renormalized deviation after applying strain eps_zz and field E_i:
///   Delta' = Delta (1 - f_zz eps_zz - sum_i h_izz E_i).
/// First order in the drives; the cross terms of the product form
/// Delta (1 - f eps) prod_i (1 - h_i E_i) are dropped.
inline double drive_to_d(double base_delta, const DriveCouplings& couplings, double strain,
                         const std::array<double, 3>& field,
                         double delta_max = kDefaultDeltaMax) {
  classify(base_delta, delta_max);
  double shift = couplings.f_zz * strain;
  for (std::size_t i = 0; i < 3; ++i) shift += couplings.h_zz[i] * field[i];
  if (!std::isfinite(shift)) fail(ErrorKind::OutOfSupportedRange, "non-finite drive");
  const double delta = base_delta * (1.0 - shift);
  return classify(delta, delta_max).d;
}

/// Ferromagnetic-branch free energy from the antiferromagnetic one:
/// F_ferro(|Jz|, t) = -F_af(|Jz|, -t). The argument is the antiferromagnetic
/// free energy continued to temperature -t.
constexpr double ferro_free_energy(double f_af_at_minus_t) noexcept { return -f_af_at_minus_t; }

/// Reduced temperature t = k_B T / J and field h = g mu_B H / J.
struct ExternalConditions {
  double t = 1.0;
  double h = 0.0;

  ExternalConditions() = default;
  ExternalConditions(double t_, double h_ = 0.0) : t(t_), h(h_) {
    if (!(t > 0.0) || !std::isfinite(t))
      fail(ErrorKind::OutOfSupportedRange, "temperature must be finite and > 0");
    if (!std::isfinite(h)) fail(ErrorKind::OutOfSupportedRange, "field must be finite");
  }
};

}  // namespace calorex

#endif  // CALOREX_MODEL_HPP
