#ifndef CALOREX_GRID_HPP
#define CALOREX_GRID_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>

#include "calorex/config.hpp"
#include "calorex/kernels.hpp"
#include "calorex/model.hpp"

namespace calorex {

/// Discretization of the spectral variable.
///
/// Easy-plane: n_points samples x_j = -L + j h on [-L, L), embedded in an FFT
/// buffer of pad_factor * n_points so that circular convolution equals linear
/// convolution on the truncated domain. Easy-axis: n_points samples on the
/// periodic domain [-pi, pi), FFT size n_points.
struct SolverGrid {
  Regime regime = Regime::EasyPlane;
  double angle = 0.0;       // theta or phi the grid was sized for
  double half_width = 0.0;  // L, or pi
  std::size_t n_points = 0;
  std::size_t fft_size = 0;
  double spacing = 0.0;
  double eps_shift = 0.0;   // contour shift eps
  double t_min = 0.0;
  std::string rule;         // how L and n_points were chosen
  std::uint64_t hash = 0;

  bool periodic() const { return regime == Regime::EasyAxis; }
  double x(std::size_t j) const { return -half_width + spacing * static_cast<double>(j); }

  /// Signed angular frequency of FFT bin q.
  double frequency(std::size_t q) const {
    const auto m = static_cast<long long>(fft_size);
    long long s = static_cast<long long>(q);
    if (s >= m / 2) s -= m;
    if (periodic()) return static_cast<double>(s);
    return 2.0 * kPi * static_cast<double>(s) / (static_cast<double>(fft_size) * spacing);
  }
};

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t grid_hash(const SolverGrid& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const int r = static_cast<int>(g.regime);
  h = fnv1a(h, &r, sizeof r);
  for (double v : {g.angle, g.half_width, g.spacing, g.eps_shift}) h = fnv1a(h, &v, sizeof v);
  for (std::size_t v : {g.n_points, g.fft_size}) h = fnv1a(h, &v, sizeof v);
  return h;
}

// Spectral content below e^{-37} at the Nyquist frequency.
inline constexpr double kSpectralDigits = 37.0;

}  // namespace detail

/// Contour shift eps for a point: fraction * theta (easy-plane) or
/// fraction * phi (easy-axis).
inline double contour_shift(const AnisotropyPoint& p, const SolverConfig& cfg) {
  return cfg.eps_shift_fraction * p.angle();
}

/// Builds the grid for `point` valid down to temperature t_min.
///
/// Easy-plane half-width L is the larger of
///   - the driving-term rule: 2 pi sin(theta) c(L) / t_min < 1e-14 and c(L) < 1e-15
///     (twice the actual drive amplitude, for margin);
///   - the kernel-tail rule: e^{-r L} < 1e-14, r = min(pi/theta, 2pi/(pi - theta)),
///     the slowest exponential decay of g (absent at Delta = 0 where g = 0).
/// The spacing keeps aliasing below e^{-37}: a function analytic in a strip of
/// half-width r sampled with spacing h aliases at the level e^{-2 pi r / h}.
/// n_points is the configured value or the next power of two meeting this.
inline SolverGrid build_grid(const AnisotropyPoint& point, double t_min, const SolverConfig& cfg) {
  if (!(t_min > 0.0)) fail(ErrorKind::OutOfSupportedRange, "t_min must be > 0");
  if (cfg.n_points < 256 || !std::has_single_bit(cfg.n_points))
    fail(ErrorKind::ConfigError, "nlie.n_points must be a power of two >= 256");
  SolverGrid g;
  g.regime = point.regime_tag();
  g.angle = point.angle();
  g.t_min = t_min;
  g.eps_shift = contour_shift(point, cfg);
  std::ostringstream rule;
  rule.precision(6);
  double rate = 0.0;  // slowest spectral decay rate
  if (g.regime == Regime::EasyPlane) {
    if (cfg.pad_factor < 2) fail(ErrorKind::ConfigError, "nlie.pad_factor must be >= 2");
    const double theta = g.angle;
    require_plane_angle(theta);
    const double eps = g.eps_shift;
    const double drive_amp = kPi * std::sin(theta) / theta;  // 2 pi sin(theta) * max c
    const double need = std::max(drive_amp / (t_min * 1e-14), 1.0 / (2.0 * theta * 1e-15));
    const double l_drive = theta / kPi * std::acosh(need);
    const bool has_kernel = std::abs(theta - kPi / 2) > 1e-15;
    const double r_tail = std::min(kPi / theta, 2.0 * kPi / (kPi - theta));
    const double l_tail = has_kernel ? std::log(1e14) / r_tail : 0.0;
    g.half_width = std::max(l_drive, l_tail);
    rate = 0.5 * (theta - eps);  // shifted driving term
    if (has_kernel) rate = std::min({rate, theta, eps, 2.0 * theta - eps});
    const double h_max = 2.0 * kPi * rate / detail::kSpectralDigits;
    const auto need_points = static_cast<std::size_t>(std::ceil(2.0 * g.half_width / h_max));
    g.n_points = std::max(cfg.n_points, std::bit_ceil(need_points));
    g.fft_size = cfg.pad_factor * g.n_points;
    g.spacing = 2.0 * g.half_width / static_cast<double>(g.n_points);
    rule << "L = max(L_drive = " << l_drive << ", L_tail = " << l_tail
         << "); h <= 2 pi * " << rate << " / 37; pad " << cfg.pad_factor;
  } else {
    const double phi = g.angle;
    require_axis_angle(phi);
    const double eps = g.eps_shift;
    rate = std::min({eps, 4.0 * phi - eps, phi - 0.5 * eps, 2.0 * phi});
    const auto modes = static_cast<std::size_t>(std::ceil(detail::kSpectralDigits / rate));
    g.half_width = kPi;
    g.n_points = std::max(cfg.n_points, std::bit_ceil(modes + 2));
    g.fft_size = g.n_points;
    g.spacing = 2.0 * kPi / static_cast<double>(g.n_points);
    rule << "periodic [-pi, pi); modes <= " << modes << " for decay rate " << rate;
  }
  if (g.n_points > cfg.max_points)
    fail(ErrorKind::SlowConvergence,
         "grid needs " + std::to_string(g.n_points) + " points (> nlie.max_points); point too close to isotropic");
  g.rule = rule.str();
  g.hash = detail::grid_hash(g);
  return g;
}

/// Same spacing and contour, half-width scaled by `factor` (easy-plane only;
/// used for truncation checks). The point count is rounded to an even number.
inline SolverGrid rescaled_grid(const SolverGrid& g, double factor, std::size_t pad_factor = 2) {
  if (g.periodic()) fail(ErrorKind::ConfigError, "the periodic domain has no half-width to scale");
  SolverGrid out = g;
  const auto half = static_cast<std::size_t>(std::llround(0.5 * factor * static_cast<double>(g.n_points)));
  out.n_points = 2 * half;
  out.fft_size = pad_factor * out.n_points;
  out.half_width = 0.5 * g.spacing * static_cast<double>(out.n_points);
  out.rule = g.rule + "; half-width rescaled by " + std::to_string(factor);
  out.hash = detail::grid_hash(out);
  return out;
}

}  // namespace calorex

#endif  // CALOREX_GRID_HPP
