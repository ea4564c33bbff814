#ifndef CALOREX_KERNEL_TABLE_HPP
#define CALOREX_KERNEL_TABLE_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "calorex/fft.hpp"
#include "calorex/grid.hpp"
#include "calorex/kernels.hpp"
#include "calorex/model.hpp"

namespace calorex {

/// Kernels of one anisotropy point sampled for one grid. Temperature
/// independent, immutable after construction.
///
/// The equations are solved with the auxiliary functions living on contours
/// shifted by +-i eps/2. Then the a-equation carries the driving term
/// c(x + i eps/2) and the cross kernel g(x - i alpha), the abar-equation their
/// mirror images, with alpha = theta - eps (easy-plane) or 2 phi - eps
/// (easy-axis). Every observable is independent of eps.
struct KernelTable {
  Regime regime = Regime::EasyPlane;
  double angle = 0.0;
  double eps = 0.0;          // contour shift
  double alpha = 0.0;        // cross-kernel shift
  double drive_shift = 0.0;  // eps / 2
  double drive_prefactor = 0.0;  // pi sin(theta) or 2 pi sinh(phi)
  double kernel_integral = 0.0;  // integral of g over the domain
  std::uint64_t grid_hash = 0;
  std::string domain_note;

  // Fourier multipliers per FFT bin (all real for real frequencies).
  std::vector<double> self_ft;        // g
  std::vector<double> cross_a_ft;     // g(. - i alpha), acts on ln(1 + abar)
  std::vector<double> cross_abar_ft;  // g(. + i alpha), acts on ln(1 + a)

  // Grid samples.
  std::vector<cplx> drive_a;     // c(x + i eps/2)
  std::vector<cplx> drive_abar;  // c(x - i eps/2)
  std::vector<double> c_samples;
  std::vector<double> g_samples;
  std::vector<cplx> g_shift_plus;   // g(x - i alpha)
  std::vector<cplx> g_shift_minus;  // g(x + i alpha)
};

namespace detail {

/// Samples F(x_j) on the grid from multipliers F^(k_q) via one inverse FFT.
inline std::vector<cplx> samples_from_ft(const SolverGrid& grid, const std::vector<double>& ft) {
  const std::size_t m = grid.fft_size;
  FftPlan plan(m);
  FftBuffer buf(m);
  for (std::size_t q = 0; q < m; ++q) buf[q] = ft[q];
  plan.backward(buf);
  // buf[l] = sum_q F^(k_q) e^{i k_q x_l}, x_l = l h (l taken mod m)
  const double scale = grid.periodic() ? 1.0 / (2.0 * kPi)
                                       : 1.0 / (static_cast<double>(m) * grid.spacing);
  std::vector<cplx> out(grid.n_points);
  const auto half = static_cast<long long>(grid.n_points / 2);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    long long l = static_cast<long long>(j) - half;  // x_j = l h
    if (l < 0) l += static_cast<long long>(m);
    out[j] = buf[static_cast<std::size_t>(l)] * scale;
  }
  return out;
}

}  // namespace detail

inline KernelTable build_kernel_table(const AnisotropyPoint& point, const SolverGrid& grid) {
  if (point.regime_tag() != grid.regime || point.angle() != grid.angle)
    fail(ErrorKind::ConfigError, "kernel table and grid built for different points");
  KernelTable kt;
  kt.regime = grid.regime;
  kt.angle = grid.angle;
  kt.eps = grid.eps_shift;
  kt.drive_shift = 0.5 * kt.eps;
  kt.grid_hash = grid.hash;
  const std::size_t m = grid.fft_size, n = grid.n_points;
  kt.self_ft.resize(m);
  kt.cross_a_ft.resize(m);
  kt.cross_abar_ft.resize(m);
  std::vector<double> c_ft(m), c_ft_a(m), c_ft_abar(m);

  if (grid.regime == Regime::EasyPlane) {
    const double theta = grid.angle;
    kt.alpha = theta - kt.eps;
    kt.drive_prefactor = kPi * std::sin(theta);
    kt.kernel_integral = g_plane_integral(theta);
    kt.domain_note =
        "easy-plane convolutions over the real line truncated at +-L; the +-pi limits apply only to the periodic easy-axis case";
    for (std::size_t q = 0; q < m; ++q) {
      const double k = grid.frequency(q);
      kt.self_ft[q] = g_plane_ft(k, theta);
      kt.cross_a_ft[q] = g_plane_ft(k, theta, -kt.alpha);
      kt.cross_abar_ft[q] = g_plane_ft(k, theta, kt.alpha);
      c_ft[q] = c_plane_ft(k, theta);
    }
    kt.drive_a.resize(n);
    kt.drive_abar.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      kt.drive_a[j] = c_plane(cplx(grid.x(j), kt.drive_shift), theta);
      kt.drive_abar[j] = std::conj(kt.drive_a[j]);
    }
  } else {
    const double phi = grid.angle;
    kt.alpha = 2.0 * phi - kt.eps;
    kt.drive_prefactor = 2.0 * kPi * std::sinh(phi);
    kt.kernel_integral = 0.5;
    kt.domain_note = "easy-axis convolutions over the periodic domain [-pi, pi)";
    for (std::size_t q = 0; q < m; ++q) {
      const double k = grid.frequency(q);
      kt.self_ft[q] = g_axis_ft(k, phi);
      kt.cross_a_ft[q] = g_axis_ft(k, phi, -kt.alpha);
      kt.cross_abar_ft[q] = g_axis_ft(k, phi, kt.alpha);
      c_ft[q] = c_axis_ft(k, phi);
      c_ft_a[q] = c_axis_ft(k, phi, kt.drive_shift);
      c_ft_abar[q] = c_axis_ft(k, phi, -kt.drive_shift);
    }
    kt.drive_a = detail::samples_from_ft(grid, c_ft_a);
    kt.drive_abar = detail::samples_from_ft(grid, c_ft_abar);
  }

  // Exact by construction on the real axis; keep the conjugate pair exact too.
  auto real_part = [](const std::vector<cplx>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
  };
  if (grid.regime == Regime::EasyPlane) {
    kt.c_samples.resize(n);
    for (std::size_t j = 0; j < n; ++j) kt.c_samples[j] = c_plane(grid.x(j), grid.angle);
  } else {
    kt.c_samples = real_part(detail::samples_from_ft(grid, c_ft));
    for (std::size_t j = 0; j < n; ++j) kt.drive_abar[j] = std::conj(kt.drive_a[j]);
  }
  kt.g_samples = real_part(detail::samples_from_ft(grid, kt.self_ft));
  kt.g_shift_plus = detail::samples_from_ft(grid, kt.cross_a_ft);
  kt.g_shift_minus.resize(n);
  for (std::size_t j = 0; j < n; ++j) kt.g_shift_minus[j] = std::conj(kt.g_shift_plus[j]);
  return kt;
}

}  // namespace calorex

#endif  // CALOREX_KERNEL_TABLE_HPP
