#ifndef CALOREX_KERNELS_HPP
#define CALOREX_KERNELS_HPP

// Integral-equation kernels of the XXZ chain.
//
// Fourier convention used throughout:  F(x) = (1/2pi) int dk F^(k) e^{ikx}
// on the real line (easy-plane) and F(x) = (1/2pi) sum_n F^_n e^{inx} on the
// circle (easy-axis). With this convention a complex shift of the argument,
// F(x + i b), multiplies the transform by e^{-b k}.
//
// Easy-plane (Delta = cos theta):
//   c^(k) = 1 / (2 cosh(theta k / 2))
//   g^(k) = sinh((pi - 2 theta) k / 2) / (2 cosh(theta k / 2) sinh((pi - theta) k / 2))
// Easy-axis (Delta = cosh phi), period 2pi:
//   c^_n = 1 / (2 cosh(n phi)),   g^_n = e^{-|n| phi} / (2 cosh(n phi))

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

#include "calorex/error.hpp"

namespace calorex {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// Result of a kernel evaluation by quadrature or series, with the knobs that
/// produced it.
template <class T>
struct KernelEval {
  T value{};
  double error_estimate = 0.0;
  double cutoff = 0.0;      // upper integration limit or number of series terms
  double decay_rate = 0.0;  // exponential decay rate of the integrand / coefficients
};

// ---------------------------------------------------------------- easy-plane

inline void require_plane_angle(double theta) {
  if (!(theta > 0.0)) fail(ErrorKind::DegenerateRegime, "easy-plane kernels need theta > 0");
  if (theta > kPi / 2 + 1e-15)
    fail(ErrorKind::OutOfSupportedRange, "easy-plane kernels support theta <= pi/2");
}

/// c(x) = 1 / (2 theta cosh(pi x / theta)).
inline double c_plane(double x, double theta) {
  require_plane_angle(theta);
  return 1.0 / (2.0 * theta * std::cosh(kPi * x / theta));
}

/// c at complex argument; used on the shifted integration contours.
inline cplx c_plane(cplx z, double theta) {
  require_plane_angle(theta);
  const cplx w = kPi * z / theta;
  // 1/cosh(w) = 2 e^{-|Re w|} / (1 + e^{-2|Re w|} ...), written to avoid overflow.
  const double s = w.real() >= 0.0 ? 1.0 : -1.0;
  const cplx e = std::exp(-s * w);
  return e / (theta * (1.0 + e * e));
}

/// c^(k) e^{-beta k}.
inline double c_plane_ft(double k, double theta, double beta = 0.0) {
  const double a = std::abs(k);
  return std::exp(-0.5 * theta * a - beta * k) / (1.0 + std::exp(-theta * a));
}

/// g^(k) e^{-beta k}; finite for |beta| < theta, evaluated without overflow.
inline double g_plane_ft(double k, double theta, double beta = 0.0) {
  const double a = std::abs(k);
  if (a < 1e-300) return (kPi - 2.0 * theta) / (2.0 * (kPi - theta));
  const double num = -std::expm1(-(kPi - 2.0 * theta) * a);
  const double den = (1.0 + std::exp(-theta * a)) * (-std::expm1(-(kPi - theta) * a));
  return std::exp(-theta * a - beta * k) * num / den;
}

/// Integral of g over the real line, g^(0).
inline double g_plane_integral(double theta) { return g_plane_ft(0.0, theta); }

namespace detail {

/// (1/pi) int_0^Y f(y) dy for an oscillatory integrand, panel-wise adaptive
/// Gauss-Kronrod. Returns value and accumulated error estimate.
template <class F>
std::pair<double, double> fourier_panels(F f, double upper, double frequency) {
  using boost::math::quadrature::gauss_kronrod;
  const double oscillations = upper * std::abs(frequency) / (2.0 * kPi);
  const std::size_t panels =
      std::min<std::size_t>(20000, 1 + static_cast<std::size_t>(oscillations / 8.0));
  const double width = upper / static_cast<double>(panels);
  double total = 0.0, total_err = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = width * static_cast<double>(p);
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, a, a + width, 12, 1e-15, &err);
    total_err += err;
  }
  return {total / kPi, total_err / kPi};
}

inline double plane_cutoff(double rate, double tol) {
  return (std::log(1.0 / (tol * rate)) + 8.0) / rate;
}

}  // namespace detail

/// g(x) by adaptive quadrature of its Fourier representation,
///   g(x) = (1/pi) int_0^inf g^(y) cos(x y) dy,
/// with the integration range cut where the integrand is below tol.
inline KernelEval<double> g_plane(double x, double theta, double tol = 1e-12) {
  require_plane_angle(theta);
  KernelEval<double> out;
  out.decay_rate = theta;
  if (std::abs(theta - kPi / 2) < 1e-15) return out;  // numerator sinh(0) vanishes
  out.cutoff = detail::plane_cutoff(theta, tol);
  auto f = [&](double y) { return g_plane_ft(y, theta) * std::cos(x * y); };
  auto [v, err] = detail::fourier_panels(f, out.cutoff, x);
  out.value = v;
  out.error_estimate = err;
  if (!(err <= tol)) fail(ErrorKind::QuadratureFailure, "g_plane: tolerance not reached");
  return out;
}

/// g(x - i sign alpha) with alpha = theta - eps: the cross kernel on the
/// shifted contour. The Fourier integrand picks up e^{sign alpha y}; it stays
/// integrable while |alpha| < theta, i.e. 0 < eps < 2 theta.
inline KernelEval<cplx> g_plane_shifted(double x, double theta, double eps, int sign,
                                        double tol = 1e-12) {
  require_plane_angle(theta);
  if (sign != 1 && sign != -1) fail(ErrorKind::ConfigError, "shift sign must be +1 or -1");
  const double alpha = theta - eps;
  const double rate = theta - std::abs(alpha);
  if (!(eps > 0.0) || !(rate > 0.0))
    fail(ErrorKind::ShiftTooLarge, "contour shift leaves the strip of integrability");
  KernelEval<cplx> out;
  out.decay_rate = rate;
  if (std::abs(theta - kPi / 2) < 1e-15) return out;
  out.cutoff = detail::plane_cutoff(rate, tol);
  const double s = sign * alpha;
  // cos((x - i s) y) = cos(xy) cosh(sy) + i sin(xy) sinh(sy)
  auto re = [&](double y) {
    return 0.5 * (g_plane_ft(y, theta, -s) + g_plane_ft(y, theta, s)) * std::cos(x * y);
  };
  auto im = [&](double y) {
    return 0.5 * (g_plane_ft(y, theta, -s) - g_plane_ft(y, theta, s)) * std::sin(x * y);
  };
  auto [vr, er] = detail::fourier_panels(re, out.cutoff, x);
  auto [vi, ei] = detail::fourier_panels(im, out.cutoff, x);
  out.value = {vr, vi};
  out.error_estimate = er + ei;
  if (!(out.error_estimate <= tol))
    fail(ErrorKind::QuadratureFailure, "g_plane_shifted: tolerance not reached");
  return out;
}

// ----------------------------------------------------------------- easy-axis

inline constexpr std::size_t kMaxSeriesTerms = 1000000;

inline void require_axis_angle(double phi) {
  if (!(phi > 0.0)) fail(ErrorKind::DegenerateRegime, "easy-axis kernels need phi > 0");
}

/// Terms needed for a cosine series whose coefficients decay like e^{-rate n}
/// to reach a tail below tol.
inline std::size_t series_terms(double rate, double tol = 1e-14) {
  const double n = std::ceil(std::log(2.0 / (tol * (1.0 - std::exp(-rate)))) / rate);
  if (!(n < static_cast<double>(kMaxSeriesTerms)))
    fail(ErrorKind::SlowConvergence, "series needs more than 1e6 terms; point too close to isotropic");
  return static_cast<std::size_t>(std::max(1.0, n));
}

/// c^_n e^{-beta n}.
inline double c_axis_ft(double n, double phi, double beta = 0.0) {
  const double a = std::abs(n);
  return std::exp(-phi * a - beta * n) / (1.0 + std::exp(-2.0 * phi * a));
}

/// g^_n e^{-beta n}.
inline double g_axis_ft(double n, double phi, double beta = 0.0) {
  const double a = std::abs(n);
  return std::exp(-2.0 * phi * a - beta * n) / (1.0 + std::exp(-2.0 * phi * a));
}

/// c(x) = (1/2pi) [1/2 + sum_{n>=1} cos(nx) / cosh(n phi)].
inline double c_axis(double x, double phi, std::size_t n_terms) {
  require_axis_angle(phi);
  double s = 0.0;
  for (std::size_t n = n_terms; n >= 1; --n) s += c_axis_ft(double(n), phi) * 2.0 * std::cos(double(n) * x);
  return (0.5 + s) / (2.0 * kPi);
}
inline double c_axis(double x, double phi) { return c_axis(x, phi, series_terms(phi)); }

/// g(x) = (1/2pi) [1/2 + sum_{n>=1} e^{-n phi} cos(nx) / cosh(n phi)].
inline double g_axis(double x, double phi, std::size_t n_terms) {
  require_axis_angle(phi);
  double s = 0.0;
  for (std::size_t n = n_terms; n >= 1; --n) s += g_axis_ft(double(n), phi) * 2.0 * std::cos(double(n) * x);
  return (0.5 + s) / (2.0 * kPi);
}
inline double g_axis(double x, double phi) { return g_axis(x, phi, series_terms(2.0 * phi)); }

/// g(x - i sign alpha), alpha = 2 phi - eps. Coefficients decay like
/// e^{-(2 phi - |alpha|) n}, so 0 < eps < 4 phi is required.
inline KernelEval<cplx> g_axis_shifted(double x, double phi, double eps, int sign,
                                       double tol = 1e-14) {
  require_axis_angle(phi);
  if (sign != 1 && sign != -1) fail(ErrorKind::ConfigError, "shift sign must be +1 or -1");
  const double alpha = 2.0 * phi - eps;
  const double rate = 2.0 * phi - std::abs(alpha);
  if (!(eps > 0.0) || !(rate > 0.0))
    fail(ErrorKind::ShiftTooLarge, "contour shift leaves the strip of convergence");
  KernelEval<cplx> out;
  out.decay_rate = rate;
  const std::size_t terms = series_terms(rate, tol);
  out.cutoff = double(terms);
  const double s = sign * alpha;
  cplx sum = 0.0;
  for (std::size_t n = terms; n >= 1; --n) {
    const double nn = double(n);
    // coefficient of e^{inx} is g^_n e^{n s}, of e^{-inx} is g^_n e^{-n s}
    const double up = g_axis_ft(nn, phi, -s), down = g_axis_ft(-nn, phi, -s);
    sum += up * std::polar(1.0, nn * x) + down * std::polar(1.0, -nn * x);
  }
  out.value = (0.5 + sum) / (2.0 * kPi);
  return out;
}

// ------------------------------------------------------ elliptic quantities

/// Elliptic data of the gapped antiferromagnet parametrized by the nome
/// q = e^{-phi}, together with the dispersion constants A (inverse-mass
/// amplitude) and B (spinon gap) in units J = 1.
struct EllipticSet {
  double q = 0.0;
  double phi = 0.0;
  double K = kPi / 2;
  double k = 0.0;
  double k_prime = 1.0;
  double gap_amp = 0.0;  // A = k' / (2 K k^2 sinh phi)
  double gap = 0.0;      // B = K k' sinh(phi) / pi
  std::size_t factors = 0;
};

inline EllipticSet elliptic_from_q(double q, double tol = 1e-16) {
  if (!(q < 1.0)) fail(ErrorKind::NonConvergence, "nome q must be < 1");
  if (!(q > 0.0)) fail(ErrorKind::OutOfSupportedRange, "nome q must be > 0");
  EllipticSet e;
  e.q = q;
  e.phi = -std::log(q);
  double K = kPi / 2, k = 4.0 * std::sqrt(q), kp = 1.0;
  for (std::size_t n = 1;; ++n) {
    const double odd = std::pow(q, 2.0 * double(n) - 1.0);
    const double even = std::pow(q, 2.0 * double(n));
    const double fK = ((1.0 + odd) / (1.0 - odd) * (1.0 - even) / (1.0 + even));
    const double fk = (1.0 + even) / (1.0 + odd);
    const double fkp = (1.0 - odd) / (1.0 + odd);
    K *= fK * fK;
    k *= fk * fk * fk * fk;
    kp *= fkp * fkp * fkp * fkp;
    e.factors = n;
    const double change = std::max({std::abs(fK - 1.0), std::abs(fk - 1.0), std::abs(fkp - 1.0)});
    if (change < tol) break;
    if (n > 100000) fail(ErrorKind::NonConvergence, "elliptic products did not converge");
  }
  e.K = K;
  e.k = k;
  e.k_prime = kp;
  const double sh = std::sinh(e.phi);
  e.gap_amp = kp / (2.0 * K * k * k * sh);
  e.gap = K * kp * sh / kPi;
  return e;
}

}  // namespace calorex

#endif  // CALOREX_KERNELS_HPP
