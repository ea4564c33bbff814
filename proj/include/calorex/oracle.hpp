#ifndef CALOREX_ORACLE_HPP
#define CALOREX_ORACLE_HPP

// Independent references: exact diagonalization of short chains, the XX
// chain in closed form, and low-temperature asymptotic series.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "calorex/error.hpp"
#include "calorex/kernels.hpp"

namespace calorex {

enum class Boundary { Periodic, Open };

struct EDSpectrum {
  int n_sites = 0;
  Boundary boundary = Boundary::Periodic;
  double delta = 0.0;
  double h = 0.0;
  std::vector<double> eigenvalues;  // ascending
};

inline constexpr int kMaxEdSites = 14;

namespace detail {

inline std::vector<std::pair<int, int>> chain_bonds(int n, Boundary b) {
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
  if (b == Boundary::Periodic && n > 2) bonds.emplace_back(n - 1, 0);
  return bonds;
}

}  // namespace detail

/// Spectrum of H = sum [SxSx + SySy + Delta SzSz] - h sum Sz, one dense block
/// per total-Sz sector.
inline EDSpectrum ed_spectrum(int n, Boundary boundary, double delta, double h) {
  if (n < 2 || n > kMaxEdSites) fail(ErrorKind::SizeTooLarge, "exact diagonalization supports 2 <= n <= 14");
  EDSpectrum out{n, boundary, delta, h, {}};
  const auto bonds = detail::chain_bonds(n, boundary);
  const std::uint32_t dim = 1u << n;
  std::vector<int> index(dim, -1);
  out.eigenvalues.reserve(dim);
  for (int up = 0; up <= n; ++up) {
    std::vector<std::uint32_t> basis;
    for (std::uint32_t s = 0; s < dim; ++s)
      if (std::popcount(s) == up) {
        index[s] = static_cast<int>(basis.size());
        basis.push_back(s);
      }
    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    const double sz = 0.5 * up - 0.5 * (n - up);
    for (Eigen::Index a = 0; a < m; ++a) {
      const std::uint32_t s = basis[static_cast<std::size_t>(a)];
      double diag = -h * sz;
      for (auto [i, j] : bonds) {
        const bool si = (s >> i) & 1u, sj = (s >> j) & 1u;
        if (si == sj) {
          diag += 0.25 * delta;
        } else {
          diag -= 0.25 * delta;
          const std::uint32_t flipped = s ^ ((1u << i) | (1u << j));
          H(index[flipped], a) += 0.5;
        }
      }
      H(a, a) = diag;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < m; ++k) out.eigenvalues.push_back(es.eigenvalues()(k));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

struct EDThermo {
  double f = 0.0;  // per site
  double S = 0.0;
  double c = 0.0;
};

/// Canonical ensemble over the spectrum; weights shifted by the ground state.
inline EDThermo ed_thermo(const EDSpectrum& spec, double t) {
  if (!(t > 0.0)) fail(ErrorKind::OutOfSupportedRange, "temperature must be > 0");
  const double e_min = spec.eigenvalues.front();
  double z = 0.0, e1 = 0.0, e2 = 0.0;
  for (double e : spec.eigenvalues) {
    const double x = e - e_min;
    const double w = std::exp(-x / t);
    z += w;
    e1 += w * x;
    e2 += w * x * x;
  }
  e1 /= z;
  e2 /= z;
  const double n = spec.n_sites;
  EDThermo r;
  r.f = (e_min - t * std::log(z)) / n;
  r.S = (std::log(z) + e1 / t) / n;
  r.c = std::max(0.0, e2 - e1 * e1) / (t * t * n);
  return r;
}

struct FreeFermion {
  double f_rel = 0.0;
  double S = 0.0;
  double c = 0.0;
  double e0 = 0.0;
};

/// XX chain (Delta = 0) through Jordan-Wigner: fermions with dispersion
/// eps(k) = cos k - h. With n = 1/(e^{eps/t} + 1),
///   f  = -(t/2pi) int ln(2 cosh(eps/2t)) dk,   e0 = -(1/4pi) int |eps| dk,
///   f - e0 = -(t/2pi) int ln(1 + e^{-|eps|/t}) dk,
///   S  = (1/2pi) int [ln(1 + e^{-|eps|/t}) + (|eps|/t) / (e^{|eps|/t} + 1)] dk,
///   c  = (1/2pi) int (eps/2t)^2 / cosh^2(eps/2t) dk.
inline FreeFermion xx_free_fermion(double t, double h) {
  if (!(t > 0.0)) fail(ErrorKind::OutOfSupportedRange, "temperature must be > 0");
  using boost::math::quadrature::gauss_kronrod;
  // The integrands are even in k; split [0, pi] at the Fermi point.
  std::vector<double> cuts{0.0};
  if (std::abs(h) < 1.0) cuts.push_back(std::acos(h));
  cuts.push_back(kPi);
  auto integrate = [&](auto f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      s += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-14);
    return s / kPi;
  };
  FreeFermion r;
  r.f_rel = -t * integrate([&](double k) { return std::log1p(std::exp(-std::abs(std::cos(k) - h) / t)); });
  r.S = integrate([&](double k) {
    const double x = std::abs(std::cos(k) - h) / t;
    return std::log1p(std::exp(-x)) + x / (std::exp(x) + 1.0);
  });
  r.c = integrate([&](double k) {
    const double x = (std::cos(k) - h) / (2.0 * t);
    if (std::abs(x) > 350.0) return 0.0;
    const double ch = std::cosh(x);
    return x * x / (ch * ch);
  });
  r.e0 = -0.5 * integrate([&](double k) { return std::abs(std::cos(k) - h); });
  return r;
}

// ------------------------------------------------------------- asymptotics

enum class Branch { Antiferro, Ferro };

struct GaplessAsymptote {
  double v = 0.0;        // velocity as printed
  double f_rel = 0.0;    // -pi t^2 / (6 v)
  double v_alt = 0.0;    // half the printed velocity (J = 1 normalization)
  double f_rel_alt = 0.0;
  double entropy_slope = 0.0;      // S / t = pi / (3 v)
  double entropy_slope_alt = 0.0;
};

/// f - e0 = -pi t^2 / (6 v) with v = pi sin(theta)/theta (antiferro) or
/// pi sin(pi - theta)/(pi - theta) (ferro), together with the alternative
/// normalization v/2.
inline GaplessAsymptote asymptote_gapless(double theta, double t, Branch branch = Branch::Antiferro) {
  if (!(theta > 0.0) || theta > kPi / 2 + 1e-15)
    fail(ErrorKind::OutOfSupportedRange, "gapless asymptote needs 0 < theta <= pi/2");
  const double a = branch == Branch::Antiferro ? theta : kPi - theta;
  GaplessAsymptote r;
  r.v = kPi * std::sin(a) / a;
  r.v_alt = 0.5 * r.v;
  r.f_rel = -kPi * t * t / (6.0 * r.v);
  r.f_rel_alt = -kPi * t * t / (6.0 * r.v_alt);
  r.entropy_slope = kPi / (3.0 * r.v);
  r.entropy_slope_alt = kPi / (3.0 * r.v_alt);
  return r;
}

struct GappedAsymptote {
  double f_rel = 0.0;
  double leading = 0.0;     // -e^{-B/t} sqrt(A) t^{3/2}
  double correction = 0.0;  // + e^{-B/t} (k^2+k+1)/(4pi(1-k)^2) A^{3/2} t^{5/2}
  EllipticSet elliptic;
};

/// f - e0 = -e^{-B/t} [sqrt(A) t^{3/2} - (k^2+k+1)/(4pi(1-k)^2) A^{3/2} t^{5/2}].
inline GappedAsymptote asymptote_gapped_af(double phi, double t) {
  require_axis_angle(phi);
  GappedAsymptote r;
  r.elliptic = elliptic_from_q(std::exp(-phi));
  const auto& e = r.elliptic;
  if (!(t > 0.0) || t > 0.5 * e.gap)
    fail(ErrorKind::RegimeViolation, "gapped asymptote needs 0 < t <= gap / 2");
  const double boltz = std::exp(-e.gap / t);
  const double coef = (e.k * e.k + e.k + 1.0) / (4.0 * kPi * (1.0 - e.k) * (1.0 - e.k));
  r.leading = -boltz * std::sqrt(e.gap_amp) * std::pow(t, 1.5);
  r.correction = boltz * coef * std::pow(e.gap_amp, 1.5) * std::pow(t, 2.5);
  r.f_rel = r.leading + r.correction;
  return r;
}

struct FerroAsymptote {
  double f = 0.0;
  double gap = 0.0;
  bool printed_sign_diverges = false;  // exponent as printed grows as t -> 0
};

/// f = -(t^{3/2}/sqrt(2 pi)) e^{-gap/t} with gap = |1 - Delta|. As printed the
/// exponent is -(1 - Delta)/t, which diverges as t -> 0 for Delta > 1.
inline FerroAsymptote asymptote_gapped_ferro(double delta, double t) {
  FerroAsymptote r;
  r.gap = std::abs(1.0 - delta);
  r.printed_sign_diverges = delta > 1.0;
  if (!(t > 0.0) || t > 0.5 * r.gap)
    fail(ErrorKind::RegimeViolation, "gapped asymptote needs 0 < t <= gap / 2");
  r.f = -std::pow(t, 1.5) / std::sqrt(2.0 * kPi) * std::exp(-r.gap / t);
  return r;
}

/// f - e0 = -(pi t^2 / 6v)(1 + 3 / (8 ln^3(pi/t))), v = pi/2.
inline double asymptote_isotropic(double t, double v = kPi / 2) {
  if (!(t > 0.0) || !(t < kPi)) fail(ErrorKind::RegimeViolation, "isotropic asymptote needs 0 < t < pi");
  const double l = std::log(kPi / t);
  return -kPi * t * t / (6.0 * v) * (1.0 + 3.0 / (8.0 * l * l * l));
}

}  // namespace calorex

#endif  // CALOREX_ORACLE_HPP
