#ifndef CALOREX_NLIE_HPP
#define CALOREX_NLIE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <sstream>
#include <vector>

#include "calorex/config.hpp"
#include "calorex/fft.hpp"
#include "calorex/grid.hpp"
#include "calorex/kernel_table.hpp"
#include "calorex/model.hpp"

namespace calorex {

struct AuxParams {
  double delta = 0.0;
  double d = 0.0;
  double t = 0.0;
  double h = 0.0;
  double eps = 0.0;
  std::uint64_t grid_hash = 0;
};

/// Converged ln a, ln abar on the grid (a on the contour Im x = +eps/2, abar
/// on Im x = -eps/2).
struct AuxFunctions {
  std::vector<cplx> ln_a;
  std::vector<cplx> ln_abar;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  AuxParams params;
};

/// ln(1 + e^z) continued analytically along the contour (no branch jump when
/// Im z crosses pi at large positive Re z).
inline cplx log1p_exp(cplx z) {
  if (z.real() > 0.0) return z + log1p_exp(-z);
  const cplx w = std::exp(z);  // |w| <= 1
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  return {re, std::atan2(w.imag(), 1.0 + w.real())};
}

/// a / (1 + a) = 1 / (1 + e^{-z}).
inline cplx logistic(cplx z) {
  if (z.real() >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const cplx e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

/// Convolution engine for one (grid, kernel table): given ra, rb on the grid
/// returns
///   out_a = g * ra - g(. - i alpha) * rb
///   out_b = g * rb - g(. + i alpha) * ra
/// as discrete convolutions on the grid (linear on the padded real line,
/// circular on the periodic domain).
class Convolver {
 public:
  Convolver(const SolverGrid& grid, const KernelTable& kt)
      : grid_(grid), kt_(kt), plan_(grid.fft_size), fa_(grid.fft_size), fb_(grid.fft_size) {}

  void apply(std::span<const cplx> ra, std::span<const cplx> rb, std::span<cplx> out_a,
             std::span<cplx> out_b) {
    const std::size_t n = grid_.n_points, m = grid_.fft_size;
    std::copy(ra.begin(), ra.end(), fa_.data());
    std::copy(rb.begin(), rb.end(), fb_.data());
    std::fill(fa_.data() + n, fa_.data() + m, cplx{});
    std::fill(fb_.data() + n, fb_.data() + m, cplx{});
    plan_.forward(fa_);
    plan_.forward(fb_);
    for (std::size_t q = 0; q < m; ++q) {
      const cplx a = fa_[q], b = fb_[q];
      fa_[q] = kt_.self_ft[q] * a - kt_.cross_a_ft[q] * b;
      fb_[q] = kt_.self_ft[q] * b - kt_.cross_abar_ft[q] * a;
    }
    plan_.backward(fa_);
    plan_.backward(fb_);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < n; ++j) {
      out_a[j] = fa_[j] * scale;
      out_b[j] = fb_[j] * scale;
    }
  }

 private:
  const SolverGrid& grid_;
  const KernelTable& kt_;
  FftPlan plan_;
  FftBuffer fa_, fb_;
};

/// Values of ln a, ln abar at |x| -> infinity on the real line: u and -u with
/// u = h / (t (1 - k0)). Zero on the periodic domain (no tails to subtract).
inline double tail_value(const SolverGrid& grid, const KernelTable& kt, double t, double h) {
  if (grid.periodic()) return 0.0;
  return h / (t * (1.0 - kt.kernel_integral));
}

/// Right-hand sides of both equations for given ln a, ln abar.
class NlieMap {
 public:
  NlieMap(const SolverGrid& grid, const KernelTable& kt, double t, double h)
      : grid_(grid), kt_(kt), conv_(grid, kt), t_(t), h_(h),
        ra_(grid.n_points), rb_(grid.n_points) {
    const std::size_t n = grid.n_points;
    drive_a_.resize(n);
    drive_b_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      drive_a_[j] = -kt.drive_prefactor * kt.drive_a[j] / t + h / t;
      drive_b_[j] = -kt.drive_prefactor * kt.drive_abar[j] / t - h / t;
    }
    const double u = tail_value(grid, kt, t, h);
    tail_a_ = log1p_exp(u).real();
    tail_b_ = log1p_exp(-u).real();
  }

  const std::vector<cplx>& drive_a() const { return drive_a_; }
  const std::vector<cplx>& drive_b() const { return drive_b_; }

  void operator()(std::span<const cplx> ln_a, std::span<const cplx> ln_b, std::span<cplx> out_a,
                  std::span<cplx> out_b) {
    const std::size_t n = grid_.n_points;
    for (std::size_t j = 0; j < n; ++j) {
      ra_[j] = log1p_exp(ln_a[j]) - tail_a_;
      rb_[j] = log1p_exp(ln_b[j]) - tail_b_;
    }
    conv_.apply(ra_, rb_, out_a, out_b);
    const double k0 = kt_.kernel_integral;
    const double constant = k0 * (tail_a_ - tail_b_);
    for (std::size_t j = 0; j < n; ++j) {
      out_a[j] += drive_a_[j] + constant;
      out_b[j] += drive_b_[j] - constant;
    }
  }

 private:
  const SolverGrid& grid_;
  const KernelTable& kt_;
  Convolver conv_;
  double t_, h_;
  double tail_a_ = 0.0, tail_b_ = 0.0;
  std::vector<cplx> drive_a_, drive_b_, ra_, rb_;
};

inline double sup_defect(std::span<const cplx> x, std::span<const cplx> y) {
  double r = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) r = std::max(r, std::abs(x[j] - y[j]));
  return r;
}

inline void require_consistent(const AnisotropyPoint& point, const SolverGrid& grid,
                               const KernelTable& kt) {
  if (kt.grid_hash != grid.hash || point.angle() != grid.angle || point.regime_tag() != grid.regime)
    fail(ErrorKind::ConfigError, "grid, kernel table and anisotropy point do not match");
}

inline void require_off_critical(const AnisotropyPoint& point, const SolverConfig& cfg) {
  if (std::abs(point.d) < cfg.d_floor) {
    std::ostringstream os;
    os << "|d| = " << std::abs(point.d) << " below nlie.d_floor = " << cfg.d_floor
       << "; evaluate d = 0 limits at d = +-nlie.d_eps instead";
    fail(ErrorKind::DegenerateRegime, os.str());
  }
}

}  // namespace detail

/// Solves the pair of nonlinear integral equations by damped fixed-point
/// iteration. The returned iterate is the one whose defect was measured below
/// tolerance. `warm` is used as the initial guess when it lives on the same
/// grid; otherwise the driving term is.
inline AuxFunctions solve(const AnisotropyPoint& point, const ExternalConditions& cond,
                          const SolverGrid& grid, const KernelTable& kernels,
                          const SolverConfig& cfg, const AuxFunctions* warm = nullptr) {
  detail::require_off_critical(point, cfg);
  detail::require_consistent(point, grid, kernels);
  const std::size_t n = grid.n_points;
  detail::NlieMap map(grid, kernels, cond.t, cond.h);

  AuxFunctions out;
  out.params = {point.delta, point.d, cond.t, cond.h, kernels.eps, grid.hash};
  if (warm && warm->params.grid_hash == grid.hash && warm->ln_a.size() == n) {
    out.ln_a = warm->ln_a;
    out.ln_abar = warm->ln_abar;
  } else {
    out.ln_a = map.drive_a();
    out.ln_abar = map.drive_b();
  }

  std::vector<cplx> rhs_a(n), rhs_b(n);
  const double lam = cfg.damping;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    map(out.ln_a, out.ln_abar, rhs_a, rhs_b);
    const double res = std::max(detail::sup_defect(rhs_a, out.ln_a), detail::sup_defect(rhs_b, out.ln_abar));
    out.residual_history.push_back(res);
    if (!std::isfinite(res))
      throw Error(ErrorKind::NonConvergence, "iteration produced non-finite values", out.residual_history);
    if (res < cfg.tol) {
      out.residual = res;
      out.iterations = it;
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) {
      out.ln_a[j] += lam * (rhs_a[j] - out.ln_a[j]);
      out.ln_abar[j] += lam * (rhs_b[j] - out.ln_abar[j]);
    }
  }
  std::ostringstream os;
  os << "no convergence in " << cfg.max_iter << " iterations (last defect "
     << out.residual_history.back() << ")";
  throw Error(ErrorKind::NonConvergence, os.str(), out.residual_history);
}

/// Sup-norm defect of both discretized equations, recomputed from scratch.
inline double residual(const AuxFunctions& aux, const SolverGrid& grid, const KernelTable& kernels) {
  if (aux.params.grid_hash != grid.hash || kernels.grid_hash != grid.hash)
    fail(ErrorKind::ConfigError, "auxiliary functions, grid and kernels do not match");
  const std::size_t n = grid.n_points;
  detail::NlieMap map(grid, kernels, aux.params.t, aux.params.h);
  std::vector<cplx> rhs_a(n), rhs_b(n);
  map(aux.ln_a, aux.ln_abar, rhs_a, rhs_b);
  return std::max(detail::sup_defect(rhs_a, aux.ln_a), detail::sup_defect(rhs_b, aux.ln_abar));
}

}  // namespace calorex

#endif  // CALOREX_NLIE_HPP
