#ifndef CALOREX_THERMO_HPP
#define CALOREX_THERMO_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "calorex/config.hpp"
#include "calorex/kernel_cache.hpp"
#include "calorex/nlie.hpp"

namespace calorex {

/// dln a/dt and dln abar/dt on the grid.
struct DerivFunctions {
  std::vector<cplx> A;
  std::vector<cplx> Abar;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline double checked_real(cplx v, const char* what, double* imag_out) {
  if (imag_out) *imag_out = v.imag();
  if (std::abs(v.imag()) > 1e-8) {
    std::ostringstream os;
    os << what << " has imaginary part " << v.imag();
    fail(ErrorKind::ComplexResidue, os.str());
  }
  return v.real();
}

}  // namespace detail

/// f - e0 = -t int [c(x + i eps/2) ln(1 + a) + c(x - i eps/2) ln(1 + abar)] dx.
/// The sum is the trapezoidal rule on the truncated line (the integrand is
/// negligible at +-L) and the rectangle rule on the circle.
inline double free_energy_rel(const AuxFunctions& aux, const SolverGrid& grid, const KernelTable& kt,
                              double* imag_out = nullptr) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < grid.n_points; ++j)
    s += kt.drive_a[j] * log1p_exp(aux.ln_a[j]) + kt.drive_abar[j] * log1p_exp(aux.ln_abar[j]);
  return detail::checked_real(-aux.params.t * grid.spacing * s, "free energy", imag_out);
}

/// Linear equations for A = dln a/dt, Abar = dln abar/dt:
///   A = pref c(x + i eps/2)/t^2 - h/t^2 + g * (w A) - g(. - i alpha) * (wbar Abar),
/// w = a/(1+a), and the mirror equation. Same damped iteration as the
/// nonlinear problem; the map is affine so convergence is geometric.
inline DerivFunctions deriv_t(const AuxFunctions& aux, const SolverGrid& grid, const KernelTable& kt,
                              const SolverConfig& cfg, const DerivFunctions* warm = nullptr) {
  const std::size_t n = grid.n_points;
  const double t = aux.params.t, h = aux.params.h;
  std::vector<cplx> wa(n), wb(n), drive_a(n), drive_b(n);
  double scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    wa[j] = logistic(aux.ln_a[j]);
    wb[j] = logistic(aux.ln_abar[j]);
    drive_a[j] = kt.drive_prefactor * kt.drive_a[j] / (t * t) - h / (t * t);
    drive_b[j] = kt.drive_prefactor * kt.drive_abar[j] / (t * t) + h / (t * t);
    scale = std::max({scale, std::abs(drive_a[j]), std::abs(drive_b[j])});
  }
  // Asymptotes on the real line: A(+-inf) = -+h/(t^2 (1 - k0)).
  double tail_a = 0.0, tail_b = 0.0, constant = 0.0;
  if (!grid.periodic()) {
    const double u = detail::tail_value(grid, kt, t, h);
    const double a_inf = -h / (t * t * (1.0 - kt.kernel_integral));
    tail_a = logistic(u).real() * a_inf;
    tail_b = logistic(-u).real() * (-a_inf);
    constant = kt.kernel_integral * (tail_a - tail_b);
  }
  detail::Convolver conv(grid, kt);
  DerivFunctions out;
  const bool use_warm = warm && warm->A.size() == n;
  out.A = use_warm ? warm->A : drive_a;
  out.Abar = use_warm ? warm->Abar : drive_b;
  std::vector<cplx> ra(n), rb(n), rhs_a(n), rhs_b(n);
  const double tol = cfg.tol * scale;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      ra[j] = wa[j] * out.A[j] - tail_a;
      rb[j] = wb[j] * out.Abar[j] - tail_b;
    }
    conv.apply(ra, rb, rhs_a, rhs_b);
    for (std::size_t j = 0; j < n; ++j) {
      rhs_a[j] += drive_a[j] + constant;
      rhs_b[j] += drive_b[j] - constant;
    }
    const double res = std::max(detail::sup_defect(rhs_a, out.A), detail::sup_defect(rhs_b, out.Abar));
    if (!std::isfinite(res)) fail(ErrorKind::NonConvergence, "derivative equations produced non-finite values");
    if (res < tol) {
      out.residual = res;
      out.iterations = it;
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) {
      out.A[j] += cfg.damping * (rhs_a[j] - out.A[j]);
      out.Abar[j] += cfg.damping * (rhs_b[j] - out.Abar[j]);
    }
  }
  fail(ErrorKind::NonConvergence, "derivative equations did not converge");
}

/// S = -df/dt = int [c+ ln(1+a) + c- ln(1+abar)] + t int [c+ w A + c- wbar Abar].
inline double entropy(const AuxFunctions& aux, const DerivFunctions& deriv, const SolverGrid& grid,
                      const KernelTable& kt, double* imag_out = nullptr) {
  const double t = aux.params.t;
  cplx s0 = 0.0, s1 = 0.0;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    s0 += kt.drive_a[j] * log1p_exp(aux.ln_a[j]) + kt.drive_abar[j] * log1p_exp(aux.ln_abar[j]);
    s1 += kt.drive_a[j] * logistic(aux.ln_a[j]) * deriv.A[j] +
          kt.drive_abar[j] * logistic(aux.ln_abar[j]) * deriv.Abar[j];
  }
  return detail::checked_real(grid.spacing * (s0 + t * s1), "entropy", imag_out);
}

/// Everything temperature independent about one deviation d: the point, its
/// grid (sized for temperatures down to t_min / 2, which covers the
/// finite-difference stencils) and kernel table. Successive solves are warm
/// started from the previous one.
class PointModel {
 public:
  struct State {
    AuxFunctions aux;
    DerivFunctions deriv;
    double f_rel = 0.0;
    double entropy = 0.0;
  };

  PointModel(double d, double t_min, const Config& cfg)
      : cfg_(cfg), point_(from_deviation(d, cfg.nlie.delta_max)) {
    detail::require_off_critical(point_, cfg.nlie);
    grid_ = build_grid(point_, 0.5 * t_min, cfg.nlie);
    kernels_ = cached_kernel_table(point_, grid_, cfg.nlie.kernel_cache);
  }

  const AnisotropyPoint& point() const { return point_; }
  const SolverGrid& grid() const { return grid_; }
  const KernelTable& kernels() const { return kernels_; }
  const Config& config() const { return cfg_; }

  AuxFunctions solve_aux(double t, double h) {
    AuxFunctions aux = solve(point_, ExternalConditions(t, h), grid_, kernels_, cfg_.nlie,
                             last_ ? &*last_ : nullptr);
    last_ = aux;
    return aux;
  }

  State evaluate(double t, double h) {
    State s;
    s.aux = solve_aux(t, h);
    s.deriv = deriv_t(s.aux, grid_, kernels_, cfg_.nlie, last_deriv_ ? &*last_deriv_ : nullptr);
    last_deriv_ = s.deriv;
    s.f_rel = free_energy_rel(s.aux, grid_, kernels_);
    s.entropy = entropy(s.aux, s.deriv, grid_, kernels_);
    return s;
  }

  double entropy_at(double t, double h) { return evaluate(t, h).entropy; }

 private:
  Config cfg_;
  AnisotropyPoint point_;
  SolverGrid grid_;
  KernelTable kernels_;
  std::optional<AuxFunctions> last_;
  std::optional<DerivFunctions> last_deriv_;
};

struct HeatResult {
  double c = 0.0;
  double step = 0.0;  // dt used
};

/// c = t dS/dt by central differences of the analytic entropy with step
/// dt = dt_fraction * t, plus one Richardson step (stencil t +- dt, t +- 2 dt).
inline HeatResult specific_heat(PointModel& model, double t, double h) {
  const ThermoConfig& tc = model.config().thermo;
  HeatResult r;
  r.step = tc.dt_fraction * t;
  const double dt = r.step;
  auto central = [&](double s) {
    return (model.entropy_at(t + s, h) - model.entropy_at(t - s, h)) / (2.0 * s);
  };
  const double d1 = central(dt);
  r.c = tc.richardson ? t * (4.0 * d1 - central(2.0 * dt)) / 3.0 : t * d1;
  return r;
}

inline HeatResult specific_heat(double d, double t, double h, const Config& cfg) {
  PointModel model(d, t, cfg);
  return specific_heat(model, t, h);
}

struct DResult {
  double alpha = 0.0;      // dS/dd
  double nematic_b = 0.0;  // -d f_rel / dd
  double step = 0.0;
  std::string stencil;     // central, one-sided+ or one-sided-
};

namespace detail {

inline bool in_range(double d, const Config& cfg) {
  return d + 1.0 >= 0.0 && d + 1.0 <= cfg.nlie.delta_max;
}

inline bool same_side(double a, double b, const Config& cfg) {
  return std::abs(a) >= cfg.nlie.d_floor && std::abs(b) >= cfg.nlie.d_floor && (a > 0) == (b > 0);
}

}  // namespace detail

/// dS/dd and -df_rel/dd by finite differences in d with step
/// max(dd_step, 0.05 |d|). Central Richardson stencil when d +- 2 step stays on
/// one side of d = 0 and inside the supported range; otherwise a one-sided
/// second-order stencil (d, d + s, d + 2s, d + 4s) with Richardson, pointing
/// away from d = 0 when possible.
inline DResult d_derivatives(double d, double t, double h, const Config& cfg) {
  if (std::abs(d) < cfg.nlie.d_eps * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "|d| = " << std::abs(d) << " below nlie.d_eps = " << cfg.nlie.d_eps;
    fail(ErrorKind::StencilCrossesCriticalPoint, os.str());
  }
  DResult r;
  r.step = std::max(cfg.thermo.dd_step, 0.05 * std::abs(d));
  const double s = r.step;
  auto eval = [&](double x) {
    PointModel m(x, t, cfg);
    const auto st = m.evaluate(t, h);
    return std::pair{st.entropy, st.f_rel};
  };
  const bool central_ok = detail::in_range(d - 2 * s, cfg) && detail::in_range(d + 2 * s, cfg) &&
                          detail::same_side(d - 2 * s, d + 2 * s, cfg) && detail::same_side(d, d + 2 * s, cfg);
  if (central_ok) {
    r.stencil = "central";
    const auto m2 = eval(d - 2 * s), m1 = eval(d - s), p1 = eval(d + s), p2 = eval(d + 2 * s);
    auto combine = [&](double fm2, double fm1, double fp1, double fp2) {
      const double d1 = (fp1 - fm1) / (2 * s), d2 = (fp2 - fm2) / (4 * s);
      return cfg.thermo.richardson ? (4 * d1 - d2) / 3 : d1;
    };
    r.alpha = combine(m2.first, m1.first, p1.first, p2.first);
    r.nematic_b = -combine(m2.second, m1.second, p1.second, p2.second);
    return r;
  }
  const double away = d > 0 ? 1.0 : -1.0;
  for (double sigma : {away, -away}) {
    const double far = d + 4 * sigma * s;
    if (!detail::in_range(far, cfg) || !detail::same_side(d, far, cfg)) continue;
    r.stencil = sigma > 0 ? "one-sided+" : "one-sided-";
    const auto f0 = eval(d), f1 = eval(d + sigma * s), f2 = eval(d + 2 * sigma * s), f4 = eval(far);
    auto combine = [&](double v0, double v1, double v2, double v4) {
      const double d1 = (-3 * v0 + 4 * v1 - v2) / (2 * sigma * s);
      const double d2 = (-3 * v0 + 4 * v2 - v4) / (4 * sigma * s);
      return cfg.thermo.richardson ? (4 * d1 - d2) / 3 : d1;
    };
    r.alpha = combine(f0.first, f1.first, f2.first, f4.first);
    r.nematic_b = -combine(f0.second, f1.second, f2.second, f4.second);
    return r;
  }
  fail(ErrorKind::StencilCrossesCriticalPoint, "no finite-difference stencil in d fits on one side of d = 0");
}

/// Gamma = alpha / c.
inline double grueneisen(double alpha_d, double c_d) {
  if (!(c_d > 1e-12)) fail(ErrorKind::VanishingHeatCapacity, "specific heat below 1e-12");
  return alpha_d / c_d;
}

struct ThermoDiagnostics {
  double residual = 0.0;        // defect of the central solve
  int iterations = 0;
  double deriv_residual = 0.0;
  double dt_step = 0.0;
  double dd_step = 0.0;
  std::string stencil;
  std::size_t n_points = 0;
  double half_width = 0.0;
  double eps_shift = 0.0;
  std::string grid_rule;
  std::vector<std::string> notes;
};

struct ThermoPoint {
  double d = 0.0, t = 0.0, h = 0.0;
  double f_rel = 0.0;
  double entropy = 0.0;
  double specific_heat = 0.0;
  double alpha_d = 0.0;
  double gamma_d = 0.0;
  double nematic_b = 0.0;
  ThermoDiagnostics diagnostics;
};

/// All observables at one (d, t, h). With_d = false skips the d-derivatives
/// (alpha, gamma, nematic_b are then NaN).
inline ThermoPoint evaluate_point(double d, double t, double h, const Config& cfg, bool with_d = true) {
  ExternalConditions cond(t, h);
  ThermoPoint p;
  p.d = d;
  p.t = t;
  p.h = h;
  PointModel model(d, t, cfg);
  const auto st = model.evaluate(t, h);
  p.f_rel = st.f_rel;
  p.entropy = st.entropy;
  auto& dg = p.diagnostics;
  dg.residual = st.aux.residual;
  dg.iterations = st.aux.iterations;
  dg.deriv_residual = st.deriv.residual;
  dg.n_points = model.grid().n_points;
  dg.half_width = model.grid().half_width;
  dg.eps_shift = model.grid().eps_shift;
  dg.grid_rule = model.grid().rule;
  const auto heat = specific_heat(model, t, h);
  p.specific_heat = heat.c;
  dg.dt_step = heat.step;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  p.alpha_d = p.gamma_d = p.nematic_b = nan;
  if (with_d) {
    const auto dr = d_derivatives(d, t, h, cfg);
    p.alpha_d = dr.alpha;
    p.nematic_b = dr.nematic_b;
    dg.dd_step = dr.step;
    dg.stencil = dr.stencil;
    try {
      p.gamma_d = grueneisen(p.alpha_d, p.specific_heat);
    } catch (const Error& e) {
      dg.notes.push_back(e.what());
    }
  }
  return p;
}

/// Ferromagnetic-branch free energy through f_ferro(t) = -f_af(-t), with
/// f_af(-t) from the antiferromagnetic equations solved with the sign of the
/// driving term reversed. The result carries a t-independent ground-state
/// offset (the ferro and antiferro e0 differ); only differences in t are
/// physical here.
inline double ferro_free_energy(double d, double t, double h, const Config& cfg) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::OutOfSupportedRange, "temperature must be > 0");
  PointModel model(d, t, cfg);
  const auto& grid = model.grid();
  const auto& kt = model.kernels();
  const std::size_t n = grid.n_points;
  // The map is written for signed t; -t reverses the driving term.
  detail::NlieMap map(grid, kt, -t, h);
  std::vector<cplx> la = map.drive_a(), lb = map.drive_b(), ra(n), rb(n);
  const auto& sc = cfg.nlie;
  for (int it = 1;; ++it) {
    map(la, lb, ra, rb);
    const double res = std::max(detail::sup_defect(ra, la), detail::sup_defect(rb, lb));
    if (!std::isfinite(res) || it > sc.max_iter)
      fail(ErrorKind::NonConvergence, "continued equations did not converge");
    if (res < sc.tol * std::max(1.0, 1.0 / t)) break;
    for (std::size_t j = 0; j < n; ++j) {
      la[j] += sc.damping * (ra[j] - la[j]);
      lb[j] += sc.damping * (rb[j] - lb[j]);
    }
  }
  AuxFunctions aux;
  aux.ln_a = std::move(la);
  aux.ln_abar = std::move(lb);
  aux.params = {model.point().delta, d, -t, h, kt.eps, grid.hash};
  return ferro_free_energy(free_energy_rel(aux, grid, kt));
}

}  // namespace calorex

#endif  // CALOREX_THERMO_HPP
