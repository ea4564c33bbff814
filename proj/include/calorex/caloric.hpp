#ifndef CALOREX_CALORIC_HPP
#define CALOREX_CALORIC_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "calorex/config.hpp"
#include "calorex/thermo.hpp"

namespace calorex {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// d = 0 is never evaluated: an endpoint closer than d_eps is replaced by
/// +-d_eps on the side facing the other endpoint.
inline double proxy_endpoint(double d, double other, double d_eps) {
  if (std::abs(d) >= d_eps) return d;
  return other > d || (other == d && d >= 0.0) ? d_eps : -d_eps;
}

inline double entropy_at(double d, double t, double h, const Config& cfg) {
  PointModel m(d, t, cfg);
  return m.entropy_at(t, h);
}

/// S(d2, t) - S(d1, t).
inline double delta_entropy(double d1, double d2, double t, const Config& cfg, double h = 0.0) {
  if (d1 == d2) return 0.0;
  const double e = cfg.nlie.d_eps;
  return entropy_at(proxy_endpoint(d2, d1, e), t, h, cfg) - entropy_at(proxy_endpoint(d1, d2, e), t, h, cfg);
}

struct GammaSample {
  double d = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double S = 0.0;
};

/// Gamma(d) at fixed (t, h), memoized by d.
class GammaField {
 public:
  GammaField(double t, double h, const Config& cfg) : t_(t), h_(h), cfg_(cfg) {}

  const GammaSample& at(double d) {
    auto it = memo_.find(d);
    if (it != memo_.end()) return it->second;
    if (static_cast<int>(memo_.size()) >= cfg_.caloric.max_nodes)
      fail(ErrorKind::QuadratureNotConverged, "caloric.max_nodes Gamma evaluations exhausted");
    const ThermoPoint p = evaluate_point(d, t_, h_, cfg_);
    GammaSample s{d, grueneisen(p.alpha_d, p.specific_heat), p.alpha_d, p.specific_heat, p.entropy};
    return memo_.emplace(d, s).first->second;
  }

  std::size_t evaluations() const { return memo_.size(); }
  const std::map<double, GammaSample>& samples() const { return memo_; }
  double t() const { return t_; }

 private:
  double t_, h_;
  Config cfg_;
  std::map<double, GammaSample> memo_;
};

struct PanelIntegral {
  double value = 0.0;
  double error = 0.0;
};

/// int_a^b Gamma dd by adaptive 15-point Gauss-Kronrod; a and b on one side of 0.
inline PanelIntegral integrate_gamma(GammaField& field, double a, double b, const Config& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  PanelIntegral r;
  if (a == b) return r;
  auto f = [&](double x) { return field.at(x).gamma; };
  const double tol = cfg.caloric.quad_rel_tol;
  r.value = gauss_kronrod<double, 15>::integrate(f, a, b, 8, tol, &r.error);
  if (!(r.error <= tol * std::max(std::abs(r.value), 1e-300))) {
    std::ostringstream os;
    os << "Gamma integral over [" << a << ", " << b << "] error " << r.error << " above tolerance";
    fail(ErrorKind::QuadratureNotConverged, os.str());
  }
  return r;
}

struct CaloricResult {
  double d1 = 0.0, d2 = 0.0, t_initial = 0.0;
  double delta_S = kNaN;
  double delta_t_paper = kNaN;
  double delta_t_isentrope = kNaN;
  double jump_contribution = 0.0;  // part of delta_t_paper from the d = 0 crossing
  double gamma_integral = 0.0;     // int Gamma dd including the crossing term
  double regular_integral = 0.0;   // int Gamma dd over the smooth pieces
  bool split = false;              // interval crosses d = 0
  double c_over_s_minus = kNaN;    // c/S at -d_eps (crossings only)
  double c_over_s_plus = kNaN;
  bool regime_flag = false;        // |c/S - 1| > 0.2 at the crossing
  double quad_error = 0.0;
  std::size_t nodes = 0;
};

/// Delta t = (t / (d2 - d1)) int_{d1}^{d2} Gamma(x, t) dx.
/// A crossing of d = 0 is split at +-d_eps; the piece across the gap is
/// ln[S(side of d2) / S(side of d1)], the integral of dln S/dd, which is
/// int Gamma when c = S.
inline CaloricResult delta_temperature_paper(double d1, double d2, double t, const Config& cfg,
                                             double h = 0.0) {
  CaloricResult r;
  r.d1 = d1;
  r.d2 = d2;
  r.t_initial = t;
  if (d1 == d2) {
    r.delta_S = r.delta_t_paper = 0.0;
    return r;
  }
  const double e = cfg.nlie.d_eps;
  const double a = proxy_endpoint(d1, d2, e), b = proxy_endpoint(d2, d1, e);
  GammaField field(t, h, cfg);
  if ((a > 0) == (b > 0)) {
    const auto p = integrate_gamma(field, a, b, cfg);
    r.regular_integral = p.value;
    r.quad_error = p.error;
    r.delta_S = delta_entropy(d1, d2, t, cfg, h);
  } else {
    r.split = true;
    const double sa = a > 0 ? e : -e, sb = b > 0 ? e : -e;
    const auto p1 = integrate_gamma(field, a, sa, cfg);
    const auto p2 = integrate_gamma(field, sb, b, cfg);
    r.regular_integral = p1.value + p2.value;
    r.quad_error = p1.error + p2.error;
    PointModel minus(-e, t, cfg), plus(e, t, cfg);
    const auto heat_m = specific_heat(minus, t, h), heat_p = specific_heat(plus, t, h);
    const double s_m = minus.entropy_at(t, h), s_p = plus.entropy_at(t, h);
    r.c_over_s_minus = heat_m.c / s_m;
    r.c_over_s_plus = heat_p.c / s_p;
    r.regime_flag = std::abs(r.c_over_s_minus - 1.0) > 0.2 || std::abs(r.c_over_s_plus - 1.0) > 0.2;
    const double jump = b > 0 ? std::log(s_p / s_m) : std::log(s_m / s_p);
    r.jump_contribution = t * jump / (d2 - d1);
    r.gamma_integral = jump;
    r.delta_S = entropy_at(b, t, h, cfg) - entropy_at(a, t, h, cfg);
  }
  r.gamma_integral += r.regular_integral;
  r.delta_t_paper = t * r.gamma_integral / (d2 - d1);
  r.nodes = field.evaluations();
  return r;
}

/// One row of the fig4a/fig4b datasets: a symmetric crossing [-dd/2, dd/2].
struct ProfileRow {
  double t = 0.0;
  double delta_d = 0.0;
  double delta_t = 0.0;
  double normalized = 0.0;  // dd * Delta t / t
  double jump = 0.0;        // ln S(+d_eps)/S(-d_eps)
  double regular = 0.0;
  double quad_error = 0.0;
};

/// Delta t for symmetric crossings with half-widths `half` (ascending, all >
/// d_eps), accumulated panel by panel so each Gamma node is evaluated once.
inline std::vector<ProfileRow> crossing_profile(double t, const std::vector<double>& half, const Config& cfg,
                                                double h = 0.0) {
  const double e = cfg.nlie.d_eps;
  GammaField field(t, h, cfg);
  const double jump = std::log(entropy_at(e, t, h, cfg) / entropy_at(-e, t, h, cfg));
  std::vector<ProfileRow> rows;
  double lo = e, acc = 0.0, err = 0.0;
  for (double b : half) {
    if (!(b > lo)) fail(ErrorKind::ConfigError, "profile half-widths must increase and exceed d_eps");
    const auto neg = integrate_gamma(field, -b, -lo, cfg);
    const auto pos = integrate_gamma(field, lo, b, cfg);
    acc += neg.value + pos.value;
    err += neg.error + pos.error;
    ProfileRow row;
    row.t = t;
    row.delta_d = 2.0 * b;
    row.jump = jump;
    row.regular = acc;
    row.delta_t = t * (acc + jump) / row.delta_d;
    row.normalized = row.delta_d * row.delta_t / t;
    row.quad_error = err;
    rows.push_back(row);
    lo = b;
  }
  return rows;
}

/// Follows the isentrope: solves S(d2, t2) = S(d1, t1) for t2 and returns
/// t2 - t1. Bracket search within [t1/100, 100 t1], then bisection-safeguarded
/// secant steps (Illinois variant) until |S(d2, t2) - S(d1, t1)| < 1e-8.
inline double delta_temperature_isentrope(double d1, double d2, double t1, const Config& cfg,
                                          double h = 0.0) {
  if (d1 == d2) return 0.0;
  const double e = cfg.nlie.d_eps;
  const double target = entropy_at(proxy_endpoint(d1, d2, e), t1, h, cfg);
  PointModel model(proxy_endpoint(d2, d1, e), t1 / 100.0, cfg);
  auto g = [&](double t) { return model.entropy_at(t, h) - target; };
  double ta = t1, ga = g(ta);
  if (std::abs(ga) < 1e-8) return 0.0;
  // S increases with t: move away from the sign of the mismatch.
  const double factor = ga < 0 ? 2.0 : 0.5;
  double tb = ta, gb = ga;
  while ((gb > 0) == (ga > 0)) {
    ta = tb;
    ga = gb;
    tb = ta * factor;
    if (tb > 100.0 * t1 * (1 + 1e-12) || tb < t1 / 100.0 * (1 - 1e-12)) {
      std::ostringstream os;
      os << "entropy " << target << " not reached at d = " << d2 << " within [t1/100, 100 t1]";
      fail(ErrorKind::NoBracket, os.str());
    }
    gb = g(tb);
  }
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double tc = (ta * gb - tb * ga) / (gb - ga);
    if (!(tc > std::min(ta, tb) && tc < std::max(ta, tb))) tc = 0.5 * (ta + tb);
    const double gc = g(tc);
    if (std::abs(gc) < 1e-8) return tc - t1;
    if ((gc > 0) == (gb > 0)) {
      tb = tc;
      gb = gc;
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      ta = tc;
      ga = gc;
      if (side == 1) gb *= 0.5;
      side = 1;
    }
    if (std::abs(tb - ta) < 1e-14 * t1) return 0.5 * (ta + tb) - t1;
  }
  fail(ErrorKind::NonConvergence, "isentrope root search did not converge");
}

enum class ExcursionSide { Negative, Positive, Crossing };

inline ExcursionSide excursion_side(double d1, double d2) {
  if (d1 <= 0.0 && d2 <= 0.0) return ExcursionSide::Negative;
  if (d1 >= 0.0 && d2 >= 0.0) return ExcursionSide::Positive;
  return ExcursionSide::Crossing;
}

/// Closed-form low-temperature estimates: t/(3|dd|) for two negative
/// endpoints, t/(3 dd) for two positive ones, t ln2 / dd across d = 0.
inline double asymptotic_caloric(double d1, double d2, double t) {
  const double dd = d2 - d1;
  if (dd == 0.0) return 0.0;
  switch (excursion_side(d1, d2)) {
    case ExcursionSide::Negative: return t / (3.0 * std::abs(dd));
    case ExcursionSide::Positive: return t / (3.0 * dd);
    case ExcursionSide::Crossing: break;
  }
  return t * std::log(2.0) / dd;
}

}  // namespace calorex

#endif  // CALOREX_CALORIC_HPP
