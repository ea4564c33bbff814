#ifndef CALOREX_VALIDATION_HPP
#define CALOREX_VALIDATION_HPP

// Oracle comparisons and invariant checks shared by `calorex validate` and the
// acceptance runner. Each check records what it measured; any library error
// inside a check turns into a failed check carrying the error text.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "calorex/caloric.hpp"
#include "calorex/config.hpp"
#include "calorex/nlie.hpp"
#include "calorex/oracle.hpp"
#include "calorex/sweep.hpp"
#include "calorex/thermo.hpp"

namespace calorex {

struct Check {
  std::string id;  // criterion group, e.g. "1"
  std::string name;
  bool pass = false;
  std::string measured;
  double seconds = 0.0;
};

using Report = std::vector<Check>;

namespace detail {

/// Runs `body`, which appends checks to `out`; a thrown Error or an
/// unexpected exception becomes one failed check named `name`.
inline void guarded(Report& out, const std::string& id, const std::string& name,
                    const std::function<void(Report&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t before = out.size();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.push_back({id, name, false, std::string("error: ") + e.what(), 0.0});
  }
  const double dt = seconds_since(t0);
  // Time is attributed to the last check of the group.
  if (out.size() > before) out.back().seconds = dt;
}

inline std::string kv(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& [k, v] : items) {
    if (!first) os << ' ';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

/// f_rel on an explicit grid.
inline double f_rel_on(const AnisotropyPoint& p, const SolverGrid& g, double t, double h, const Config& cfg) {
  const KernelTable kt = build_kernel_table(p, g);
  const auto aux = solve(p, ExternalConditions(t, h), g, kt, cfg.nlie);
  return free_energy_rel(aux, g, kt);
}

}  // namespace detail

// ------------------------------------------------------------ criterion 1

/// S and c at the XX point against the fermion closed form, after gating that
/// closed form against exact diagonalization.
inline Report check_free_fermion(const Config& cfg, const std::vector<double>& ts = {0.1, 0.5, 1.0}) {
  Report out;
  detail::guarded(out, "1", "free-fermion oracle vs ED (n=12, t=1)", [&](Report& r) {
    const auto ff = xx_free_fermion(1.0, 0.0);
    const auto ed = ed_thermo(ed_spectrum(12, Boundary::Periodic, 0.0, 0.0), 1.0);
    const double dS = std::abs(ff.S - ed.S), dc = std::abs(ff.c - ed.c);
    r.push_back({"1", "free-fermion oracle vs ED (n=12, t=1)", dS < 1e-4 && dc < 1e-4,
                 detail::kv({{"dS", dS}, {"dc", dc}})});
  });
  for (double t : ts) {
    std::ostringstream name;
    name << "free-fermion identity t=" << t;
    detail::guarded(out, "1", name.str(), [&](Report& r) {
      const auto ff = xx_free_fermion(t, 0.0);
      PointModel m(-1.0, t, cfg);
      const double S = m.entropy_at(t, 0.0);
      const double c = specific_heat(m, t, 0.0).c;
      const double dS = std::abs(S - ff.S), dc = std::abs(c - ff.c);
      r.push_back({"1", name.str(), dS < 1e-6 && dc < 1e-6, detail::kv({{"S", S}, {"dS", dS}, {"c", c}, {"dc", dc}})});
    });
  }
  return out;
}

// ------------------------------------------------------------ criterion 2

inline Report check_high_temperature(const Config& cfg) {
  Report out;
  for (double d : {-0.3, 0.3}) {
    std::ostringstream name;
    name << "S(t=1e4) = ln 2 at d=" << d;
    detail::guarded(out, "2", name.str(), [&](Report& r) {
      const double S = entropy_at(d, 1e4, 0.0, cfg);
      const double err = std::abs(S - std::log(2.0));
      r.push_back({"2", name.str(), err < 1e-4, detail::kv({{"S", S}, {"err", err}})});
    });
  }
  return out;
}

// ------------------------------------------------------------ criterion 3

inline Report check_ed_convergence(const Config& cfg, const std::vector<double>& deltas = {0.8, 1.5},
                                   double t = 1.0, const std::vector<int>& sizes = {8, 10, 12, 14}) {
  Report out;
  for (double delta : deltas) {
    std::ostringstream name;
    name << "NLIE vs ED entropy, Delta=" << delta << " t=" << t;
    detail::guarded(out, "3", name.str(), [&](Report& r) {
      const double S = entropy_at(delta - 1.0, t, 0.0, cfg);
      std::ostringstream m;
      m.precision(4);
      m << "S=" << std::setprecision(12) << S << std::setprecision(4);
      bool monotone = true;
      double prev = std::numeric_limits<double>::infinity(), last = prev;
      for (int n : sizes) {
        const double diff = std::abs(S - ed_thermo(ed_spectrum(n, Boundary::Periodic, delta, 0.0), t).S);
        m << " n" << n << '=' << diff;
        monotone = monotone && diff < prev;
        prev = last = diff;
      }
      r.push_back({"3", name.str(), monotone && last < 0.01, m.str()});
    });
  }
  return out;
}

// ------------------------------------------------------------ criterion 4

inline Report check_gamma_plateau(const Config& cfg, double t = 0.02) {
  Report out;
  for (double d : {-0.05, 0.05}) {
    std::ostringstream name;
    name << "Gamma = -1/3 at d=" << d << " t=" << t;
    detail::guarded(out, "4", name.str(), [&](Report& r) {
      const ThermoPoint p = evaluate_point(d, t, 0.0, cfg);
      const double err = detail::rel_err(p.gamma_d, -1.0 / 3.0);
      r.push_back({"4", name.str(), err <= 0.2, detail::kv({{"gamma", p.gamma_d}, {"rel_err", err}})});
    });
  }
  return out;
}

// ------------------------------------------------------------ criterion 5

/// Entropy ratio across d = 0 and the integral of Gamma over [-b, b].
inline Report check_entropy_jump(const Config& base, double t = 0.02, double d_eps = 1e-3, double b = 0.01) {
  Report out;
  Config cfg = base;
  cfg.nlie.d_eps = d_eps;
  detail::guarded(out, "5", "S(+d_eps)/S(-d_eps) = 2", [&](Report& r) {
    const double sp = entropy_at(d_eps, t, 0.0, cfg), sm = entropy_at(-d_eps, t, 0.0, cfg);
    const double ratio = sp / sm;
    r.push_back({"5", "S(+d_eps)/S(-d_eps) = 2", std::abs(ratio - 2.0) <= 0.5,
                 detail::kv({{"S_plus", sp}, {"S_minus", sm}, {"ratio", ratio}})});
  });
  detail::guarded(out, "5", "crossing integral of Gamma = ln 2", [&](Report& r) {
    const auto res = delta_temperature_paper(-b, b, t, cfg);
    const double err = detail::rel_err(res.gamma_integral, std::log(2.0));
    r.push_back({"5", "crossing integral of Gamma = ln 2", err <= 0.15,
                 detail::kv({{"integral", res.gamma_integral},
                             {"jump", res.gamma_integral - res.regular_integral},
                             {"rel_err", err}})});
  });
  return out;
}

// ------------------------------------------------------------ criterion 6

inline ProfileSpec fig4_check_spec() {
  ProfileSpec s;
  s.half_widths = {0.01, 0.025, 0.05, 0.1, 0.15};
  return s;
}

inline Report check_fig4(const Config& cfg, int jobs = 1) {
  Report out;
  detail::guarded(out, "6", "symmetric crossing profile", [&](Report& r) {
    const ProfileSpec spec = fig4_check_spec();
    const ProfileResult res = run_profile(spec, cfg, jobs);
    for (std::size_t i = 0; i < spec.t_list.size(); ++i)
      if (res.status[i] != "ok") fail(ErrorKind::NonConvergence, res.status[i]);
    auto at = [&](double t, double dd) {
      for (const auto& row : res.rows)
        if (row.t == t && std::abs(row.delta_d - dd) < 1e-12) return row;
      fail(ErrorKind::ConfigError, "profile row missing");
    };
    const double n01 = std::abs(at(0.1, 0.2).normalized), n10 = std::abs(at(1.0, 0.2).normalized);
    const bool in_band = n01 >= 0.6 && n01 <= 0.9 && n10 >= 0.6 && n10 <= 0.9;
    r.push_back({"6", "|dd*Dt/t| in [0.6, 0.9] at dd=0.2 for t=0.1 and 1.0", in_band,
                 detail::kv({{"t0.1", n01}, {"t1.0", n10}})});
    r.push_back({"6", "|dd*Dt/t| increases from t=0.1 to t=1.0", n10 > n01,
                 detail::kv({{"t0.1", n01}, {"t1.0", n10}})});
    std::ostringstream m;
    bool only_first = true;
    for (std::size_t i = 0; i < spec.t_list.size(); ++i) {
      const double t = spec.t_list[i];
      bool pos = false, neg = false;
      for (const auto& row : res.rows)
        if (row.t == t) (row.delta_t > 0 ? pos : neg) = true;
      const bool changes = pos && neg;
      m << "t" << t << (changes ? "=changes " : "=fixed ");
      only_first = only_first && (changes == (t == 0.1));
    }
    r.push_back({"6", "sign change of Dt for t=0.1 only", only_first, m.str()});
  });
  return out;
}

// ------------------------------------------------------------ criterion 7

inline Report check_gapped(const Config& cfg, double t = 0.05) {
  Report out;
  detail::guarded(out, "7", "gapped asymptote at Delta=2", [&](Report& r) {
    PointModel m(1.0, t, cfg);
    const double f = m.evaluate(t, 0.0).f_rel;
    const auto as = asymptote_gapped_af(std::acosh(2.0), t);
    const double err = detail::rel_err(f, as.f_rel);
    r.push_back({"7", "NLIE f_rel vs gapped series within 5%", err <= 0.05,
                 detail::kv({{"f_nlie", f}, {"f_series", as.f_rel}, {"rel_err", err}})});
    const double id = std::abs(as.elliptic.k * as.elliptic.k + as.elliptic.k_prime * as.elliptic.k_prime - 1.0);
    r.push_back({"7", "elliptic identity k^2 + k'^2 = 1", id < 1e-10, detail::kv({{"defect", id}})});
  });
  return out;
}

// ------------------------------------------------------------ criterion 8

inline Report check_fd_entropy(const Config& cfg) {
  Report out;
  const std::vector<std::pair<double, double>> pts{{-0.5, 0.25}, {-0.3, 1.0}, {-0.2, 0.5},
                                                   {0.3, 0.5},   {0.5, 0.25}, {1.0, 1.0}};
  for (auto [d, t] : pts) {
    std::ostringstream name;
    name << "analytic vs FD entropy d=" << d << " t=" << t;
    detail::guarded(out, "8", name.str(), [&](Report& r) {
      PointModel m(d, t, cfg);
      const double S = m.evaluate(t, 0.0).entropy;
      const double s = 1e-3 * t;
      auto central = [&](double e) { return -(m.evaluate(t + e, 0.0).f_rel - m.evaluate(t - e, 0.0).f_rel) / (2 * e); };
      const double fd = (4.0 * central(s) - central(2 * s)) / 3.0;
      const double diff = std::abs(S - fd);
      r.push_back({"8", name.str(), diff < 1e-6, detail::kv({{"S", S}, {"S_fd", fd}, {"diff", diff}})});
    });
  }
  return out;
}

inline Report check_refinement(const Config& cfg) {
  Report out;
  for (double delta : {0.5, 1.5})
    for (double t : {0.25, 1.0}) {
      std::ostringstream tag;
      tag << "Delta=" << delta << " t=" << t;
      detail::guarded(out, "8", "refinement " + tag.str(), [&](Report& r) {
        const AnisotropyPoint p = from_deviation(delta - 1.0, cfg.nlie.delta_max);
        const SolverGrid g = build_grid(p, t, cfg.nlie);
        const double f0 = detail::f_rel_on(p, g, t, 0.0, cfg);
        Config fine = cfg;
        fine.nlie.n_points = 2 * g.n_points;
        const double fn = detail::f_rel_on(p, build_grid(p, t, fine.nlie), t, 0.0, cfg);
        const double dn = std::abs(fn - f0);
        r.push_back({"8", "n_points doubling " + tag.str(), dn < 1e-9, detail::kv({{"f_rel", f0}, {"change", dn}})});
        if (!g.periodic()) {
          const double fl = detail::f_rel_on(p, rescaled_grid(g, 1.5, cfg.nlie.pad_factor), t, 0.0, cfg);
          const double dl = std::abs(fl - f0);
          r.push_back({"8", "L x1.5 " + tag.str(), dl < 1e-9, detail::kv({{"change", dl}})});
        }
        Config half = cfg;
        half.nlie.eps_shift_fraction = 0.5 * cfg.nlie.eps_shift_fraction;
        const double fe = detail::f_rel_on(p, build_grid(p, t, half.nlie), t, 0.0, half);
        const double de = std::abs(fe - f0);
        r.push_back({"8", "eps halving " + tag.str(), de < 1e-8, detail::kv({{"change", de}})});
      });
    }
  return out;
}

inline Report check_determinism(const Config& cfg) {
  Report out;
  detail::guarded(out, "8", "bit-identical auxiliary functions", [&](Report& r) {
    const AnisotropyPoint p = from_deviation(-0.4, cfg.nlie.delta_max);
    const SolverGrid g = build_grid(p, 0.5, cfg.nlie);
    const KernelTable kt = build_kernel_table(p, g);
    const auto a = solve(p, ExternalConditions(0.5, 0.1), g, kt, cfg.nlie);
    const auto b = solve(p, ExternalConditions(0.5, 0.1), g, kt, cfg.nlie);
    const bool same = a.ln_a.size() == b.ln_a.size() &&
                      std::memcmp(a.ln_a.data(), b.ln_a.data(), a.ln_a.size() * sizeof(cplx)) == 0 &&
                      std::memcmp(a.ln_abar.data(), b.ln_abar.data(), a.ln_abar.size() * sizeof(cplx)) == 0;
    r.push_back({"8", "bit-identical auxiliary functions", same, same ? "identical" : "differs"});
  });
  detail::guarded(out, "8", "byte-identical sweep CSV", [&](Report& r) {
    SweepSpec s;
    s.d_min = -0.2;
    s.d_max = 0.2;
    s.d_steps = 3;
    s.t_list = {0.5, 1.0};
    std::ostringstream a, b;
    write_sweep_csv(a, run_sweep(s, cfg, 1));
    write_sweep_csv(b, run_sweep(s, cfg, 2));
    r.push_back({"8", "byte-identical sweep CSV", a.str() == b.str(),
                 a.str() == b.str() ? "identical (jobs 1 vs 2)" : "differs"});
  });
  return out;
}

inline Report check_field_symmetry(const Config& cfg) {
  Report out;
  for (double d : {-0.5, 0.5}) {
    std::ostringstream name;
    name << "f_rel(h) = f_rel(-h) at d=" << d;
    detail::guarded(out, "8", name.str(), [&](Report& r) {
      PointModel m(d, 0.5, cfg);
      const double fp = m.evaluate(0.5, 0.2).f_rel, fm = m.evaluate(0.5, -0.2).f_rel;
      const double diff = std::abs(fp - fm);
      r.push_back({"8", name.str(), diff < 1e-10, detail::kv({{"f_rel", fp}, {"diff", diff}})});
    });
  }
  return out;
}

inline Report check_properties(const Config& cfg) {
  Report out;
  for (auto part : {check_fd_entropy(cfg), check_refinement(cfg), check_determinism(cfg), check_field_symmetry(cfg)})
    out.insert(out.end(), part.begin(), part.end());
  return out;
}

// ------------------------------------------------------------ suites

inline void append(Report& to, const Report& from) { to.insert(to.end(), from.begin(), from.end()); }

/// quick: fermion identity, high-t limit, field symmetry.
inline Report run_quick_suite(const Config& cfg) {
  Report r;
  append(r, check_free_fermion(cfg));
  append(r, check_high_temperature(cfg));
  append(r, check_field_symmetry(cfg));
  return r;
}

inline Report run_full_suite(const Config& cfg, int jobs = 1) {
  Report r;
  append(r, check_free_fermion(cfg));
  append(r, check_high_temperature(cfg));
  append(r, check_ed_convergence(cfg));
  append(r, check_gamma_plateau(cfg));
  append(r, check_entropy_jump(cfg));
  append(r, check_fig4(cfg, jobs));
  append(r, check_gapped(cfg));
  append(r, check_properties(cfg));
  return r;
}

inline bool all_pass(const Report& r) {
  for (const auto& c : r)
    if (!c.pass) return false;
  return !r.empty();
}

inline std::string format_check(const Check& c) {
  std::ostringstream os;
  os.precision(3);
  os << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " :: " << c.measured;
  if (c.seconds > 0) os << " (" << std::fixed << c.seconds << " s)";
  return os.str();
}

}  // namespace calorex

#endif  // CALOREX_VALIDATION_HPP
