#ifndef CALOREX_SWEEP_HPP
#define CALOREX_SWEEP_HPP

// (d, t) sweeps and crossing profiles with CSV output and a JSON manifest.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "calorex/caloric.hpp"
#include "calorex/config.hpp"
#include "calorex/thermo.hpp"
#include "calorex/version.hpp"
#include "json.hpp"

namespace calorex {

using json = nlohmann::json;

struct SweepSpec {
  double d_min = -0.5;
  double d_max = 1.0;
  int d_steps = 121;
  std::vector<double> t_list{0.1, 0.25, 0.5, 0.75, 1.0};
  double h = 0.0;
};

struct ProfileSpec {
  std::vector<double> t_list{0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> half_widths{0.01, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15};
  double h = 0.0;
};

inline const std::vector<std::string>& figure_presets() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4a", "fig4b"};
  return names;
}

/// fig1..fig3 share one (d, t) sweep; fig4a/fig4b share one crossing profile.
inline bool preset_is_profile(const std::string& name) { return name == "fig4a" || name == "fig4b"; }

inline void require_preset(const std::string& name) {
  if (std::find(figure_presets().begin(), figure_presets().end(), name) == figure_presets().end())
    fail(ErrorKind::ConfigError, "unknown figure preset '" + name + "' (fig1, fig2, fig3, fig4a, fig4b)");
}

enum class RowBranch { Regular, Minus, Plus, Excluded };

constexpr const char* to_string(RowBranch b) noexcept {
  switch (b) {
    case RowBranch::Regular: return "regular";
    case RowBranch::Minus: return "minus";
    case RowBranch::Plus: return "plus";
    case RowBranch::Excluded: return "excluded";
  }
  return "regular";
}

struct SweepRow {
  double d = 0.0, t = 0.0;
  double S = kNaN, c = kNaN, alpha = kNaN, gamma = kNaN;
  RowBranch branch = RowBranch::Regular;
  double residual = kNaN;
  std::string status = "ok";  // "ok", "skipped" or the error kind
  std::string message;
  ThermoDiagnostics diagnostics;
  double wall_seconds = 0.0;
};

namespace detail {

/// d values of one temperature row, ascending, with the branch rows at
/// -+d_eps placed around d = 0 when the range straddles it.
inline std::vector<std::pair<double, RowBranch>> row_layout(const SweepSpec& s, double d_eps) {
  if (s.d_steps < 2 || !(s.d_max > s.d_min))
    fail(ErrorKind::ConfigError, "sweep needs d_max > d_min and at least 2 d steps");
  std::vector<std::pair<double, RowBranch>> out;
  const bool straddles = s.d_min < 0.0 && s.d_max > 0.0;
  bool inserted = false;
  auto insert_minus = [&] {
    if (straddles && !inserted) {
      out.emplace_back(-d_eps, RowBranch::Minus);
      inserted = true;
    }
  };
  bool plus_done = false;
  for (int k = 0; k < s.d_steps; ++k) {
    const double d = s.d_min + (s.d_max - s.d_min) * k / (s.d_steps - 1);
    if (std::abs(d) < d_eps) {
      insert_minus();
      out.emplace_back(d, RowBranch::Excluded);
      continue;
    }
    if (d > 0.0) {
      insert_minus();
      if (straddles && !plus_done) {
        out.emplace_back(d_eps, RowBranch::Plus);
        plus_done = true;
      }
    }
    out.emplace_back(d, RowBranch::Regular);
  }
  return out;
}

/// Runs `n` independent tasks on `jobs` threads; task i writes only slot i.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

inline SweepRow evaluate_row(double d, double t, double h, RowBranch branch, const Config& cfg) {
  SweepRow r;
  r.d = d;
  r.t = t;
  r.branch = branch;
  if (branch == RowBranch::Excluded) {
    r.status = "skipped";
    r.message = "|d| < nlie.d_eps; see the minus/plus rows";
    return r;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ThermoPoint p = evaluate_point(d, t, h, cfg);
    r.S = p.entropy;
    r.c = p.specific_heat;
    r.alpha = p.alpha_d;
    r.gamma = p.gamma_d;
    r.residual = p.diagnostics.residual;
    r.diagnostics = p.diagnostics;
  } catch (const Error& e) {
    r.status = std::string(to_string(e.kind()));
    r.message = e.what();
    if (!e.residual_history().empty()) r.residual = e.residual_history().back();
  }
  r.wall_seconds = detail::seconds_since(t0);
  return r;
}

/// All rows, temperature-major in the order of `t_list`, ascending d within a
/// temperature. Each temperature row is one task.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Config& cfg, int jobs = 1) {
  if (spec.t_list.empty()) fail(ErrorKind::ConfigError, "sweep needs at least one temperature");
  for (double t : spec.t_list)
    if (!(t > 0.0)) fail(ErrorKind::ConfigError, "sweep temperatures must be > 0");
  const auto layout = detail::row_layout(spec, cfg.nlie.d_eps);
  std::vector<std::vector<SweepRow>> per_t(spec.t_list.size());
  detail::parallel_for(spec.t_list.size(), jobs, [&](std::size_t i) {
    const double t = spec.t_list[i];
    for (const auto& [d, b] : layout) per_t[i].push_back(evaluate_row(d, t, spec.h, b, cfg));
  });
  std::vector<SweepRow> rows;
  for (auto& v : per_t) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

inline std::size_t failed_rows(const std::vector<SweepRow>& rows) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok" && r.status != "skipped"; }));
}

inline constexpr const char* kSweepHeader = "d,t,S,c,alpha,gamma,branch,residual";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  using detail::fmt17;
  os << kSweepHeader << '\n';
  for (const auto& r : rows)
    os << fmt17(r.d) << ',' << fmt17(r.t) << ',' << fmt17(r.S) << ',' << fmt17(r.c) << ','
       << fmt17(r.alpha) << ',' << fmt17(r.gamma) << ',' << to_string(r.branch) << ','
       << fmt17(r.residual) << '\n';
}

inline json config_json(const Config& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.snapshot()) j[k] = v;
  return j;
}

inline Config config_from_json(const json& j) {
  Config cfg;
  for (const auto& [k, v] : j.items()) cfg.set(k, v.get<std::string>());
  return cfg;
}

inline json diagnostics_json(const ThermoDiagnostics& d) {
  return {{"residual", d.residual},
          {"iterations", d.iterations},
          {"deriv_residual", d.deriv_residual},
          {"dt_step", d.dt_step},
          {"dd_step", d.dd_step},
          {"stencil", d.stencil},
          {"n_points", d.n_points},
          {"half_width", d.half_width},
          {"eps_shift", d.eps_shift},
          {"grid_rule", d.grid_rule},
          {"notes", d.notes}};
}

inline json sweep_spec_json(const SweepSpec& s) {
  return {{"d_min", s.d_min}, {"d_max", s.d_max}, {"d_steps", s.d_steps}, {"t_list", s.t_list}, {"h", s.h}};
}

inline SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec s;
  s.d_min = j.at("d_min").get<double>();
  s.d_max = j.at("d_max").get<double>();
  s.d_steps = j.at("d_steps").get<int>();
  s.t_list = j.at("t_list").get<std::vector<double>>();
  s.h = j.at("h").get<double>();
  return s;
}

/// Manifest for one sweep. Row i of the manifest describes CSV data row i.
inline json sweep_manifest(const SweepSpec& spec, const Config& cfg, const std::vector<SweepRow>& rows,
                           int jobs, double wall_seconds, const std::string& csv_name) {
  json m;
  m["tool"] = "calorex";
  m["version"] = kVersion;
  m["kind"] = "sweep";
  m["csv"] = csv_name;
  m["columns"] = kSweepHeader;
  m["spec"] = sweep_spec_json(spec);
  m["config"] = config_json(cfg);
  m["jobs"] = jobs;
  m["wall_seconds"] = wall_seconds;
  m["failed_rows"] = failed_rows(rows);
  json arr = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    json e = {{"row", i},
              {"d", r.d},
              {"t", r.t},
              {"branch", to_string(r.branch)},
              {"status", r.status},
              {"wall_seconds", r.wall_seconds}};
    if (!r.message.empty()) e["message"] = r.message;
    if (r.status == "ok") e["diagnostics"] = diagnostics_json(r.diagnostics);
    arr.push_back(std::move(e));
  }
  m["rows"] = std::move(arr);
  return m;
}

// ------------------------------------------------------------ profiles

struct ProfileResult {
  std::vector<ProfileRow> rows;
  std::vector<std::string> status;  // per temperature
  std::vector<double> wall_seconds;
  std::vector<std::size_t> nodes;
};

inline ProfileResult run_profile(const ProfileSpec& spec, const Config& cfg, int jobs = 1) {
  const std::size_t nt = spec.t_list.size();
  std::vector<std::vector<ProfileRow>> per_t(nt);
  ProfileResult out;
  out.status.assign(nt, "ok");
  out.wall_seconds.assign(nt, 0.0);
  out.nodes.assign(nt, 0);
  detail::parallel_for(nt, jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const double t = spec.t_list[i];
    try {
      per_t[i] = crossing_profile(t, spec.half_widths, cfg, spec.h);
    } catch (const Error& e) {
      out.status[i] = e.what();
      for (double b : spec.half_widths) {
        ProfileRow r;
        r.t = t;
        r.delta_d = 2.0 * b;
        r.delta_t = r.normalized = r.jump = r.regular = r.quad_error = kNaN;
        per_t[i].push_back(r);
      }
    }
    out.wall_seconds[i] = detail::seconds_since(t0);
  });
  for (auto& v : per_t) out.rows.insert(out.rows.end(), v.begin(), v.end());
  return out;
}

inline constexpr const char* kFig4aHeader = "t,delta_d,delta_t,jump,regular,quad_error";
inline constexpr const char* kFig4bHeader = "t,delta_d,normalized";

/// fig4a: Delta t against the crossing width; fig4b: dd * Delta t / t.
inline void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows, bool normalized) {
  using detail::fmt17;
  os << (normalized ? kFig4bHeader : kFig4aHeader) << '\n';
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << fmt17(r.delta_d) << ',';
    if (normalized)
      os << fmt17(r.normalized) << '\n';
    else
      os << fmt17(r.delta_t) << ',' << fmt17(r.jump) << ',' << fmt17(r.regular) << ',' << fmt17(r.quad_error)
         << '\n';
  }
}

inline json profile_manifest(const ProfileSpec& spec, const Config& cfg, const ProfileResult& res, int jobs,
                             double wall_seconds, const std::string& csv_name, bool normalized) {
  json m;
  m["tool"] = "calorex";
  m["version"] = kVersion;
  m["kind"] = normalized ? "fig4b" : "fig4a";
  m["csv"] = csv_name;
  m["columns"] = normalized ? kFig4bHeader : kFig4aHeader;
  m["spec"] = {{"t_list", spec.t_list}, {"half_widths", spec.half_widths}, {"h", spec.h}};
  m["config"] = config_json(cfg);
  m["jobs"] = jobs;
  m["wall_seconds"] = wall_seconds;
  json per = json::array();
  for (std::size_t i = 0; i < spec.t_list.size(); ++i)
    per.push_back({{"t", spec.t_list[i]}, {"status", res.status[i]}, {"wall_seconds", res.wall_seconds[i]}});
  m["temperatures"] = std::move(per);
  json arr = json::array();
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    arr.push_back({{"row", i}, {"t", r.t}, {"delta_d", r.delta_d}, {"quad_error", r.quad_error}});
  }
  m["rows"] = std::move(arr);
  return m;
}

}  // namespace calorex

#endif  // CALOREX_SWEEP_HPP
