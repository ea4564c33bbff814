// calorex: command-line front end (solve, sweep, caloric, validate, figures).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calorex/calorex.hpp"

namespace {

using calorex::Config;
using calorex::Error;
using calorex::ErrorKind;
using calorex::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::OutOfSupportedRange:
    case ErrorKind::DegenerateRegime:
    case ErrorKind::RegimeViolation:
    case ErrorKind::SizeTooLarge:
    case ErrorKind::ShiftTooLarge:
    case ErrorKind::StencilCrossesCriticalPoint:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

struct Globals {
  std::string config_path;
  std::vector<std::string> sets;
  int jobs = calorex::default_jobs();
};

Config load_config(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv("CALOREX_CONFIG")) path = env;
  Config cfg = path.empty() ? Config{} : Config::from_file(path);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) calorex::fail(ErrorKind::ConfigError, "--set expects key=value, got '" + kv + "'");
    cfg.set(calorex::detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
  return cfg;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) calorex::fail(ErrorKind::ConfigError, "cannot write '" + path + "'");
  os << j.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) calorex::fail(ErrorKind::ConfigError, "cannot write '" + path + "'");
  return os;
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
  std::optional<double> delta, d;
  double t = 0.0, h = 0.0;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  const Config cfg = load_config(g);
  if (a.delta.has_value() == a.d.has_value())
    calorex::fail(ErrorKind::ConfigError, "give exactly one of --delta or --d");
  const double d = a.d ? *a.d : *a.delta - 1.0;
  if (std::abs(d) < cfg.nlie.d_eps * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "d = " << d << " lies inside the excluded window |d| < nlie.d_eps = " << cfg.nlie.d_eps
       << " around the isotropic point Delta = 1. Limits d -> 0+- are evaluated at d = +-nlie.d_eps: run with --d "
       << cfg.nlie.d_eps << " or --d " << -cfg.nlie.d_eps << " (or change nlie.d_eps with --set).";
    calorex::fail(ErrorKind::DegenerateRegime, os.str());
  }
  json rec;
  rec["command"] = "solve";
  rec["version"] = calorex::kVersion;
  rec["delta"] = d + 1.0;
  rec["d"] = d;
  rec["t"] = a.t;
  rec["h"] = a.h;
  rec["config"] = calorex::config_json(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto p = calorex::evaluate_point(d, a.t, a.h, cfg);
    rec["regime"] = calorex::to_string(calorex::from_deviation(d, cfg.nlie.delta_max).regime_tag());
    rec["f_rel"] = p.f_rel;
    rec["entropy"] = p.entropy;
    rec["specific_heat"] = p.specific_heat;
    rec["alpha_d"] = p.alpha_d;
    rec["gamma_d"] = p.gamma_d;
    rec["nematic_b"] = p.nematic_b;
    rec["diagnostics"] = calorex::diagnostics_json(p.diagnostics);
    rec["status"] = "ok";
  } catch (const Error& e) {
    if (exit_code(e.kind()) == kExitConfig) throw;
    rec["status"] = std::string(calorex::to_string(e.kind()));
    rec["message"] = e.what();
    rec["residual_history"] = e.residual_history();
    rec["wall_seconds"] = calorex::detail::seconds_since(t0);
    std::cout << rec.dump() << std::endl;
    return exit_code(e.kind());
  }
  rec["wall_seconds"] = calorex::detail::seconds_since(t0);
  std::cout << rec.dump() << std::endl;
  return kExitOk;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  calorex::SweepSpec spec;
  std::string out, manifest, from_manifest;
};

int run_and_write_sweep(const calorex::SweepSpec& spec, const Config& cfg, int jobs, const std::string& out,
                        std::string manifest) {
  if (manifest.empty()) manifest = out + ".manifest.json";
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = calorex::run_sweep(spec, cfg, jobs);
  const double wall = calorex::detail::seconds_since(t0);
  {
    auto os = open_out(out);
    calorex::write_sweep_csv(os, rows);
  }
  write_json_file(manifest, calorex::sweep_manifest(spec, cfg, rows, jobs, wall,
                                                    std::filesystem::path(out).filename().string()));
  const auto failed = calorex::failed_rows(rows);
  json summary = {{"command", "sweep"}, {"csv", out},           {"manifest", manifest},
                  {"rows", rows.size()}, {"failed_rows", failed}, {"wall_seconds", wall}};
  std::cout << summary.dump() << std::endl;
  return failed ? kExitNumerical : kExitOk;
}

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  if (!a.from_manifest.empty()) {
    std::ifstream is(a.from_manifest);
    if (!is) calorex::fail(ErrorKind::ConfigError, "cannot open manifest '" + a.from_manifest + "'");
    json m;
    try {
      m = json::parse(is);
    } catch (const json::exception& e) {
      calorex::fail(ErrorKind::ConfigError, std::string("manifest is not valid JSON: ") + e.what());
    }
    return run_and_write_sweep(calorex::sweep_spec_from_json(m.at("spec")), calorex::config_from_json(m.at("config")),
                               g.jobs, a.out, a.manifest);
  }
  return run_and_write_sweep(a.spec, load_config(g), g.jobs, a.out, a.manifest);
}

// ---------------------------------------------------------------- caloric

struct CaloricArgs {
  double d1 = 0.0, d2 = 0.0, t = 0.0, h = 0.0;
  std::string method = "paper";
};

int cmd_caloric(const Globals& g, const CaloricArgs& a) {
  const Config cfg = load_config(g);
  json rec;
  rec["command"] = "caloric";
  rec["version"] = calorex::kVersion;
  rec["d1"] = a.d1;
  rec["d2"] = a.d2;
  rec["t"] = a.t;
  rec["h"] = a.h;
  rec["method"] = a.method;
  rec["config"] = calorex::config_json(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (a.method == "paper" || a.method == "both") {
      const auto r = calorex::delta_temperature_paper(a.d1, a.d2, a.t, cfg, a.h);
      rec["delta_S"] = r.delta_S;
      rec["delta_t_paper"] = r.delta_t_paper;
      rec["gamma_integral"] = r.gamma_integral;
      rec["regular_integral"] = r.regular_integral;
      rec["jump_contribution"] = r.jump_contribution;
      rec["split"] = r.split;
      rec["c_over_s_minus"] = r.c_over_s_minus;
      rec["c_over_s_plus"] = r.c_over_s_plus;
      rec["regime_flag"] = r.regime_flag;
      rec["quad_error"] = r.quad_error;
      rec["gamma_nodes"] = r.nodes;
    }
    if (a.method == "isentrope" || a.method == "both") {
      rec["delta_t_isentrope"] = calorex::delta_temperature_isentrope(a.d1, a.d2, a.t, cfg, a.h);
      if (!rec.contains("delta_S")) rec["delta_S"] = calorex::delta_entropy(a.d1, a.d2, a.t, cfg, a.h);
    }
    rec["delta_t_asymptotic"] = calorex::asymptotic_caloric(a.d1, a.d2, a.t);
    rec["status"] = "ok";
  } catch (const Error& e) {
    if (exit_code(e.kind()) == kExitConfig) throw;
    rec["status"] = std::string(calorex::to_string(e.kind()));
    rec["message"] = e.what();
    code = exit_code(e.kind());
  }
  rec["wall_seconds"] = calorex::detail::seconds_since(t0);
  std::cout << rec.dump() << std::endl;
  return code;
}

// --------------------------------------------------------------- validate

int cmd_validate(const Globals& g, const std::string& suite) {
  const Config cfg = load_config(g);
  const auto t0 = std::chrono::steady_clock::now();
  const calorex::Report report = suite == "full" ? calorex::run_full_suite(cfg, g.jobs) : calorex::run_quick_suite(cfg);
  for (const auto& c : report) std::cout << calorex::format_check(c) << '\n';
  std::size_t failed = 0;
  for (const auto& c : report) failed += c.pass ? 0 : 1;
  std::cout << (failed ? "FAIL" : "PASS") << " suite=" << suite << " checks=" << report.size()
            << " failed=" << failed << " wall_seconds=" << calorex::detail::seconds_since(t0) << std::endl;
  return failed ? kExitValidation : kExitOk;
}

// ---------------------------------------------------------------- figures

struct FigureArgs {
  std::string preset = "all";
  std::string out_dir = ".";
  calorex::SweepSpec sweep;
};

int cmd_figures(const Globals& g, const FigureArgs& a) {
  const Config cfg = load_config(g);
  std::vector<std::string> wanted;
  if (a.preset == "all") {
    wanted = calorex::figure_presets();
  } else {
    calorex::require_preset(a.preset);
    wanted = {a.preset};
  }
  std::filesystem::create_directories(a.out_dir);
  auto path = [&](const std::string& name, const char* ext) {
    return (std::filesystem::path(a.out_dir) / (name + ext)).string();
  };
  int code = kExitOk;
  std::optional<std::vector<calorex::SweepRow>> rows;
  double sweep_wall = 0.0;
  std::optional<calorex::ProfileResult> profile;
  double profile_wall = 0.0;
  const calorex::ProfileSpec pspec;
  for (const auto& name : wanted) {
    if (calorex::preset_is_profile(name)) {
      if (!profile) {
        const auto t0 = std::chrono::steady_clock::now();
        profile = calorex::run_profile(pspec, cfg, g.jobs);
        profile_wall = calorex::detail::seconds_since(t0);
      }
      const bool normalized = name == "fig4b";
      {
        auto os = open_out(path(name, ".csv"));
        calorex::write_profile_csv(os, profile->rows, normalized);
      }
      write_json_file(path(name, ".manifest.json"),
                      calorex::profile_manifest(pspec, cfg, *profile, g.jobs, profile_wall, name + ".csv", normalized));
      for (const auto& s : profile->status)
        if (s != "ok") code = kExitNumerical;
    } else {
      if (!rows) {
        const auto t0 = std::chrono::steady_clock::now();
        rows = calorex::run_sweep(a.sweep, cfg, g.jobs);
        sweep_wall = calorex::detail::seconds_since(t0);
      }
      {
        auto os = open_out(path(name, ".csv"));
        calorex::write_sweep_csv(os, *rows);
      }
      json m = calorex::sweep_manifest(a.sweep, cfg, *rows, g.jobs, sweep_wall, name + ".csv");
      m["preset"] = name;
      write_json_file(path(name, ".manifest.json"), m);
      if (calorex::failed_rows(*rows)) code = kExitNumerical;
    }
    std::cout << json{{"command", "figures"}, {"preset", name}, {"csv", path(name, ".csv")}}.dump() << std::endl;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calorex: finite-temperature thermodynamics and caloric response of the XXZ chain"};
  // --h is the field, so help is long-form only
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "flat key = value config file (default: $CALOREX_CONFIG)");
  app.add_option("--set", g.sets, "override one config key, key=value (repeatable)")->allow_extra_args(false);
  app.add_option("--jobs", g.jobs, "worker threads for sweeps and profiles")->check(CLI::PositiveNumber);

  SolveArgs solve;
  auto* sc = app.add_subcommand("solve", "all observables at one (Delta, t, h)");
  sc->add_option("--delta", solve.delta, "anisotropy Delta in [0, delta_max]");
  sc->add_option("--d", solve.d, "deviation d = Delta - 1 (alternative to --delta)");
  sc->add_option("--t", solve.t, "temperature t = T/J")->required();
  sc->add_option("--h", solve.h, "field h");

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "(d, t) grid to CSV with a JSON manifest");
  sw->add_option("--d-min", sweep.spec.d_min);
  sw->add_option("--d-max", sweep.spec.d_max);
  sw->add_option("--d-steps", sweep.spec.d_steps);
  sw->add_option("--t-list", sweep.spec.t_list, "comma-separated temperatures")->delimiter(',');
  sw->add_option("--h", sweep.spec.h);
  sw->add_option("--out", sweep.out, "CSV path")->required();
  sw->add_option("--manifest", sweep.manifest, "manifest path (default: <out>.manifest.json)");
  sw->add_option("--from-manifest", sweep.from_manifest, "rerun the spec and config recorded in a manifest");

  CaloricArgs cal;
  auto* ca = app.add_subcommand("caloric", "temperature change for an adiabatic excursion d1 -> d2");
  ca->add_option("--d1", cal.d1)->required();
  ca->add_option("--d2", cal.d2)->required();
  ca->add_option("--t", cal.t)->required();
  ca->add_option("--h", cal.h);
  ca->add_option("--method", cal.method)->check(CLI::IsMember({"paper", "isentrope", "both"}));

  std::string suite = "quick";
  auto* va = app.add_subcommand("validate", "oracle and invariant checks");
  va->add_option("--suite", suite)->check(CLI::IsMember({"quick", "full"}));

  FigureArgs fig;
  auto* fi = app.add_subcommand("figures", "figure datasets: fig1, fig2, fig3, fig4a, fig4b or all");
  fi->add_option("--preset", fig.preset);
  fi->add_option("--out-dir", fig.out_dir);
  fi->add_option("--d-min", fig.sweep.d_min);
  fi->add_option("--d-max", fig.sweep.d_max);
  fi->add_option("--d-steps", fig.sweep.d_steps);
  fi->add_option("--t-list", fig.sweep.t_list)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sc) return cmd_solve(g, solve);
    if (*sw) return cmd_sweep(g, sweep);
    if (*ca) return cmd_caloric(g, cal);
    if (*va) return cmd_validate(g, suite);
    if (*fi) return cmd_figures(g, fig);
  } catch (const Error& e) {
    std::cerr << "calorex: " << e.what() << std::endl;
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "calorex: malformed manifest: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "calorex: " << e.what() << std::endl;
    return kExitNumerical;
  }
  return kExitOk;
}
