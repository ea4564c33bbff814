#ifndef CALOREX_CONFIG_HPP
#define CALOREX_CONFIG_HPP

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "calorex/error.hpp"

namespace calorex {

struct SolverConfig {
  std::size_t n_points = 4096;     // minimum; raised automatically to meet resolution
  double tol = 1e-12;              // sup-norm defect of the discretized equations
  int max_iter = 1000;
  double damping = 0.5;
  double d_eps = 1e-3;             // proxy distance used for "d = 0+-" quantities
  double d_floor = 1e-6;           // solver refuses |d| below this
  double eps_shift_fraction = 0.5; // contour shift eps = fraction * (theta or phi)
  std::size_t pad_factor = 2;
  std::size_t max_points = std::size_t{1} << 20;
  double delta_max = 3.0;
  std::string kernel_cache;        // directory for cached kernel tables; empty = off
};

struct ThermoConfig {
  double dt_fraction = 1e-3;
  double dd_step = 1e-3;
  bool richardson = true;
};

struct CaloricConfig {
  double quad_rel_tol = 1e-4;
  int max_nodes = 512;
};

struct Config {
  SolverConfig nlie;
  ThermoConfig thermo;
  CaloricConfig caloric;

  /// Applies one dotted key. Unknown keys and unparsable values are ConfigError.
  void set(const std::string& key, const std::string& value);

  /// All keys with their current values, in a stable order.
  std::map<std::string, std::string> snapshot() const;

  /// Parses a flat `key = value` file; `#` starts a comment.
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);
};

namespace detail {

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  while (!s.empty() && !not_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && !not_space(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    fail(ErrorKind::ConfigError, "key '" + key + "': cannot parse '" + v + "' as a number");
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(ErrorKind::ConfigError, "key '" + key + "': cannot parse '" + v + "' as an integer");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorKind::ConfigError, "key '" + key + "': cannot parse '" + v + "' as a boolean");
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

inline void Config::set(const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  auto positive_count = [&](long long n) {
    if (n <= 0) fail(ErrorKind::ConfigError, "key '" + key + "' must be positive");
    return static_cast<std::size_t>(n);
  };
  if (key == "nlie.n_points") nlie.n_points = positive_count(detail::parse_int(key, v));
  else if (key == "nlie.tol") nlie.tol = detail::parse_double(key, v);
  else if (key == "nlie.max_iter") nlie.max_iter = static_cast<int>(positive_count(detail::parse_int(key, v)));
  else if (key == "nlie.damping") nlie.damping = detail::parse_double(key, v);
  else if (key == "nlie.d_eps") nlie.d_eps = detail::parse_double(key, v);
  else if (key == "nlie.d_floor") nlie.d_floor = detail::parse_double(key, v);
  else if (key == "nlie.eps_shift_fraction") nlie.eps_shift_fraction = detail::parse_double(key, v);
  else if (key == "nlie.pad_factor") nlie.pad_factor = positive_count(detail::parse_int(key, v));
  else if (key == "nlie.max_points") nlie.max_points = positive_count(detail::parse_int(key, v));
  else if (key == "nlie.delta_max") nlie.delta_max = detail::parse_double(key, v);
  else if (key == "nlie.kernel_cache") nlie.kernel_cache = v;
  else if (key == "thermo.dt_fraction") thermo.dt_fraction = detail::parse_double(key, v);
  else if (key == "thermo.dd_step") thermo.dd_step = detail::parse_double(key, v);
  else if (key == "thermo.richardson") thermo.richardson = detail::parse_bool(key, v);
  else if (key == "caloric.quad_rel_tol") caloric.quad_rel_tol = detail::parse_double(key, v);
  else if (key == "caloric.max_nodes") caloric.max_nodes = static_cast<int>(positive_count(detail::parse_int(key, v)));
  else fail(ErrorKind::ConfigError, "unknown configuration key '" + key + "'");

  if (!(nlie.tol > 0.0)) fail(ErrorKind::ConfigError, "nlie.tol must be > 0");
  if (!(nlie.damping > 0.0)) fail(ErrorKind::ConfigError, "nlie.damping must be > 0");
  if (!(nlie.d_eps > 0.0) || !(nlie.d_floor > 0.0))
    fail(ErrorKind::ConfigError, "nlie.d_eps and nlie.d_floor must be > 0");
  if (!(nlie.eps_shift_fraction > 0.0) || !(nlie.eps_shift_fraction < 1.0))
    fail(ErrorKind::ConfigError, "nlie.eps_shift_fraction must lie in (0, 1)");
  if (!(thermo.dt_fraction > 0.0) || !(thermo.dd_step > 0.0))
    fail(ErrorKind::ConfigError, "thermo step sizes must be > 0");
  if (!(caloric.quad_rel_tol > 0.0)) fail(ErrorKind::ConfigError, "caloric.quad_rel_tol must be > 0");
}

inline std::map<std::string, std::string> Config::snapshot() const {
  using detail::format_double;
  return {
      {"nlie.n_points", std::to_string(nlie.n_points)},
      {"nlie.tol", format_double(nlie.tol)},
      {"nlie.max_iter", std::to_string(nlie.max_iter)},
      {"nlie.damping", format_double(nlie.damping)},
      {"nlie.d_eps", format_double(nlie.d_eps)},
      {"nlie.d_floor", format_double(nlie.d_floor)},
      {"nlie.eps_shift_fraction", format_double(nlie.eps_shift_fraction)},
      {"nlie.pad_factor", std::to_string(nlie.pad_factor)},
      {"nlie.max_points", std::to_string(nlie.max_points)},
      {"nlie.delta_max", format_double(nlie.delta_max)},
      {"nlie.kernel_cache", nlie.kernel_cache},
      {"thermo.dt_fraction", format_double(thermo.dt_fraction)},
      {"thermo.dd_step", format_double(thermo.dd_step)},
      {"thermo.richardson", thermo.richardson ? "true" : "false"},
      {"caloric.quad_rel_tol", format_double(caloric.quad_rel_tol)},
      {"caloric.max_nodes", std::to_string(caloric.max_nodes)},
  };
}

inline Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected 'key = value'");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

inline Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

}  // namespace calorex

#endif  // CALOREX_CONFIG_HPP
