#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cnds/errors.hpp"

namespace cnds {

// Flat run configuration with dotted keys, one `key = value` per line,
// `#` comments. Vector values are space-separated. Unknown keys are
// rejected so typos fail loudly.
struct RunConfig {
  std::string system_name = "double-well";

  std::vector<double> grid_lo;      // empty = system default window
  std::vector<double> grid_hi;
  std::vector<int> grid_depth = {6};
  std::vector<int> grid_circular;   // 0/1 per axis; empty = system default

  int base_m = 0;                   // 0 = default per base kind
  double base_T = 0.5;              // time step override (trivial/finite base)

  int transition_scheme = 3;
  double transition_eps_pad = -1.0;  // < 0 = auto (one box diameter)
  std::string transition_policy = "absorb";

  double integrator_h = 1e-3;

  double lorenz_sigma = 10.0;
  double lorenz_rho = 28.0;
  double lorenz_beta = 8.0 / 3.0;
  double lorenz_amp = 5.0;
  double lorenz_tau = 1.0;

  double lyapunov_horizon = 20.0;
  double lyapunov_dt = 1e-2;

  double pullback_p = 0.0;
  std::vector<double> pullback_u_lo;
  std::vector<double> pullback_u_hi;
  double pullback_tau = 1.0;
  int pullback_count = 5;
  double pullback_tol = -1.0;        // < 0 = auto (one box diameter)

  std::string output_dir = "out";
  uint64_t seed = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
inline T parse_scalar(const std::string& key, const std::string& val) {
  std::istringstream iss(val);
  T out;
  iss >> out;
  if (iss.fail()) throw ConfigError("bad value for " + key + ": " + val);
  std::string rest;
  if (iss >> rest) throw ConfigError("trailing garbage for " + key + ": " + val);
  return out;
}

template <typename T>
inline std::vector<T> parse_list(const std::string& key, const std::string& val) {
  std::istringstream iss(val);
  std::vector<T> out;
  T v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof()) throw ConfigError("bad list value for " + key + ": " + val);
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

template <typename T>
inline std::string join(const std::vector<T>& v) {
  std::ostringstream oss;
  for (size_t i = 0; i < v.size(); ++i) oss << (i ? " " : "") << v[i];
  return oss.str();
}

}  // namespace detail

inline void apply_config_line(RunConfig& cfg, const std::string& key,
                              const std::string& val) {
  using detail::parse_list;
  using detail::parse_scalar;
  if (key == "system.name") cfg.system_name = val;
  else if (key == "grid.lo") cfg.grid_lo = parse_list<double>(key, val);
  else if (key == "grid.hi") cfg.grid_hi = parse_list<double>(key, val);
  else if (key == "grid.depth") cfg.grid_depth = parse_list<int>(key, val);
  else if (key == "grid.circular") cfg.grid_circular = parse_list<int>(key, val);
  else if (key == "base.m") cfg.base_m = parse_scalar<int>(key, val);
  else if (key == "base.T") cfg.base_T = parse_scalar<double>(key, val);
  else if (key == "transition.scheme") cfg.transition_scheme = parse_scalar<int>(key, val);
  else if (key == "transition.eps_pad")
    cfg.transition_eps_pad = val == "auto" ? -1.0 : parse_scalar<double>(key, val);
  else if (key == "transition.policy") {
    if (val != "absorb" && val != "drop")
      throw ConfigError("transition.policy must be absorb or drop");
    cfg.transition_policy = val;
  } else if (key == "integrator.h") cfg.integrator_h = parse_scalar<double>(key, val);
  else if (key == "params.sigma") cfg.lorenz_sigma = parse_scalar<double>(key, val);
  else if (key == "params.rho") cfg.lorenz_rho = parse_scalar<double>(key, val);
  else if (key == "params.beta") cfg.lorenz_beta = parse_scalar<double>(key, val);
  else if (key == "params.amp") cfg.lorenz_amp = parse_scalar<double>(key, val);
  else if (key == "params.tau") cfg.lorenz_tau = parse_scalar<double>(key, val);
  else if (key == "lyapunov.horizon") cfg.lyapunov_horizon = parse_scalar<double>(key, val);
  else if (key == "lyapunov.dt") cfg.lyapunov_dt = parse_scalar<double>(key, val);
  else if (key == "pullback.p") cfg.pullback_p = parse_scalar<double>(key, val);
  else if (key == "pullback.u_lo") cfg.pullback_u_lo = parse_list<double>(key, val);
  else if (key == "pullback.u_hi") cfg.pullback_u_hi = parse_list<double>(key, val);
  else if (key == "pullback.tau") cfg.pullback_tau = parse_scalar<double>(key, val);
  else if (key == "pullback.count") cfg.pullback_count = parse_scalar<int>(key, val);
  else if (key == "pullback.tol")
    cfg.pullback_tol = val == "auto" ? -1.0 : parse_scalar<double>(key, val);
  else if (key == "output.dir") cfg.output_dir = val;
  else if (key == "seed") cfg.seed = parse_scalar<uint64_t>(key, val);
  else throw ConfigError("unknown config key: " + key);
}

inline RunConfig parse_config_text(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_config_line(cfg, detail::trim(line.substr(0, eq)),
                      detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config_text(in);
}

inline std::string print_defaults() {
  RunConfig d;
  std::ostringstream o;
  o << "# run configuration (defaults)\n";
  o << "system.name = " << d.system_name
    << "  # double-well | example-5-1 | example-5-2-circle | forced-lorenz\n";
  o << "grid.lo =   # per-axis, default: system window\n";
  o << "grid.hi =   # per-axis, default: system window\n";
  o << "grid.depth = " << detail::join(d.grid_depth) << "\n";
  o << "grid.circular =   # 0/1 per axis, default: system setting\n";
  o << "base.m = " << d.base_m << "  # 0 = per-base default\n";
  o << "base.T = " << d.base_T << "  # step override for trivial/finite bases\n";
  o << "transition.scheme = " << d.transition_scheme << "\n";
  o << "transition.eps_pad = auto  # auto = one box diameter\n";
  o << "transition.policy = " << d.transition_policy << "  # absorb | drop\n";
  o << "integrator.h = " << d.integrator_h << "\n";
  o << "params.sigma = " << d.lorenz_sigma << "\n";
  o << "params.rho = " << d.lorenz_rho << "\n";
  o << "params.beta = " << d.lorenz_beta << "\n";
  o << "params.amp = " << d.lorenz_amp << "\n";
  o << "params.tau = " << d.lorenz_tau << "\n";
  o << "lyapunov.horizon = " << d.lyapunov_horizon << "\n";
  o << "lyapunov.dt = " << d.lyapunov_dt << "\n";
  o << "pullback.p = " << d.pullback_p << "\n";
  o << "pullback.u_lo =   # per-axis window of U\n";
  o << "pullback.u_hi =   # per-axis window of U\n";
  o << "pullback.tau = " << d.pullback_tau << "\n";
  o << "pullback.count = " << d.pullback_count << "\n";
  o << "pullback.tol = auto  # auto = one box diameter\n";
  o << "output.dir = " << d.output_dir << "\n";
  o << "seed = " << d.seed << "\n";
  return o.str();
}

}  // namespace cnds
