#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chemflow/chemo.hpp"
#include "chemflow/oracles.hpp"

namespace chemflow {

struct FitSpec {
  std::string column;
  DecayModel model = DecayModel::exponential;
  // negative bounds mean "use the default window [t_end/3, t_end]"
  double window_start = -1.0;
  double window_end = -1.0;
};

struct RunConfig {
  SimParams params;
  FluidConfig fluid;
  double output_every = 0.1;  // simulation-time cadence between rows
  std::string out_path;       // empty: keep results in memory only
  long seed = 0;              // reserved for randomized presets
  std::vector<std::string> checks;
  std::vector<FitSpec> fits;
  double energy_a = 10.0;  // shift parameter of the r <= 0 functional
  // shared window for post-run checks; negative means [t_end/3, t_end]
  double check_window_start = -1.0;
  double check_window_end = -1.0;

  int grid_nx = 64, grid_ny = 64;
  double grid_lx = 1.0, grid_ly = 1.0;

  void finalize() {
    params.grid = Grid::make(grid_nx, grid_ny, grid_lx, grid_ly);
    params.validate();
    fluid.validate();
    if (!(output_every > 0.0))
      throw ConfigError("config: output_every must be positive");
  }

  double window_start_or_default() const {
    return check_window_start >= 0.0 ? check_window_start : params.t_end / 3.0;
  }
  double window_end_or_default() const {
    return check_window_end >= 0.0 ? check_window_end : params.t_end;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

inline long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline FitSpec parse_fit_spec(const std::string& spec) {
  // column:model[:t0:t1] with model in {exp, alg}
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() != 2 && parts.size() != 4)
    throw ConfigError("config: fit spec '" + spec + "' must be column:model[:t0:t1]");
  FitSpec f;
  f.column = parts[0];
  if (parts[1] == "exp")
    f.model = DecayModel::exponential;
  else if (parts[1] == "alg")
    f.model = DecayModel::algebraic;
  else
    throw ConfigError("config: fit model must be 'exp' or 'alg' in '" + spec + "'");
  if (parts.size() == 4) {
    f.window_start = parse_double("fit window", parts[2]);
    f.window_end = parse_double("fit window", parts[3]);
  }
  return f;
}

}  // namespace detail

// Applies one `key = value` pair; shared by the file parser and by CLI
// --set overrides.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_long;
  if (key == "nx") cfg.grid_nx = static_cast<int>(parse_long(key, value));
  else if (key == "ny") cfg.grid_ny = static_cast<int>(parse_long(key, value));
  else if (key == "lx") cfg.grid_lx = parse_double(key, value);
  else if (key == "ly") cfg.grid_ly = parse_double(key, value);
  else if (key == "chi") cfg.params.chi = parse_double(key, value);
  else if (key == "r") cfg.params.r = parse_double(key, value);
  else if (key == "mu") cfg.params.mu = parse_double(key, value);
  else if (key == "gravity_x") cfg.params.gravity[0] = parse_double(key, value);
  else if (key == "gravity_y") cfg.params.gravity[1] = parse_double(key, value);
  else if (key == "dt_safety") cfg.params.dt_safety = parse_double(key, value);
  else if (key == "dt_max") cfg.params.dt_max = parse_double(key, value);
  else if (key == "t_end") cfg.params.t_end = parse_double(key, value);
  else if (key == "init_preset") cfg.params.init.preset = value;
  else if (key == "init_n_amp") cfg.params.init.n_amp = parse_double(key, value);
  else if (key == "init_c_amp") cfg.params.init.c_amp = parse_double(key, value);
  else if (key == "init_u_amp") cfg.params.init.u_amp = parse_double(key, value);
  else if (key == "include_convection") cfg.fluid.include_convection = parse_bool(key, value);
  else if (key == "poisson_tol") cfg.fluid.poisson_tol = parse_double(key, value);
  else if (key == "poisson_max_iter") cfg.fluid.poisson_max_iter = static_cast<int>(parse_long(key, value));
  else if (key == "output_every") cfg.output_every = parse_double(key, value);
  else if (key == "out_path") cfg.out_path = value;
  else if (key == "seed") cfg.seed = parse_long(key, value);
  else if (key == "energy_a") cfg.energy_a = parse_double(key, value);
  else if (key == "check_window_start") cfg.check_window_start = parse_double(key, value);
  else if (key == "check_window_end") cfg.check_window_end = parse_double(key, value);
  else if (key == "checks") cfg.checks = detail::split(value, ',');
  else if (key == "fits") {
    cfg.fits.clear();
    for (const std::string& spec : detail::split(value, ','))
      cfg.fits.push_back(detail::parse_fit_spec(spec));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

// Flat UTF-8 `key = value` file; '#' starts a comment.
inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " of '" + path + "' is not key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

}  // namespace chemflow
