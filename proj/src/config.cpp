#include "kdlr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kdlr/errors.hpp"

namespace kdlr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& val) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(val, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" +
                      val + "'");
  }
  if (pos != val.size())
    throw ConfigError("config: key '" + key + "' expects a number, got '" +
                      val + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& val) {
  double x = parse_double(key, val);
  if (x != std::floor(x))
    throw ConfigError("config: key '" + key + "' expects an integer, got '" +
                      val + "'");
  return static_cast<int>(x);
}

} // namespace

std::string solver_name(SolverKind s) {
  switch (s) {
  case SolverKind::LowRank:
    return "lowrank";
  case SolverKind::FullTensor:
    return "fulltensor";
  case SolverKind::Fluid:
    return "fluid";
  }
  return "";
}

std::string ic_name(ICKind ic) {
  switch (ic) {
  case ICKind::Counterstreaming:
    return "counterstreaming";
  case ICKind::LocalEquilibrium:
    return "local_equilibrium";
  case ICKind::BumpOnTail:
    return "bump_on_tail";
  case ICKind::PotentialHill2D:
    return "potential_hill_2d";
  case ICKind::ColdBeam2D:
    return "cold_beam_2d";
  case ICKind::Custom:
    return "custom";
  }
  return "";
}

double ExperimentConfig::resolved_dt() const {
  if (dt > 0.0)
    return dt;
  const double dx = 1.0 / nx;
  const double v_max = std::max(std::abs(v_lo), std::abs(v_hi));
  return cfl * dx / v_max;
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[' && line.back() == ']')
      continue; // section headers are organizational only
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config: line " << lineno << " is not 'key = value': '" << line
          << "'";
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (kv.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = val;
  }

  ExperimentConfig cfg;
  bool have_r = false;
  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end())
      return "";
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  std::string v;
  if ((v = take("solver")).empty())
    throw ConfigError("config: missing required key 'solver'");
  if (v == "lowrank")
    cfg.solver = SolverKind::LowRank;
  else if (v == "fulltensor")
    cfg.solver = SolverKind::FullTensor;
  else if (v == "fluid")
    cfg.solver = SolverKind::Fluid;
  else
    throw ConfigError("config: unknown solver '" + v + "'");

  if ((v = take("ic")).empty())
    throw ConfigError("config: missing required key 'ic'");
  if (v == "counterstreaming")
    cfg.ic = ICKind::Counterstreaming;
  else if (v == "local_equilibrium")
    cfg.ic = ICKind::LocalEquilibrium;
  else if (v == "bump_on_tail")
    cfg.ic = ICKind::BumpOnTail;
  else if (v == "potential_hill_2d")
    cfg.ic = ICKind::PotentialHill2D;
  else if (v == "cold_beam_2d")
    cfg.ic = ICKind::ColdBeam2D;
  else if (v == "custom")
    cfg.ic = ICKind::Custom;
  else
    throw ConfigError("config: unknown ic '" + v + "'");

  if (!(v = take("d")).empty())
    cfg.d = parse_int("d", v);
  if ((v = take("nx")).empty())
    throw ConfigError("config: missing required key 'nx'");
  cfg.nx = parse_int("nx", v);
  if ((v = take("nv")).empty())
    throw ConfigError("config: missing required key 'nv'");
  cfg.nv = parse_int("nv", v);
  if (!(v = take("r")).empty()) {
    cfg.r = parse_int("r", v);
    have_r = true;
  }
  if ((v = take("epsilon")).empty())
    throw ConfigError("config: missing required key 'epsilon'");
  cfg.epsilon = parse_double("epsilon", v);
  if (!(v = take("dt")).empty())
    cfg.dt = parse_double("dt", v);
  if (!(v = take("cfl")).empty())
    cfg.cfl = parse_double("cfl", v);
  if ((v = take("t_final")).empty())
    throw ConfigError("config: missing required key 't_final'");
  cfg.t_final = parse_double("t_final", v);
  if (!(v = take("v_lo")).empty())
    cfg.v_lo = parse_double("v_lo", v);
  if (!(v = take("v_hi")).empty())
    cfg.v_hi = parse_double("v_hi", v);
  if (!(v = take("gmres_tol")).empty())
    cfg.gmres.tol = parse_double("gmres_tol", v);
  if (!(v = take("gmres_restart")).empty())
    cfg.gmres.restart = parse_int("gmres_restart", v);
  if (!(v = take("gmres_max_iter")).empty())
    cfg.gmres.max_iter = parse_int("gmres_max_iter", v);
  if (!(v = take("output")).empty())
    cfg.output = v;
  if (!(v = take("snapshot_every")).empty())
    cfg.snapshot_every = parse_int("snapshot_every", v);
  if (!(v = take("ic_file")).empty())
    cfg.ic_file = v;
  if (!(v = take("bench_steps")).empty())
    cfg.bench_steps = parse_int("bench_steps", v);
  if (!(v = take("conv_grids")).empty())
    cfg.conv_grids = v;

  if (!kv.empty())
    throw ConfigError("config: unknown key '" + kv.begin()->first + "'");

  // validation
  if (cfg.d != 1 && cfg.d != 2)
    throw ConfigError("config: d must be 1 or 2");
  if (cfg.nx < 4 || cfg.nv < 4)
    throw ConfigError("config: nx and nv must be at least 4");
  if (!(cfg.epsilon > 0.0))
    throw ConfigError("config: epsilon must be positive");
  if (!(cfg.t_final > 0.0))
    throw ConfigError("config: t_final must be positive");
  if (cfg.solver == SolverKind::LowRank) {
    if (!have_r)
      throw ConfigError("config: solver=lowrank requires key 'r'");
    if (cfg.r < 1)
      throw ConfigError("config: r must be at least 1");
  } else if (have_r) {
    throw ConfigError("config: key 'r' is only valid with solver=lowrank");
  }
  const bool ic_2d =
      cfg.ic == ICKind::PotentialHill2D || cfg.ic == ICKind::ColdBeam2D;
  const bool ic_1d = cfg.ic == ICKind::Counterstreaming ||
                     cfg.ic == ICKind::LocalEquilibrium ||
                     cfg.ic == ICKind::BumpOnTail;
  if (ic_2d && cfg.d != 2)
    throw ConfigError("config: ic '" + ic_name(cfg.ic) + "' requires d = 2");
  if (ic_1d && cfg.d != 1)
    throw ConfigError("config: ic '" + ic_name(cfg.ic) + "' requires d = 1");
  if (cfg.ic == ICKind::Custom) {
    if (cfg.ic_file.empty())
      throw ConfigError("config: ic=custom requires key 'ic_file'");
    if (cfg.solver == SolverKind::Fluid)
      throw ConfigError("config: ic=custom is not supported with solver=fluid");
  }
  if (!(cfg.v_lo < cfg.v_hi))
    throw ConfigError("config: v bounds must be ordered");
  if (cfg.dt == 0.0 && (!(cfg.cfl > 0.0) || cfg.cfl > 1.0))
    throw ConfigError("config: cfl must be in (0, 1]");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

} // namespace kdlr
