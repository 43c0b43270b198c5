#include "spikelab/config.hpp"

#include "spikelab/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace spikelab {

namespace {

std::size_t line_of(const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line + 1); }

// Rejects keys outside `allowed`, naming the block and the offending line.
void check_block(const YAML::Node& node, const std::string& block, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("'" + block + "' must be a mapping", line_of(node));
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in '" + block + "'", line_of(kv.first));
  }
}

template <class T>
void read(const YAML::Node& block, const char* key, T& out, const std::string& where) {
  const YAML::Node n = block[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + where + "." + key + "' has the wrong type", line_of(n));
  }
}

void read_list(const YAML::Node& block, const char* key, std::vector<double>& out, const std::string& where) {
  const YAML::Node n = block[key];
  if (!n) return;
  if (!n.IsSequence()) throw ConfigError("'" + where + "." + key + "' must be a list of numbers", line_of(n));
  read(block, key, out, where);
}

nlohmann::json to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& e : n) j.push_back(to_json(e));
      return j;
    }
    case YAML::NodeType::Scalar: {
      double v = 0.0;
      if (YAML::convert<double>::decode(n, v)) return v;
      return n.as<std::string>();
    }
    default:
      return nullptr;
  }
}

PotentialSpec read_potential(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw ConfigError("potential block '" + where + "' must be a mapping", line_of(n));
  try {
    return PotentialSpec::from_json(to_json(n));
  } catch (const ConfigError& e) {
    throw ConfigError("'" + where + "': " + e.what(), line_of(n));
  }
}

void read_model(const YAML::Node& n, ModelParams& m) {
  check_block(n, "model", {"dim", "mu1", "mu2", "beta", "eps", "d", "V", "W"});
  read(n, "dim", m.dim, "model");
  read(n, "mu1", m.mu1, "model");
  read(n, "mu2", m.mu2, "model");
  read(n, "beta", m.beta, "model");
  read(n, "eps", m.eps, "model");
  read(n, "d", m.d, "model");
  if (n["V"]) m.V = read_potential(n["V"], "model.V");
  if (n["W"]) m.W = read_potential(n["W"], "model.W");
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model: ") + e.what(), line_of(n));
  }
}

void read_grids(const YAML::Node& n, GridSettings& g) {
  check_block(n, "grids",
              {"radial_h", "radial_extent", "slow_extent", "slow_core", "slow_per_efold", "fast_h", "fast_margin"});
  read(n, "radial_h", g.radial_h, "grids");
  read(n, "radial_extent", g.radial_extent, "grids");
  read(n, "slow_extent", g.slow_extent, "grids");
  read(n, "slow_core", g.slow_core, "grids");
  read(n, "slow_per_efold", g.slow_per_efold, "grids");
  read(n, "fast_h", g.fast_h, "grids");
  read(n, "fast_margin", g.fast_margin, "grids");
  for (double v : {g.radial_h, g.radial_extent, g.slow_extent, g.slow_core, g.slow_per_efold, g.fast_h, g.fast_margin})
    if (!(v > 0.0)) throw ConfigError("grids: every setting must be positive", line_of(n));
}

ScalarProblem read_groundstate(const YAML::Node& n) {
  check_block(n, "groundstate", {"dim", "mu", "potential"});
  ScalarProblem s;
  read(n, "dim", s.dim, "groundstate");
  read(n, "mu", s.mu, "groundstate");
  if (!n["potential"]) throw ConfigError("'groundstate' is missing its 'potential' block", line_of(n));
  s.potential = read_potential(n["potential"], "groundstate.potential");
  if (s.dim < 1 || s.dim > 3) throw ConfigError("groundstate.dim must be 1, 2 or 3", line_of(n));
  if (!(s.mu > 0.0)) throw ConfigError("groundstate.mu must be positive", line_of(n));
  return s;
}

void check_eps_list(const std::vector<double>& v, const std::string& name, const YAML::Node& n) {
  for (double e : v)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("sweep." + name + ": eps values must lie in (0, 1)", line_of(n));
}

void read_sweep(const YAML::Node& n, SweepSettings& s) {
  check_block(n, "sweep",
              {"eps", "coercivity_eps", "full_solve_eps", "model_eps", "d_bracket", "d_tolerance", "toy_constants",
               "leading_only"});
  read_list(n, "eps", s.eps, "sweep");
  read_list(n, "coercivity_eps", s.coercivity_eps, "sweep");
  read_list(n, "full_solve_eps", s.full_solve_eps, "sweep");
  read_list(n, "model_eps", s.model_eps, "sweep");
  if (const YAML::Node b = n["d_bracket"]) {
    std::vector<double> v;
    read_list(n, "d_bracket", v, "sweep");
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("sweep.d_bracket must be [lo, hi] with lo < hi", line_of(b));
    s.d_lo = v[0];
    s.d_hi = v[1];
  }
  read(n, "d_tolerance", s.d_tolerance, "sweep");
  read(n, "toy_constants", s.toy_constants, "sweep");
  read(n, "leading_only", s.leading_only, "sweep");
  check_eps_list(s.eps, "eps", n);
  check_eps_list(s.coercivity_eps, "coercivity_eps", n);
  check_eps_list(s.full_solve_eps, "full_solve_eps", n);
  check_eps_list(s.model_eps, "model_eps", n);
  if (!(s.d_tolerance > 0.0)) throw ConfigError("sweep.d_tolerance must be positive", line_of(n));
}

void read_asymptotics(const YAML::Node& n, AsymptoticsSettings& a) {
  check_block(n, "asymptotics", {"pairs", "window", "samples"});
  if (const YAML::Node p = n["pairs"]) {
    if (!p.IsSequence()) throw ConfigError("asymptotics.pairs must be a list of [s, t]", line_of(p));
    a.pairs.clear();
    for (const auto& e : p) {
      std::vector<double> st;
      try {
        st = e.as<std::vector<double>>();
      } catch (const YAML::Exception&) {
        throw ConfigError("asymptotics.pairs entries must be [s, t]", line_of(e));
      }
      if (st.size() != 2 || !(st[0] >= 1.0) || !(st[1] >= 1.0))
        throw ConfigError("asymptotics.pairs entries must be [s, t] with s, t >= 1", line_of(e));
      a.pairs.emplace_back(st[0], st[1]);
    }
  }
  if (const YAML::Node w = n["window"]) {
    std::vector<double> v;
    read_list(n, "window", v, "asymptotics");
    if (v.size() != 2 || !(v[0] > 1.0) || !(v[0] < v[1]))
      throw ConfigError("asymptotics.window must be [lo, hi] with 1 < lo < hi", line_of(w));
    a.window_lo = v[0];
    a.window_hi = v[1];
  }
  read(n, "samples", a.samples, "asymptotics");
  if (a.samples < 4) throw ConfigError("asymptotics.samples must be at least 4", line_of(n));
}

void read_outputs(const YAML::Node& n, OutputSettings& o) {
  check_block(n, "outputs", {"directory", "csv", "json"});
  read(n, "directory", o.directory, "outputs");
  read(n, "csv", o.csv, "outputs");
  read(n, "json", o.json, "outputs");
  if (o.directory.empty()) throw ConfigError("outputs.directory must not be empty", line_of(n));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config does not parse: " + e.msg, static_cast<std::size_t>(e.mark.line + 1));
  }
  RunConfig c;
  if (!root || root.IsNull()) return c;
  check_block(root, "config", {"model", "grids", "groundstate", "sweep", "asymptotics", "outputs", "seed", "workers"});
  if (root["model"]) read_model(root["model"], c.model);
  if (root["grids"]) read_grids(root["grids"], c.grids);
  if (root["groundstate"]) c.groundstate = read_groundstate(root["groundstate"]);
  if (root["sweep"]) read_sweep(root["sweep"], c.sweep);
  if (root["asymptotics"]) read_asymptotics(root["asymptotics"], c.asymptotics);
  if (root["outputs"]) read_outputs(root["outputs"], c.outputs);
  read(root, "seed", c.seed, "config");
  read(root, "workers", c.workers, "config");
  if (c.workers < 1) throw ConfigError("workers must be at least 1", line_of(root["workers"]));
  return c;
}

void apply_environment(RunConfig& config) {
  if (const char* dir = std::getenv("SPIKELAB_OUTPUT_DIR"); dir && *dir) config.outputs.directory = dir;
  if (const char* w = std::getenv("SPIKELAB_WORKERS"); w && *w) {
    char* end = nullptr;
    const long n = std::strtol(w, &end, 10);
    if (*end != '\0' || n < 1 || n > 256) throw ConfigError("SPIKELAB_WORKERS must be an integer in [1, 256]");
    config.workers = static_cast<int>(n);
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig c = parse_config(text.str());
  apply_environment(c);
  return c;
}

std::string scalar_section_text(const RunConfig& c) {
  nlohmann::json j;
  const ModelParams& m = c.model;
  j["model"] = {{"dim", m.dim}, {"mu1", m.mu1}, {"mu2", m.mu2}, {"beta", m.beta}, {"V", m.V.to_json()},
                {"W", m.W.to_json()}};
  const GridSettings& g = c.grids;
  j["grids"] = {{"radial_h", g.radial_h}, {"radial_extent", g.radial_extent}, {"slow_extent", g.slow_extent}};
  if (c.groundstate)
    j["groundstate"] = {{"dim", c.groundstate->dim}, {"mu", c.groundstate->mu},
                        {"potential", c.groundstate->potential.to_json()}};
  return j.dump();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace spikelab
