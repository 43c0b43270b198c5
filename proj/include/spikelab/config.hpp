#pragma once

#include "spikelab/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spikelab {

/// Standalone scalar problem for the groundstate command. When absent the
/// command solves Upsilon of the model block.
struct ScalarProblem {
  int dim = 1;
  double mu = 1.0;
  PotentialSpec potential = PotentialSpec::constant(1.0);
};

struct SweepSettings {
  std::vector<double> eps{0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.025};
  std::vector<double> coercivity_eps{0.1, 0.05, 0.025};
  std::vector<double> full_solve_eps{0.1, 0.07, 0.05};
  std::vector<double> model_eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double d_lo = 0.8;  ///< root bracket, units of 1/sqrt(omega0)
  double d_hi = 1.2;
  double d_tolerance = 2e-3;
  bool toy_constants = false;  ///< reduced: b = c = mu2 = omega0 = -d11 = 1
  bool leading_only = false;   ///< reduced: keep only the two leading E2 terms
};

struct AsymptoticsSettings {
  std::vector<std::pair<double, double>> pairs{{1.0, 3.0}, {2.0, 2.0}, {1.0, 1.0}};
  double window_lo = 6.0;  ///< decay lengths
  double window_hi = 12.0;
  int samples = 13;
};

struct OutputSettings {
  std::string directory = "spikelab-out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  ModelParams model;
  GridSettings grids;
  std::optional<ScalarProblem> groundstate;
  SweepSettings sweep;
  AsymptoticsSettings asymptotics;
  OutputSettings outputs;
  std::uint64_t seed = 20240917;
  int workers = 1;
};

/// Parses the YAML (or JSON) text. Every key is optional; unknown keys, bad
/// types and invalid values raise ConfigError carrying the 1-based line.
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; then applies SPIKELAB_OUTPUT_DIR and
/// SPIKELAB_WORKERS from the environment.
RunConfig load_config(const std::string& path);

/// Environment overrides, applied by load_config.
void apply_environment(RunConfig& config);

/// Canonical text of the settings that determine the scalar states, used to
/// key checkpoints. Stable across runs and key order in the source file.
std::string scalar_section_text(const RunConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace spikelab
