#pragma once

#include "spikelab/ansatz.hpp"
#include "spikelab/corrections.hpp"
#include "spikelab/ground_state.hpp"
#include "spikelab/model.hpp"

#include <optional>

namespace spikelab {

/// Everything that does not depend on eps or d.
struct ScalarStates {
  ModelParams params;
  GridSettings grids;
  GroundState upsilon;
  EffectivePotential omega;
  GroundState spike;
  PsiProfile psi;
  NondegeneracyReport upsilon_nondegeneracy;
};

/// Solves Upsilon, omega, U (at stiffness omega0, coefficient mu2) and Psi.
/// Throws AssumptionError when V or W fail validation, Upsilon is degenerate,
/// or omega0 <= 0.
ScalarStates solve_scalar_states(const ModelParams& params, const GridSettings& grids = {});

/// Previously solved profiles (from checkpoints). Each is used only if its
/// grid, potential and coefficient match and it still solves its equation.
struct ScalarHints {
  std::optional<GroundState> upsilon;
  std::optional<GroundState> spike;
};
ScalarStates solve_scalar_states(const ModelParams& params, const GridSettings& grids, const ScalarHints& hints);

GridPtr make_slow_grid(const ScalarStates& states, double eps);
GridPtr make_fast_grid(const ScalarStates& states, double shift);

/// One (eps, d) point: grids, corrections, ansatz and error fields.
struct Stage {
  ModelParams params;
  CorrectionBundle corrections;
  AnsatzBundle ansatz;
  ErrorFields errors;
};

/// d = 0 selects 1/sqrt(omega0). Throws ConfigError when d falls outside
/// (0.5, 1.5)/sqrt(omega0).
Stage build_stage(const ScalarStates& states, double eps, double d, bool leading_only = false);

}  // namespace spikelab
