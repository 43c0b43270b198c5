#include "spikelab/pipeline.hpp"

#include "spikelab/errors.hpp"

#include <cmath>

namespace spikelab {

namespace {

// A checkpointed profile is reused only on the identical grid and only if it
// still solves its equation.
GroundState reuse_or_solve(const std::optional<GroundState>& hint, const PotentialSpec& v, double mu,
                           const RadialGrid& grid) {
  if (hint) {
    const RadialGrid& g = hint->profile.grid();
    if (g.dim() == grid.dim() && g.h() == grid.h() && g.r_max() == grid.r_max() && hint->mu == mu &&
        hint->potential.to_json() == v.to_json() && ground_state_residual(hint->profile, v, mu) <= 1e-8)
      return *hint;
  }
  return solve_ground_state(v, mu, grid);
}

}  // namespace

ScalarStates solve_scalar_states(const ModelParams& params, const GridSettings& grids) {
  return solve_scalar_states(params, grids, ScalarHints{});
}

ScalarStates solve_scalar_states(const ModelParams& params, const GridSettings& grids, const ScalarHints& hints) {
  params.validate();
  const int dim = params.dim;
  const double v_inf = params.V.infimum(grids.radial_extent);
  if (!(v_inf > 0.0)) params.V.validate(grids.radial_extent, dim);
  const RadialGrid ygrid = scaled_radial_grid(v_inf, dim, grids.radial_h, grids.radial_extent);
  GroundState upsilon = reuse_or_solve(hints.upsilon, params.V, params.mu1, ygrid);
  const NondegeneracyReport nd = check_nondegeneracy(upsilon);
  if (nd.degenerate)
    throw AssumptionError("linearization around Upsilon is degenerate (smallest |eigenvalue| " +
                          std::to_string(nd.smallest_eigenvalue_magnitude) + ")");
  params.W.validate(grids.slow_extent / std::sqrt(v_inf), dim);
  EffectivePotential omega = effective_potential(params.W, params.beta, upsilon);
  const RadialGrid ugrid = scaled_radial_grid(omega.omega0, dim, grids.radial_h, grids.radial_extent);
  GroundState spike = reuse_or_solve(hints.spike, PotentialSpec::constant(omega.omega0), params.mu2, ugrid);
  PsiProfile psi = solve_psi_profile(spike, omega.omega0, params.mu2);
  return {params, grids, std::move(upsilon), std::move(omega), std::move(spike), std::move(psi), nd};
}

GridPtr make_slow_grid(const ScalarStates& st, double eps) {
  const GridSettings& g = st.grids;
  const double len = g.slow_extent / std::sqrt(st.upsilon.potential.infimum(g.radial_extent));
  const AxisNodes ax = AxisNodes::graded(len, g.slow_core * eps, g.slow_per_efold);
  return std::make_shared<const SymmetricGrid>(ax, ax, st.params.dim, default_reduction(st.params.dim));
}

GridPtr make_fast_grid(const ScalarStates& st, double shift) {
  const GridSettings& g = st.grids;
  const double unit = 1.0 / std::sqrt(st.omega.omega0);
  const double h = g.fast_h * unit;
  return std::make_shared<const SymmetricGrid>(AxisNodes::uniform(shift + g.fast_margin * unit, h),
                                               AxisNodes::uniform(g.fast_margin * unit, h), st.params.dim,
                                               default_reduction(st.params.dim));
}

Stage build_stage(const ScalarStates& st, double eps, double d, bool leading_only) {
  ModelParams p = st.params;
  p.eps = eps;
  const double unit = 1.0 / std::sqrt(st.omega.omega0);
  p.d = d > 0.0 ? d : unit;
  p.validate();
  if (p.d <= 0.5 * unit || p.d >= 1.5 * unit)
    throw ConfigError("d = " + std::to_string(p.d) + " lies outside the peak-law window (0.5, 1.5)/sqrt(omega0)");
  const double rho = peak_law(eps, p.d);
  const double shift = rho / eps;
  const GridPtr slow = make_slow_grid(st, eps);
  const GridPtr fast = make_fast_grid(st, shift);

  const PhiSolution phi = solve_phi(st.upsilon, p.mu1, st.spike, shift, eps, slow);
  CorrectionBundle corr{phi.field,
                        st.psi,
                        assemble_psi_eps(st.psi.profile, phi.at_origin, st.omega.upsilon0, p.beta, shift, fast),
                        phi.sup_norm,
                        phi.at_origin,
                        phi.relative_residual,
                        shift,
                        eps};

  AnsatzBundle bundle = assemble_ansatz(p, st.upsilon, st.spike, corr, st.omega);
  ErrorFields errors = eval_error_terms(bundle, corr, leading_only);
  return {p, std::move(corr), std::move(bundle), std::move(errors)};
}

}  // namespace spikelab
