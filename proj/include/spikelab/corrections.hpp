#pragma once

#include "spikelab/ground_state.hpp"
#include "spikelab/grid.hpp"

namespace spikelab {

/// U(y + s e1) + U(y - s e1) at the point (y1, t).
double two_bump(const RadialProfile& p, double y1, double t, double shift);
/// d/dy1 of U(y - c e1) at (y1, t).
double bump_dx1(const RadialProfile& p, double y1, double t, double center);

struct PhiSolution {
  SymmetricField field;
  double sup_norm = 0.0;
  double at_origin = 0.0;
  double relative_residual = 0.0;
};

/// Solves -Delta Phi + (V - 3 mu1 Upsilon^2) Phi = Upsilon U_eps^2(x/eps) on the
/// slow grid, U_eps = U(.-shift e1) + U(.+shift e1) in the fast variable.
PhiSolution solve_phi(const GroundState& upsilon, double mu1, const GroundState& spike, double shift, double eps,
                      const GridPtr& slow);

/// Same operator with an arbitrary right-hand side sampled on the slow grid.
PhiSolution solve_phi_rhs(const GroundState& upsilon, double mu1, const GridPtr& slow, const Eigen::VectorXd& rhs);

struct PsiProfile {
  RadialProfile profile;
  double residual = 0.0;   ///< max-norm of the re-applied radial equation
  double tail_rate = 0.0;  ///< gamma from a fit of ln|Psi| over the tail
};

/// Radial solution of -Delta Psi + (omega0 - 3 mu2 U^2) Psi = U, where U is the
/// ground state at stiffness omega0 (U.potential == constant(omega0)).
PsiProfile solve_psi_profile(const GroundState& spike, double omega0, double mu2, bool zero_rhs = false);

/// 2 beta Phi(0) Upsilon(0) [Psi(. + shift e1) + Psi(. - shift e1)] on `fast`.
SymmetricField assemble_psi_eps(const RadialProfile& psi, double phi0, double upsilon0, double beta, double shift,
                                const GridPtr& fast);

struct KernelElement {
  SymmetricField z;
  double norm_sq = 0.0;
  double equation_residual = 0.0;  ///< max-norm residual of the linear equation for Z
};

/// Z = d1 U(. + shift e1) - d1 U(. - shift e1). Even in y1 (the two odd
/// derivatives enter with opposite signs), so Z(0) = 2 U'(shift).
KernelElement assemble_Z(const GroundState& spike, double shift, const GridPtr& fast);

struct CorrectionBundle {
  SymmetricField phi;
  PsiProfile psi;
  SymmetricField psi_eps;
  double sup_phi = 0.0;
  double phi_at_origin = 0.0;
  double phi_residual = 0.0;
  double shift = 0.0;
  double eps = 0.0;
};

}  // namespace spikelab
