#pragma once

#include "spikelab/ansatz.hpp"
#include "spikelab/linear_solve.hpp"

#include <cstdint>

namespace spikelab {

/// A slow-grid field and a fast-grid field, as raw node values.
struct FieldPair {
  Eigen::VectorXd slow;
  Eigen::VectorXd fast;
};

/// Linearization of the coupled system at (Xi, Theta). Cross terms go
/// through the bundle's interpolation matrices.
FieldPair eval_L(const FieldPair& x, const AnsatzBundle& b);

/// Superlinear remainder: F(Xi + phi, Theta + psi) - F(Xi, Theta) = L - N.
FieldPair eval_N(const FieldPair& x, const AnsatzBundle& b);

/// Jacobian of (L - N) at x, i.e. of F at (Xi + phi, Theta + psi).
/// Unknowns are ordered [slow; fast].
SparseMatrix coupled_jacobian(const FieldPair& x, const AnsatzBundle& b);

/// Discrete H2-equivalent norm: (||Delta_h f||^2 + |<f, -Delta_h f>| + ||f||^2)^(1/2),
/// all in the grid's weighted L2.
double h2_norm(const Eigen::VectorXd& f, const SparseMatrix& lap, const Eigen::VectorXd& weights);

struct RemainderNorms {
  double h2_phi = 0.0, h2_psi = 0.0;
  double sup_phi = 0.0, sup_psi = 0.0;
  double l2_phi = 0.0, l2_psi = 0.0;
  double pair() const { return h2_phi + h2_psi; }
};

struct RemainderPair {
  SymmetricField phi;  ///< slow grid
  SymmetricField psi;  ///< fast grid
  double t = 0.0;      ///< multiplier on Z
  RemainderNorms norms;
  double residual = 0.0;       ///< weighted L2 of the full bordered residual
  double orthogonality = 0.0;  ///< |<psi, Z>| / (||psi|| ||Z||)
  int iterations = 0;
};

struct ProjectedOptions {
  double tolerance = 1e-10;  ///< on the residual, relative to max(1, ||E||)
  int max_iterations = 25;
  bool linear = false;  ///< drop N (one Newton step solves the problem)
};

/// Solves L(phi, psi) - N(phi, psi) - E = (0, t Z) with <psi, Z> = 0 by
/// Newton on the bordered system, starting from (0, 0, 0). Throws
/// SolverError("projected-corrector") on divergence or constraint loss.
RemainderPair solve_projected(const AnsatzBundle& b, const ErrorFields& e, const ProjectedOptions& opt = {});

/// Same with an arbitrary right-hand side in place of E.
RemainderPair solve_projected(const AnsatzBundle& b, const FieldPair& rhs, const ProjectedOptions& opt = {});

/// (L2 - N2 - E2, Z) / ||Z||^2 recomputed from a converged pair.
double multiplier_projection(const AnsatzBundle& b, const FieldPair& e, const RemainderPair& r);

struct CoercivityReport {
  double sigma_min = 0.0;
  double eps = 0.0;
  bool constrained = true;
  int iterations = 0;
  double rayleigh_change = 0.0;  ///< relative change of the last power step
};

/// Smallest singular value, in weighted L2, of the linearization at (Xi, Theta)
/// restricted to psi orthogonal to Z and projected off Z (or of the bare
/// linearization when `constrained` is false). Power iteration on the
/// inverse normal operator with one factorization, from a random start
/// drawn with `seed`.
CoercivityReport coercivity_probe(const AnsatzBundle& b, bool constrained = true, double tolerance = 1e-9,
                                  int max_iterations = 400, std::uint64_t seed = 20240917);

}  // namespace spikelab
