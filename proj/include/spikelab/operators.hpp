#pragma once

#include "spikelab/grid.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace spikelab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete Laplacian (positive sign convention, Delta u) acting on the
/// unknown nodes of a radial grid: u'' + (N-1)/r u' in the interior,
/// N * 2(u_1 - u_0)/h^2 at the origin, u = 0 at r_max. order = 4 switches to
/// five-point central stencils with even mirror nodes at the origin.
SparseMatrix laplacian_radial(const RadialGrid& grid, int dim, int order = 2);

/// Discrete Laplacian on a symmetry-reduced grid. Even reflection across
/// x1 = 0 and the transverse axis, Dirichlet on the outer edges, and the
/// axisymmetric (1/r') d/dr' term for the half cylinder.
SparseMatrix laplacian_symmetric(const SymmetricGrid& grid);

double integrate(const Eigen::VectorXd& values, const RadialGrid& grid);
double integrate(const SymmetricField& field);
double integrate(const Eigen::VectorXd& values, const SymmetricGrid& grid);
double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& weights);
double l2_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& weights);

struct GridPoint {
  double axial;
  double transverse;
};

/// Rows evaluate a field on `source` at the given points by 4x4 tensor
/// Lagrange interpolation with even mirror nodes. Points at or beyond the
/// outer edges evaluate to 0.
SparseMatrix interpolation_matrix(const SymmetricGrid& source, const std::vector<GridPoint>& points);

/// Nodes of `target` scaled by `factor`, the usual query set for
/// cross-grid evaluation.
std::vector<GridPoint> scaled_nodes(const SymmetricGrid& target, double factor);

/// Max-norm, 0 for an empty vector.
double max_abs(const Eigen::VectorXd& v);

}  // namespace spikelab
