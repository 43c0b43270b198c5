#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace spikelab {

/// Uniform nodes r_i = i*h on [0, r_max]. The last node carries the Dirichlet
/// value 0 and is not an unknown.
class RadialGrid {
 public:
  RadialGrid(double r_max, double h, int dim);

  double r_max() const { return h_ * static_cast<double>(n_); }
  double h() const { return h_; }
  int dim() const { return dim_; }
  std::size_t num_nodes() const { return n_ + 1; }
  std::size_t num_unknowns() const { return n_; }
  double r(std::size_t i) const { return h_ * static_cast<double>(i); }

  /// Trapezoid weights on the unknown nodes, including |S^{N-1}| r^{N-1}.
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  double h_;
  std::size_t n_;
  int dim_;
  Eigen::VectorXd weights_;
};

/// |S^{N-1}|, with |S^0| = 2 (two points).
double sphere_area(int dim);

/// Sorted nodes 0 = x_0 < ... < x_n = L on one half-axis. Node 0 lies on a
/// reflection axis, node n carries the Dirichlet value.
class AxisNodes {
 public:
  explicit AxisNodes(std::vector<double> nodes);

  static AxisNodes uniform(double length, double h);
  /// x_k proportional to sinh(k/per_efold), spacing ~ core/per_efold at the
  /// origin and growing linearly with x beyond `core`.
  static AxisNodes graded(double length, double core, double per_efold);

  std::size_t num_unknowns() const { return x_.size() - 1; }
  double length() const { return x_.back(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> nodes() const { return x_; }
  bool is_uniform() const { return uniform_; }
  /// Index k with x_k <= x < x_{k+1}; x must lie in [0, L).
  std::size_t locate(double x) const;

 private:
  std::vector<double> x_;
  bool uniform_ = false;
};

enum class Reduction { QuarterPlane, HalfCylinder };

/// Tensor grid on {x1 >= 0, t >= 0}, where t is x2 (N=2, quarter plane) or
/// r' = |(x2,x3)| (N=3, half cylinder). Unknown (i,j) has index i*n2 + j.
class SymmetricGrid {
 public:
  SymmetricGrid(AxisNodes axial, AxisNodes transverse, int dim, Reduction reduction);

  static SymmetricGrid uniform(double l1, double l2, double h, int dim);

  const AxisNodes& axial() const { return axial_; }
  const AxisNodes& transverse() const { return transverse_; }
  int dim() const { return dim_; }
  Reduction reduction() const { return reduction_; }
  std::size_t n1() const { return axial_.num_unknowns(); }
  std::size_t n2() const { return transverse_.num_unknowns(); }
  std::size_t num_unknowns() const { return n1() * n2(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n2() + j; }

  /// Quadrature weights over the full space (reflection multiplicity and the
  /// 2*pi*r' cylinder weight included).
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Samples f(x1, t) at every unknown node.
  Eigen::VectorXd sample(const std::function<double(double, double)>& f) const;

 private:
  AxisNodes axial_;
  AxisNodes transverse_;
  int dim_;
  Reduction reduction_;
  Eigen::VectorXd weights_;
};

Reduction default_reduction(int dim);

using GridPtr = std::shared_ptr<const SymmetricGrid>;

/// Grid function on a symmetry-reduced domain, implicitly even across both
/// axes and zero on the outer edges.
struct SymmetricField {
  GridPtr grid;
  Eigen::VectorXd values;
};

/// Radial function sampled on all nodes of a RadialGrid (the last value is 0).
class RadialProfile {
 public:
  RadialProfile(RadialGrid grid, Eigen::VectorXd node_values);

  const RadialGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  int dim() const { return grid_.dim(); }

  /// Cubic interpolation, even extension to r < 0, zero beyond r_max.
  double operator()(double r) const;
  /// Radial derivative from centered differences, interpolated the same way
  /// with odd extension. Defined for r >= 0.
  double derivative(double r) const;
  /// Centered-difference derivative at the nodes.
  const Eigen::VectorXd& node_derivative() const { return deriv_; }

 private:
  RadialGrid grid_;
  Eigen::VectorXd values_;
  Eigen::VectorXd deriv_;
};

/// Four-point Lagrange interpolation on uniform samples f_k = f(k*h) for
/// k = 0..n. `parity` (+1 or -1) extends to negative k, samples past n are 0.
double cubic_uniform(const Eigen::VectorXd& f, double h, double x, double parity);

}  // namespace spikelab
