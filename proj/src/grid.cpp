#include "spikelab/grid.hpp"

#include "spikelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spikelab {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw GridError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

// Trapezoid weights on nodes 0..n-1 of a half-axis; the Dirichlet node n
// contributes nothing.
Eigen::VectorXd axis_weights(const AxisNodes& ax) {
  const std::size_t n = ax.num_unknowns();
  Eigen::VectorXd w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k == 0 ? 0.0 : ax[k] - ax[k - 1];
    w[k] = 0.5 * (left + ax[k + 1] - ax[k]);
  }
  return w;
}

}  // namespace

double sphere_area(int dim) {
  check_dim(dim);
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

RadialGrid::RadialGrid(double r_max, double h, int dim) : h_(h), dim_(dim) {
  check_dim(dim);
  if (!(r_max > 0.0) || !(h > 0.0)) throw GridError("radial grid needs r_max > 0 and h > 0");
  const double steps = r_max / h;
  n_ = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(n_)) > 1e-6 * steps)
    throw GridError("r_max must be an integer multiple of h");
  if (n_ < 4) throw GridError("radial grid needs at least 4 cells");
  weights_.resize(static_cast<Eigen::Index>(n_));
  const double area = sphere_area(dim);
  for (std::size_t i = 0; i < n_; ++i) {
    const double trap = i == 0 ? 0.5 * h : h;
    weights_[static_cast<Eigen::Index>(i)] = trap * area * std::pow(r(i), dim - 1);
  }
}

AxisNodes::AxisNodes(std::vector<double> nodes) : x_(std::move(nodes)) {
  if (x_.size() < 5) throw GridError("an axis needs at least 4 unknown nodes");
  if (x_.front() != 0.0) throw GridError("axis nodes must start at 0");
  for (std::size_t k = 1; k < x_.size(); ++k)
    if (!(x_[k] > x_[k - 1])) throw GridError("axis nodes must be strictly increasing");
  const double h = x_[1];
  uniform_ = true;
  for (std::size_t k = 1; k < x_.size(); ++k)
    if (std::abs(x_[k] - x_[k - 1] - h) > 1e-12 * x_.back()) uniform_ = false;
}

AxisNodes AxisNodes::uniform(double length, double h) {
  if (!(length > 0.0) || !(h > 0.0)) throw GridError("uniform axis needs length > 0 and h > 0");
  const auto n = static_cast<std::size_t>(std::ceil(length / h - 1e-9));
  std::vector<double> x(n + 1);
  for (std::size_t k = 0; k <= n; ++k) x[k] = h * static_cast<double>(k);
  return AxisNodes(std::move(x));
}

AxisNodes AxisNodes::graded(double length, double core, double per_efold) {
  if (!(length > 0.0) || !(core > 0.0) || !(per_efold > 0.0))
    throw GridError("graded axis needs positive length, core and density");
  const auto n = static_cast<std::size_t>(std::ceil(per_efold * std::asinh(length / core)));
  std::vector<double> x(n + 1);
  const double scale = length / std::sinh(static_cast<double>(n) / per_efold);
  for (std::size_t k = 0; k <= n; ++k) x[k] = scale * std::sinh(static_cast<double>(k) / per_efold);
  x[n] = length;
  return AxisNodes(std::move(x));
}

std::size_t AxisNodes::locate(double x) const {
  if (uniform_) {
    const auto k = static_cast<std::size_t>(x / x_[1]);
    return std::min(k, x_.size() - 2);
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
}

Reduction default_reduction(int dim) {
  if (dim == 2) return Reduction::QuarterPlane;
  if (dim == 3) return Reduction::HalfCylinder;
  throw GridError("symmetric grids exist for N = 2 and N = 3 only");
}

SymmetricGrid::SymmetricGrid(AxisNodes axial, AxisNodes transverse, int dim, Reduction reduction)
    : axial_(std::move(axial)), transverse_(std::move(transverse)), dim_(dim), reduction_(reduction) {
  if (default_reduction(dim) != reduction)
    throw GridError("reduction does not match dimension " + std::to_string(dim));
  const Eigen::VectorXd w1 = axis_weights(axial_);
  Eigen::VectorXd w2 = axis_weights(transverse_);
  for (Eigen::Index j = 0; j < w2.size(); ++j)
    w2[j] *= dim == 2 ? 2.0 : 2.0 * std::numbers::pi * transverse_[static_cast<std::size_t>(j)];
  weights_.resize(static_cast<Eigen::Index>(num_unknowns()));
  for (std::size_t i = 0; i < n1(); ++i)
    for (std::size_t j = 0; j < n2(); ++j)
      weights_[static_cast<Eigen::Index>(index(i, j))] =
          2.0 * w1[static_cast<Eigen::Index>(i)] * w2[static_cast<Eigen::Index>(j)];
}

SymmetricGrid SymmetricGrid::uniform(double l1, double l2, double h, int dim) {
  return SymmetricGrid(AxisNodes::uniform(l1, h), AxisNodes::uniform(l2, h), dim, default_reduction(dim));
}

Eigen::VectorXd SymmetricGrid::sample(const std::function<double(double, double)>& f) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_unknowns()));
  for (std::size_t i = 0; i < n1(); ++i)
    for (std::size_t j = 0; j < n2(); ++j)
      out[static_cast<Eigen::Index>(index(i, j))] = f(axial_[i], transverse_[j]);
  return out;
}

double cubic_uniform(const Eigen::VectorXd& f, double h, double x, double parity) {
  if (x < 0.0) return parity * cubic_uniform(f, h, -x, parity);
  const auto n = f.size() - 1;
  const double s = x / h;
  if (s >= static_cast<double>(n)) return 0.0;
  const auto k = static_cast<Eigen::Index>(s);
  const double t = s - static_cast<double>(k);
  const auto at = [&](Eigen::Index m) {
    if (m < 0) return parity * f[-m];
    return m > n ? 0.0 : f[m];
  };
  const double lm = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return lm * at(k - 1) + l0 * at(k) + l1 * at(k + 1) + l2 * at(k + 2);
}

RadialProfile::RadialProfile(RadialGrid grid, Eigen::VectorXd node_values)
    : grid_(std::move(grid)), values_(std::move(node_values)) {
  const auto n = static_cast<Eigen::Index>(grid_.num_unknowns());
  if (values_.size() != n + 1) throw GridError("profile size does not match its grid");
  const double h = grid_.h();
  deriv_.resize(n + 1);
  deriv_[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) deriv_[i] = (values_[i + 1] - values_[i - 1]) / (2.0 * h);
  deriv_[n] = (3.0 * values_[n] - 4.0 * values_[n - 1] + values_[n - 2]) / (2.0 * h);
}

double RadialProfile::operator()(double r) const { return cubic_uniform(values_, grid_.h(), r, 1.0); }

double RadialProfile::derivative(double r) const { return cubic_uniform(deriv_, grid_.h(), r, -1.0); }

}  // namespace spikelab
