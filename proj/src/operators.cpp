#include "spikelab/operators.hpp"

#include "spikelab/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace spikelab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Second-derivative coefficients along one axis at node k, paired with the
// neighbor index. Mirror node at k = 0, Dirichlet node dropped by the caller.
struct Stencil {
  std::array<long, 3> idx;
  std::array<double, 3> c;
  int size;
};

Stencil second_derivative(const AxisNodes& ax, std::size_t k) {
  if (k == 0) {
    const double h = ax[1];
    return {{0, 1, 0}, {-2.0 / (h * h), 2.0 / (h * h), 0.0}, 2};
  }
  const double hm = ax[k] - ax[k - 1];
  const double hp = ax[k + 1] - ax[k];
  const auto kk = static_cast<long>(k);
  return {{kk - 1, kk, kk + 1},
          {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))},
          3};
}

Stencil first_derivative(const AxisNodes& ax, std::size_t k) {
  const double hm = ax[k] - ax[k - 1];
  const double hp = ax[k + 1] - ax[k];
  const auto kk = static_cast<long>(k);
  return {{kk - 1, kk, kk + 1},
          {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))},
          3};
}

}  // namespace

namespace {

SparseMatrix laplacian_radial_4(const RadialGrid& grid, int dim) {
  const auto n = static_cast<long>(grid.num_unknowns());
  const double h = grid.h();
  const double d2 = 1.0 / (12.0 * h * h);
  Triplets t;
  t.reserve(static_cast<std::size_t>(5 * n));
  t.emplace_back(0, 0, -30.0 * dim * d2);
  t.emplace_back(0, 1, 32.0 * dim * d2);
  t.emplace_back(0, 2, -2.0 * dim * d2);
  for (long i = 1; i < n; ++i) {
    const double d1 = (dim - 1) / (grid.r(static_cast<std::size_t>(i)) * 12.0 * h);
    const std::array<double, 5> c{-d2 + d1, 16.0 * d2 - 8.0 * d1, -30.0 * d2, 16.0 * d2 + 8.0 * d1, -d2 - d1};
    for (long k = -2; k <= 2; ++k) {
      const long col = std::abs(i + k);
      if (col < n) t.emplace_back(i, col, c[static_cast<std::size_t>(k + 2)]);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

SparseMatrix laplacian_radial(const RadialGrid& grid, int dim, int order) {
  if (dim < 1 || dim > 3) throw GridError("laplacian_radial: dimension must be 1, 2 or 3");
  if (dim != grid.dim()) throw GridError("laplacian_radial: dimension does not match the grid");
  if (order != 2 && order != 4) throw GridError("laplacian_radial: order must be 2 or 4");
  if (order == 4) return laplacian_radial_4(grid, dim);
  const auto n = static_cast<long>(grid.num_unknowns());
  const double h = grid.h();
  const double h2 = h * h;
  Triplets t;
  t.reserve(static_cast<std::size_t>(3 * n));
  t.emplace_back(0, 0, -2.0 * dim / h2);
  t.emplace_back(0, 1, 2.0 * dim / h2);
  for (long i = 1; i < n; ++i) {
    const double drift = (dim - 1) / (grid.r(static_cast<std::size_t>(i)) * 2.0 * h);
    t.emplace_back(i, i - 1, 1.0 / h2 - drift);
    t.emplace_back(i, i, -2.0 / h2);
    if (i + 1 < n) t.emplace_back(i, i + 1, 1.0 / h2 + drift);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix laplacian_symmetric(const SymmetricGrid& grid) {
  const std::size_t n1 = grid.n1();
  const std::size_t n2 = grid.n2();
  const bool cylinder = grid.reduction() == Reduction::HalfCylinder;
  const auto& ax = grid.axial();
  const auto& tr = grid.transverse();
  Triplets t;
  t.reserve(grid.num_unknowns() * 5);
  for (std::size_t i = 0; i < n1; ++i) {
    const Stencil sa = second_derivative(ax, i);
    for (std::size_t j = 0; j < n2; ++j) {
      const auto row = static_cast<long>(grid.index(i, j));
      for (int s = 0; s < sa.size; ++s) {
        const auto ii = static_cast<std::size_t>(sa.idx[static_cast<std::size_t>(s)]);
        if (ii < n1) t.emplace_back(row, static_cast<long>(grid.index(ii, j)), sa.c[static_cast<std::size_t>(s)]);
      }
      Stencil st = second_derivative(tr, j);
      if (cylinder) {
        if (j == 0) {
          // At r' = 0 the transverse Laplacian is twice the second derivative.
          for (auto& c : st.c) c *= 2.0;
        } else {
          const Stencil d1 = first_derivative(tr, j);
          for (int s = 0; s < 3; ++s) st.c[static_cast<std::size_t>(s)] += d1.c[static_cast<std::size_t>(s)] / tr[j];
        }
      }
      for (int s = 0; s < st.size; ++s) {
        const auto jj = static_cast<std::size_t>(st.idx[static_cast<std::size_t>(s)]);
        if (jj < n2) t.emplace_back(row, static_cast<long>(grid.index(i, jj)), st.c[static_cast<std::size_t>(s)]);
      }
    }
  }
  const auto n = static_cast<long>(grid.num_unknowns());
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

double integrate(const Eigen::VectorXd& values, const RadialGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.num_unknowns());
  if (values.size() != n && values.size() != n + 1) throw GridError("integrate: field size does not match grid");
  return grid.weights().dot(values.head(n));
}

double integrate(const Eigen::VectorXd& values, const SymmetricGrid& grid) {
  if (values.size() != grid.weights().size()) throw GridError("integrate: field size does not match grid");
  return grid.weights().dot(values);
}

double integrate(const SymmetricField& field) { return integrate(field.values, *field.grid); }

double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& weights) {
  return (a.array() * b.array() * weights.array()).sum();
}

double l2_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
  return std::sqrt(inner(values, values, weights));
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

namespace {

// Four interpolation nodes around x on a half-axis with even mirror images,
// returned as (unknown index or -1 for the zero Dirichlet node, weight).
int axis_stencil(const AxisNodes& ax, double x, std::array<long, 4>& idx, std::array<double, 4>& w) {
  const auto n = static_cast<long>(ax.num_unknowns());
  if (x >= ax.length()) return 0;
  const auto k = static_cast<long>(ax.locate(x));
  long s = std::min(k - 1, n - 3);
  std::array<double, 4> pos{};
  for (int m = 0; m < 4; ++m) {
    const long node = s + m;
    const long mirror = node < 0 ? -node : node;
    pos[static_cast<std::size_t>(m)] = node < 0 ? -ax[static_cast<std::size_t>(mirror)] : ax[static_cast<std::size_t>(mirror)];
    idx[static_cast<std::size_t>(m)] = mirror >= n ? -1 : mirror;
  }
  for (int m = 0; m < 4; ++m) {
    double l = 1.0;
    for (int q = 0; q < 4; ++q)
      if (q != m) l *= (x - pos[static_cast<std::size_t>(q)]) / (pos[static_cast<std::size_t>(m)] - pos[static_cast<std::size_t>(q)]);
    w[static_cast<std::size_t>(m)] = l;
  }
  return 4;
}

}  // namespace

SparseMatrix interpolation_matrix(const SymmetricGrid& source, const std::vector<GridPoint>& points) {
  Triplets t;
  t.reserve(points.size() * 16);
  std::array<long, 4> i1{}, i2{};
  std::array<double, 4> w1{}, w2{};
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double a = std::abs(points[p].axial);
    const double b = std::abs(points[p].transverse);
    if (!axis_stencil(source.axial(), a, i1, w1) || !axis_stencil(source.transverse(), b, i2, w2)) continue;
    for (int m = 0; m < 4; ++m) {
      if (i1[static_cast<std::size_t>(m)] < 0) continue;
      for (int q = 0; q < 4; ++q) {
        if (i2[static_cast<std::size_t>(q)] < 0) continue;
        t.emplace_back(static_cast<long>(p),
                       static_cast<long>(source.index(static_cast<std::size_t>(i1[static_cast<std::size_t>(m)]),
                                                      static_cast<std::size_t>(i2[static_cast<std::size_t>(q)]))),
                       w1[static_cast<std::size_t>(m)] * w2[static_cast<std::size_t>(q)]);
      }
    }
  }
  SparseMatrix a(static_cast<long>(points.size()), static_cast<long>(source.num_unknowns()));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

std::vector<GridPoint> scaled_nodes(const SymmetricGrid& target, double factor) {
  std::vector<GridPoint> pts;
  pts.reserve(target.num_unknowns());
  for (std::size_t i = 0; i < target.n1(); ++i)
    for (std::size_t j = 0; j < target.n2(); ++j)
      pts.push_back({factor * target.axial()[i], factor * target.transverse()[j]});
  return pts;
}

}  // namespace spikelab
