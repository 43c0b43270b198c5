#include "spikelab/errors.hpp"
#include "spikelab/grid.hpp"
#include "spikelab/linear_solve.hpp"
#include "spikelab/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spikelab;

namespace {

Eigen::VectorXd sample_radial(const RadialGrid& g, double (*f)(double)) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.num_unknowns()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(g.r(static_cast<std::size_t>(i)));
  return v;
}

double gaussian(double r) { return std::exp(-r * r); }

double radial_gaussian_error(double h, int dim) {
  const RadialGrid g(6.0, h, dim);
  const Eigen::VectorXd u = sample_radial(g, gaussian);
  const Eigen::VectorXd lap = laplacian_radial(g, dim) * u;
  double err = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = g.r(static_cast<std::size_t>(i));
    err = std::max(err, std::abs(lap[i] - (4.0 * r * r - 2.0 * dim) * gaussian(r)));
  }
  return err;
}

double symmetric_gaussian_error(const SymmetricGrid& g) {
  const Eigen::VectorXd u = g.sample([](double a, double b) { return std::exp(-a * a - b * b); });
  const Eigen::VectorXd lap = laplacian_symmetric(g) * u;
  const Eigen::VectorXd exact = g.sample([&](double a, double b) {
    const double s = a * a + b * b;
    return (4.0 * s - 2.0 * g.dim()) * std::exp(-s);
  });
  return max_abs(lap - exact);
}

}  // namespace

TEST(RadialLaplacian, QuadraticGivesSixInThreeDimensions) {
  const RadialGrid g(4.0, 0.05, 3);
  const Eigen::VectorXd u = sample_radial(g, [](double r) { return r * r; });
  const Eigen::VectorXd lap = laplacian_radial(g, 3) * u;
  for (Eigen::Index i = 0; i + 1 < lap.size(); ++i) EXPECT_NEAR(lap[i], 6.0, 1e-9) << "node " << i;
}

TEST(RadialLaplacian, ConstantsAreHarmonic) {
  for (int dim = 1; dim <= 3; ++dim) {
    const RadialGrid g(2.0, 0.1, dim);
    const Eigen::VectorXd lap = laplacian_radial(g, dim) * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.num_unknowns()));
    for (Eigen::Index i = 0; i + 1 < lap.size(); ++i) EXPECT_NEAR(lap[i], 0.0, 1e-10);
  }
}

TEST(RadialLaplacian, SecondOrderOnGaussian) {
  for (int dim = 1; dim <= 3; ++dim) {
    const double ratio = radial_gaussian_error(0.02, dim) / radial_gaussian_error(0.01, dim);
    EXPECT_GE(ratio, 3.5) << "N=" << dim;
    EXPECT_LE(ratio, 4.5) << "N=" << dim;
  }
}

TEST(RadialLaplacian, RejectsBadDimension) {
  const RadialGrid g(2.0, 0.1, 2);
  EXPECT_THROW(laplacian_radial(g, 4), GridError);
  EXPECT_THROW(RadialGrid(2.0, 0.1, 0), GridError);
}

TEST(SymmetricLaplacian, QuadraticInX1GivesTwo) {
  const SymmetricGrid g = SymmetricGrid::uniform(3.0, 3.0, 0.1, 2);
  const Eigen::VectorXd lap = laplacian_symmetric(g) * g.sample([](double a, double) { return a * a; });
  for (std::size_t i = 0; i + 1 < g.n1(); ++i)
    for (std::size_t j = 0; j + 1 < g.n2(); ++j) EXPECT_NEAR(lap[static_cast<Eigen::Index>(g.index(i, j))], 2.0, 1e-9);
}

TEST(SymmetricLaplacian, ReflectedNeighbourAtAxisForCosine) {
  // cos(x1) is even; at x1 = 0 the stencil must see the mirrored neighbour.
  for (double h : {0.1, 0.05}) {
    const SymmetricGrid g = SymmetricGrid::uniform(2.0, 2.0, h, 2);
    const Eigen::VectorXd lap = laplacian_symmetric(g) * g.sample([](double a, double) { return std::cos(a); });
    for (std::size_t j = 0; j + 1 < g.n2(); ++j)
      EXPECT_NEAR(lap[static_cast<Eigen::Index>(g.index(0, j))], -1.0, h * h / 12.0 * 1.01);
  }
}

TEST(SymmetricLaplacian, ConstantGivesZeroAwayFromEdges) {
  for (int dim : {2, 3}) {
    const SymmetricGrid g = SymmetricGrid::uniform(2.0, 2.0, 0.1, dim);
    const Eigen::VectorXd lap = laplacian_symmetric(g) * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.num_unknowns()));
    for (std::size_t i = 0; i + 1 < g.n1(); ++i)
      for (std::size_t j = 0; j + 1 < g.n2(); ++j) EXPECT_NEAR(lap[static_cast<Eigen::Index>(g.index(i, j))], 0.0, 1e-9);
  }
}

TEST(SymmetricLaplacian, SecondOrderUniformAndGraded) {
  for (int dim : {2, 3}) {
    const double uni = symmetric_gaussian_error(SymmetricGrid::uniform(6.0, 6.0, 0.04, dim)) /
                       symmetric_gaussian_error(SymmetricGrid::uniform(6.0, 6.0, 0.02, dim));
    EXPECT_GE(uni, 3.5) << "uniform N=" << dim;
    EXPECT_LE(uni, 4.5) << "uniform N=" << dim;
    const auto graded = [dim](double per_efold) {
      return SymmetricGrid(AxisNodes::graded(6.0, 0.5, per_efold), AxisNodes::graded(6.0, 0.5, per_efold), dim,
                           default_reduction(dim));
    };
    const double gr = symmetric_gaussian_error(graded(20.0)) / symmetric_gaussian_error(graded(40.0));
    EXPECT_GE(gr, 3.5) << "graded N=" << dim;
    EXPECT_LE(gr, 4.5) << "graded N=" << dim;
  }
}

TEST(SymmetricLaplacian, RejectsInconsistentReduction) {
  EXPECT_THROW(SymmetricGrid(AxisNodes::uniform(1.0, 0.1), AxisNodes::uniform(1.0, 0.1), 2, Reduction::HalfCylinder),
               GridError);
  EXPECT_THROW(SymmetricGrid(AxisNodes::uniform(1.0, 0.1), AxisNodes::uniform(1.0, 0.1), 3, Reduction::QuarterPlane),
               GridError);
}

TEST(Quadrature, GaussianInThreeDimensions) {
  const RadialGrid g(8.0, 0.01, 3);
  EXPECT_NEAR(integrate(sample_radial(g, gaussian), g), std::pow(std::numbers::pi, 1.5), 1e-6);
}

TEST(Quadrature, SechSquaredOnLine) {
  const RadialGrid g(20.0, 0.01, 1);
  const Eigen::VectorXd u = sample_radial(g, [](double r) { return 2.0 / (std::cosh(r) * std::cosh(r)); });
  EXPECT_NEAR(integrate(u, g), 4.0, 1e-8);
}

TEST(Quadrature, ZeroField) {
  const SymmetricGrid g = SymmetricGrid::uniform(2.0, 2.0, 0.1, 2);
  EXPECT_EQ(integrate(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_unknowns())), g), 0.0);
}

TEST(Quadrature, QuarterPlaneMatchesFullGrid) {
  // Trapezoid sum over the full square [-L, L]^2, written out node by node.
  const double l = 3.0, h = 0.25;
  const auto f = [](double a, double b) { return std::exp(-a * a - 0.5 * b * b) * (1.0 + a * a * b * b); };
  const int n = static_cast<int>(std::lround(l / h));
  double full = 0.0;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      const double wi = std::abs(i) == n ? 0.5 : 1.0;
      const double wj = std::abs(j) == n ? 0.5 : 1.0;
      full += wi * wj * h * h * f(i * h, j * h) * (std::abs(i) == n || std::abs(j) == n ? 0.0 : 1.0);
    }
  const SymmetricGrid g = SymmetricGrid::uniform(l, l, h, 2);
  EXPECT_NEAR(integrate(g.sample(f), g), full, 1e-13 * std::abs(full));
}

TEST(Quadrature, HalfCylinderGaussian) {
  const SymmetricGrid g = SymmetricGrid::uniform(8.0, 8.0, 0.02, 3);
  const double q = integrate(g.sample([](double a, double b) { return std::exp(-a * a - b * b); }), g);
  EXPECT_NEAR(q, std::pow(std::numbers::pi, 1.5), 1e-3);
}

TEST(LinearSolve, IdentityReturnsRhs) {
  SparseMatrix id(5, 5);
  id.setIdentity();
  Eigen::VectorXd b(5);
  b << 1, -2, 3, 0.5, 7;
  const LinearSolution s = solve_linear({id, b});
  EXPECT_LT((s.x - b).norm(), 1e-15);
}

TEST(LinearSolve, ZeroRhsGivesZero) {
  const SymmetricGrid g = SymmetricGrid::uniform(2.0, 2.0, 0.1, 2);
  SparseMatrix a = -laplacian_symmetric(g);
  const LinearSolution s = solve_linear({a, Eigen::VectorXd::Zero(a.rows())});
  EXPECT_EQ(s.x.norm(), 0.0);
}

TEST(LinearSolve, RecoversDirichletEigenmode) {
  // cos(pi x1/2L) cos(pi x2/2L) is even and vanishes on the outer edges.
  const double l = 2.0;
  const double k = std::numbers::pi / (2.0 * l);
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const SymmetricGrid g = SymmetricGrid::uniform(l, l, h, 2);
    SparseMatrix a = -laplacian_symmetric(g);
    SparseMatrix id(a.rows(), a.cols());
    id.setIdentity();
    a += id;
    const Eigen::VectorXd mode = g.sample([k](double x, double y) { return std::cos(k * x) * std::cos(k * y); });
    const LinearSolution s = solve_linear({a, (1.0 + 2.0 * k * k) * mode});
    EXPECT_LE(s.relative_residual, 1e-12);
    const double err = max_abs(s.x - mode);
    EXPECT_LT(err, 2e-3);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.5);
    prev = err;
  }
}

TEST(LinearSolve, SolveThenApplyIsIdentity) {
  const SymmetricGrid g = SymmetricGrid::uniform(4.0, 4.0, 0.05, 3);
  SparseMatrix a = -laplacian_symmetric(g);
  const Eigen::VectorXd pot = g.sample([](double x, double y) { return 1.0 + 0.3 * std::cos(x) - 2.0 * std::exp(-x * x - y * y); });
  a += SparseMatrix(pot.asDiagonal());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    const double c1 = uni(rng), c2 = uni(rng), c3 = uni(rng);
    const Eigen::VectorXd b = g.sample([&](double x, double y) {
      return c1 * std::exp(-x * x) + c2 * std::cos(0.5 * x * y) * std::exp(-y * y) + c3 / (1.0 + x * x + y * y);
    });
    const LinearSolution s = solve_linear({a, b});
    EXPECT_LE((a * s.x - b).norm() / b.norm(), 1e-10);
  }
}

TEST(LinearSolve, SingularReportsPivot) {
  SparseMatrix a(4, 4);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 2.0;
  a.insert(3, 3) = 1.0;
  try {
    solve_linear({a, Eigen::VectorXd::Ones(4)});
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_GE(e.pivot(), 0);
  }
}

TEST(Interpolation, CubicOnGradedGridIsFourthOrder) {
  const auto f = [](double a, double b) { return std::exp(-a * a) * std::cos(b) / (1.0 + b * b); };
  std::vector<GridPoint> pts;
  for (double a = 0.0; a < 3.0; a += 0.173) pts.push_back({a, 0.5 * a + 0.031});
  pts.push_back({-0.3, 0.2});
  std::vector<double> errs;
  for (double dens : {10.0, 20.0}) {
    const SymmetricGrid g(AxisNodes::graded(8.0, 1.0, dens), AxisNodes::graded(8.0, 1.0, dens), 2, Reduction::QuarterPlane);
    const Eigen::VectorXd v = interpolation_matrix(g, pts) * g.sample(f);
    double e = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p)
      e = std::max(e, std::abs(v[static_cast<Eigen::Index>(p)] - f(pts[p].axial, pts[p].transverse)));
    errs.push_back(e);
  }
  EXPECT_LT(errs[1], 1e-4);
  EXPECT_GT(errs[0] / errs[1], 10.0);
}

TEST(Interpolation, OutsideDomainIsZero) {
  const SymmetricGrid g = SymmetricGrid::uniform(2.0, 2.0, 0.1, 2);
  const Eigen::VectorXd v = interpolation_matrix(g, {{2.5, 0.0}, {0.0, 2.0}}) * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.num_unknowns()));
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 0.0);
}

TEST(RadialProfileTest, InterpolatesValueAndDerivative) {
  const RadialGrid g(10.0, 0.01, 1);
  Eigen::VectorXd u(static_cast<Eigen::Index>(g.num_nodes()));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::exp(-std::pow(g.r(static_cast<std::size_t>(i)), 2));
  u[u.size() - 1] = 0.0;
  const RadialProfile p(g, u);
  for (double r : {0.0, 0.0037, 0.5, 1.234, 2.7}) {
    EXPECT_NEAR(p(r), std::exp(-r * r), 1e-8);
    EXPECT_NEAR(p(-r), std::exp(-r * r), 1e-8);
    EXPECT_NEAR(p.derivative(r), -2.0 * r * std::exp(-r * r), 1e-4);
  }
  EXPECT_EQ(p(11.0), 0.0);
}
