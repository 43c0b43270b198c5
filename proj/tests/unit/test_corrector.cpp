#include "spikelab/corrector.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/pipeline.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace spikelab;

namespace {

GridSettings light_grids() {
  GridSettings g;
  g.slow_per_efold = 20.0;
  g.fast_h = 0.16;
  return g;
}

GridSettings tiny_grids() {
  GridSettings g;
  g.slow_extent = 9.0;
  g.slow_per_efold = 5.0;
  g.fast_h = 0.7;
  g.fast_margin = 7.0;
  return g;
}

Stage light_stage(double beta, double eps, const GridSettings& grids = light_grids()) {
  ModelParams p;
  p.beta = beta;
  return build_stage(solve_scalar_states(p, grids), eps, 0.0);
}

// Smooth even test pair: Gaussians on each grid, scaled by `amp`.
FieldPair smooth_pair(const AnsatzBundle& b, double amp) {
  const double s = b.shift;
  return {amp * b.slow->sample([](double x1, double t) { return std::exp(-(x1 * x1 + 2.0 * t * t)); }),
          amp * b.fast->sample([s](double y1, double t) {
            return std::exp(-0.5 * ((y1 - s) * (y1 - s) + t * t)) + std::exp(-0.5 * ((y1 + s) * (y1 + s) + t * t)) -
                   0.3 * std::exp(-0.2 * (y1 * y1 + t * t));
          })};
}

FieldPair random_pair(const AnsatzBundle& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldPair x{Eigen::VectorXd(b.slow->num_unknowns()), Eigen::VectorXd(b.fast->num_unknowns())};
  for (Eigen::Index k = 0; k < x.slow.size(); ++k) x.slow[k] = u(rng);
  for (Eigen::Index k = 0; k < x.fast.size(); ++k) x.fast[k] = u(rng);
  return x;
}

FieldPair remove_z(FieldPair x, const AnsatzBundle& b) {
  x.fast -= inner(x.fast, b.z.z.values, b.fast->weights()) / b.z.norm_sq * b.z.z.values;
  return x;
}

double pair_max(const FieldPair& x) { return std::max(max_abs(x.slow), max_abs(x.fast)); }

FieldPair combine(double a, const FieldPair& x, double c, const FieldPair& y) {
  return {a * x.slow + c * y.slow, a * x.fast + c * y.fast};
}

// Smallest singular value of the D^{1/2}-scaled linearization, dense, with
// the constraint imposed through an orthonormal basis of the complement of Z.
double dense_sigma_min(const AnsatzBundle& b, bool constrained) {
  const Eigen::Index ns = static_cast<Eigen::Index>(b.slow->num_unknowns());
  const Eigen::Index n = ns + static_cast<Eigen::Index>(b.fast->num_unknowns());
  Eigen::VectorXd sw(n);
  sw << b.slow->weights().cwiseSqrt(), b.fast->weights().cwiseSqrt();
  // Columns of the dense operator from eval_L on unit vectors.
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    FieldPair e{Eigen::VectorXd::Zero(ns), Eigen::VectorXd::Zero(n - ns)};
    if (k < ns)
      e.slow[k] = 1.0 / sw[k];
    else
      e.fast[k - ns] = 1.0 / sw[k];
    const FieldPair l = eval_L(e, b);
    a.col(k) << l.slow, l.fast;
    a.col(k) = a.col(k).cwiseProduct(sw);
  }
  if (!constrained) return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues().minCoeff();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  z.tail(n - ns) = b.z.z.values.cwiseProduct(sw.tail(n - ns));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = q.rightCols(n - 1);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(basis.transpose() * a * basis).singularValues().minCoeff();
}

}  // namespace

TEST(Corrector, ZeroPairMapsToZero) {
  const Stage st = light_stage(-1.0, 0.1);
  const FieldPair zero{Eigen::VectorXd::Zero(st.ansatz.slow->num_unknowns()),
                       Eigen::VectorXd::Zero(st.ansatz.fast->num_unknowns())};
  EXPECT_EQ(pair_max(eval_L(zero, st.ansatz)), 0.0);
  EXPECT_EQ(pair_max(eval_N(zero, st.ansatz)), 0.0);
}

TEST(Corrector, LinearOperatorIsLinearOnRandomFields) {
  const Stage st = light_stage(-1.0, 0.1);
  const FieldPair x = random_pair(st.ansatz, 1), y = random_pair(st.ansatz, 2);
  const double a = 0.37, c = -1.9;
  const FieldPair lhs = eval_L(combine(a, x, c, y), st.ansatz);
  const FieldPair rhs = combine(a, eval_L(x, st.ansatz), c, eval_L(y, st.ansatz));
  EXPECT_LE(pair_max(combine(1.0, lhs, -1.0, rhs)) / pair_max(lhs), 1e-12);
}

TEST(Corrector, DecoupledBlocksAtZeroCoupling) {
  const Stage st = light_stage(0.0, 0.1);
  const AnsatzBundle& b = st.ansatz;
  const FieldPair x = smooth_pair(b, 1.0);
  const FieldPair only_phi{x.slow, Eigen::VectorXd::Zero(x.fast.size())};
  const FieldPair only_psi{Eigen::VectorXd::Zero(x.slow.size()), x.fast};
  EXPECT_EQ(max_abs(eval_L(only_phi, b).fast), 0.0);
  EXPECT_EQ(max_abs(eval_L(only_psi, b).slow), 0.0);
  // N1 = mu1 phi^2 (3 Xi + phi) alone.
  const Eigen::ArrayXd phi = x.slow.array(), xi = b.xi.values.array();
  const Eigen::VectorXd expected = (b.mu1 * phi.square() * (3.0 * xi + phi)).matrix();
  EXPECT_LE(max_abs(eval_N(x, b).slow - expected), 1e-14);
  EXPECT_EQ(max_abs(eval_N(only_phi, b).fast), 0.0);
}

TEST(Corrector, RemainderIsQuadraticForSmallAmplitude) {
  const Stage st = light_stage(-1.0, 0.1);
  const FieldPair x = smooth_pair(st.ansatz, 1.0);
  std::vector<double> q;
  for (double s : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const FieldPair nl = eval_N(combine(s, x, 0.0, x), st.ansatz);
    q.push_back(pair_max(nl) / (s * s));
  }
  // q(s) = q0 + O(s): successive differences shrink tenfold.
  EXPECT_GT(q.back(), 0.0);
  for (std::size_t k = 2; k < q.size(); ++k)
    EXPECT_NEAR(std::abs(q[k] - q[k - 1]) / std::abs(q[k - 1] - q[k - 2]), 0.1, 0.02);
}

TEST(Corrector, JacobianMatchesFiniteDifferences) {
  const Stage st = light_stage(-1.0, 0.1);
  const AnsatzBundle& b = st.ansatz;
  const FieldPair x = smooth_pair(b, 0.05);
  const FieldPair dir = random_pair(b, 7);
  const auto g = [&](const FieldPair& p) {
    const FieldPair l = eval_L(p, b), nl = eval_N(p, b);
    Eigen::VectorXd out(l.slow.size() + l.fast.size());
    out << l.slow - nl.slow, l.fast - nl.fast;
    return out;
  };
  const double h = 1e-4;
  const Eigen::VectorXd fd = (g(combine(1.0, x, h, dir)) - g(combine(1.0, x, -h, dir))) / (2.0 * h);
  Eigen::VectorXd d(dir.slow.size() + dir.fast.size());
  d << dir.slow, dir.fast;
  const Eigen::VectorXd jd = coupled_jacobian(x, b) * d;
  EXPECT_LE((fd - jd).norm() / jd.norm(), 1e-6);
}

TEST(Corrector, LinearModeRecoversManufacturedPair) {
  const Stage st = light_stage(-1.0, 0.1);
  const AnsatzBundle& b = st.ansatz;
  const FieldPair exact = remove_z(smooth_pair(b, 0.1), b);
  const double t_exact = 0.25;
  FieldPair rhs = eval_L(exact, b);
  rhs.fast -= t_exact * b.z.z.values;
  ProjectedOptions opt;
  opt.linear = true;
  const RemainderPair r = solve_projected(b, rhs, opt);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE(max_abs(r.phi.values - exact.slow) / max_abs(exact.slow), 1e-9);
  EXPECT_LE(max_abs(r.psi.values - exact.fast) / max_abs(exact.fast), 1e-9);
  EXPECT_NEAR(r.t, t_exact, 1e-9);
}

TEST(Corrector, NewtonRecoversManufacturedNonlinearPair) {
  const Stage st = light_stage(-1.0, 0.1);
  const AnsatzBundle& b = st.ansatz;
  const FieldPair exact = remove_z(smooth_pair(b, 0.2), b);
  const FieldPair l = eval_L(exact, b), nl = eval_N(exact, b);
  FieldPair rhs{l.slow - nl.slow, l.fast - nl.fast + 0.1 * b.z.z.values};
  const RemainderPair r = solve_projected(b, rhs);
  EXPECT_GT(r.iterations, 1);
  EXPECT_LE(max_abs(r.psi.values - exact.fast) / max_abs(exact.fast), 1e-8);
  EXPECT_NEAR(r.t, -0.1, 1e-8);
}

TEST(Corrector, ConstraintAndMultiplierIdentity) {
  const Stage st = light_stage(-1.0, 0.07);
  const RemainderPair r = solve_projected(st.ansatz, st.errors);
  EXPECT_LE(r.orthogonality, 1e-12);
  EXPECT_LE(r.residual, 1e-10 * std::max(1.0, std::hypot(st.errors.norm_e1, st.errors.norm_e2)));
  const double t = multiplier_projection(st.ansatz, {st.errors.e1.values, st.errors.e2.values}, r);
  EXPECT_NEAR(r.t / t, 1.0, 1e-10);
  EXPECT_GT(r.norms.pair(), 0.0);
  EXPECT_GE(r.norms.h2_psi, r.norms.l2_psi);
}

TEST(Corrector, RejectsFieldsFromAnotherGrid) {
  const Stage st = light_stage(-1.0, 0.1);
  EXPECT_THROW(eval_L({Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)}, st.ansatz), GridError);
}

TEST(Coercivity, MatchesDenseSingularValues) {
  for (double beta : {0.0, -1.0}) {
    const Stage st = light_stage(beta, 0.1, tiny_grids());
    const Eigen::Index n = static_cast<Eigen::Index>(st.ansatz.slow->num_unknowns() + st.ansatz.fast->num_unknowns());
    ASSERT_LT(n, 2500) << "oracle grid grew too large";
    const CoercivityReport c = coercivity_probe(st.ansatz, true, 1e-12, 5000);
    const CoercivityReport u = coercivity_probe(st.ansatz, false, 1e-12, 5000);
    EXPECT_NEAR(c.sigma_min / dense_sigma_min(st.ansatz, true), 1.0, 1e-5) << "beta " << beta;
    EXPECT_NEAR(u.sigma_min / dense_sigma_min(st.ansatz, false), 1.0, 1e-5) << "beta " << beta;
  }
}

TEST(Coercivity, ConstraintRemovesTheNearKernel) {
  const Stage st = light_stage(-1.0, 0.05);
  const CoercivityReport c = coercivity_probe(st.ansatz, true);
  const CoercivityReport u = coercivity_probe(st.ansatz, false);
  EXPECT_GT(c.sigma_min, 0.0);
  EXPECT_LT(u.sigma_min, c.sigma_min);
  EXPECT_EQ(c.eps, 0.05);
}
