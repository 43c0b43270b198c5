#include "spikelab/errors.hpp"
#include "spikelab/reduced.hpp"

#include <Eigen/SparseLU>
#include <gtest/gtest.h>

#include <cmath>

using namespace spikelab;

namespace {

// x = rho / eps solving e^{-2x} x^{-3/2} = eps^2 / 2 (scipy brentq, xtol 1e-15).
constexpr double kToyRoot = 3.926023470688225;
// x / ln(1/eps) for eps = 1e-2 ... 1e-6, same solver.
constexpr double kToyLadder[] = {0.8525251645712746, 0.8570818548810119, 0.8683242020915617, 0.8793042684072017,
                                 0.8889314326914557};
// x(2c) - x(c) at eps = 1e-2, 1e-4, 1e-6, 1e-8, same solver.
constexpr double kDoublingShift[] = {0.29265283963260647, 0.31738508558214384, 0.32687259936719215,
                                     0.33178209579988405};

ReducedConstants toy() {
  ReducedConstants k;
  k.b = k.c = k.mu2 = k.omega0 = 1.0;
  k.d11_omega0 = -1.0;
  k.dim = 2;
  return k;
}

GridSettings light_grids() {
  GridSettings g;
  g.slow_per_efold = 20.0;
  g.fast_h = 0.16;
  return g;
}

const ScalarStates& light_states() {
  static const ScalarStates st = solve_scalar_states(ModelParams{}, light_grids());
  return st;
}

GroundState unit_state(int dim, double lambda = 1.0, double mu = 1.0) {
  return solve_ground_state(PotentialSpec::constant(lambda), mu, scaled_radial_grid(lambda, dim));
}

}  // namespace

TEST(ConstantB, SechValueIsTwo) { EXPECT_NEAR(compute_b(unit_state(1)), 2.0, 1e-4); }

TEST(ConstantB, ScalesWithStiffnessAndCoefficient) {
  // U_{lambda,mu}(r) = sqrt(lambda/mu) U(sqrt(lambda) r) gives b ~ lambda^{1-N/2} / mu.
  for (int dim : {2, 3}) {
    const double b1 = compute_b(unit_state(dim));
    const double b4 = compute_b(unit_state(dim, 4.0, 2.0));
    EXPECT_NEAR(b4 / b1, std::pow(4.0, 1.0 - dim / 2.0) / 2.0, 1e-4) << dim;
    EXPECT_GT(b1, 0.0);
  }
}

TEST(ConstantC, SechPrefactorAndRate) {
  // Theta_{1,3}(z) ~ 2 sqrt2 e^{-z} int e^{-x} U^3 dx = 16 e^{-z} for U = sqrt2 sech.
  const ConstantFit f = compute_c(unit_state(1));
  EXPECT_NEAR(f.c, 16.0, 0.005 * 16.0);
  EXPECT_LE(f.drift, 0.03);
  EXPECT_NEAR(f.fitted_rate, 1.0, 0.02);
}

TEST(ConstantC, PositiveWithPredictedRate) {
  for (int dim : {2, 3}) {
    const ConstantFit f = compute_c(unit_state(dim, 4.0));
    EXPECT_GT(f.c, 0.0);
    EXPECT_NEAR(f.fitted_rate, 2.0, 0.04) << dim;
  }
}

TEST(ModelRoot, ToyConstants) {
  const ModelRoot r = model_reduced_root(0.01, toy());
  EXPECT_NEAR(r.x, kToyRoot, 1e-9);
  EXPECT_NEAR(r.rho, 0.01 * kToyRoot, 1e-11);
}

TEST(ModelRoot, LadderApproachesPeakLawFromBelow) {
  const double eps[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double prev = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double ratio = model_reduced_root(eps[i], toy()).x / std::log(1.0 / eps[i]);
    EXPECT_NEAR(ratio, kToyLadder[i], 1e-9);
    EXPECT_GT(ratio, prev);
    EXPECT_LT(ratio, 1.0);
    prev = ratio;
  }
}

TEST(ModelRoot, DoublingCShiftsTowardHalfLogTwo) {
  const double eps[] = {1e-2, 1e-4, 1e-6, 1e-8};
  ReducedConstants k2 = toy();
  k2.c = 2.0;
  double prev_gap = INFINITY;
  for (int i = 0; i < 4; ++i) {
    const double shift = model_reduced_root(eps[i], k2).x - model_reduced_root(eps[i], toy()).x;
    EXPECT_NEAR(shift, kDoublingShift[i], 1e-9);
    const double gap = std::abs(shift - std::log(2.0) / 2.0);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
}

TEST(ModelRoot, ResidualIsMonotone) {
  const ReducedConstants k = toy();
  const double eps = 0.01, hi = 10.0 * eps * std::log(1.0 / eps);
  double prev = -INFINITY;
  for (int i = 1; i <= 2000; ++i) {
    const double f = model_residual(hi * i / 2000.0, eps, k);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(ModelRoot, Refusals) {
  ReducedConstants k = toy();
  k.c = 1e12;
  EXPECT_THROW(model_reduced_root(0.5, k), SolverError);
  k = toy();
  k.d11_omega0 = 0.5;
  EXPECT_THROW(model_reduced_root(0.01, k), ConfigError);
  EXPECT_THROW(model_reduced_root(1.5, toy()), ConfigError);
}

TEST(C0, MultiplierMatchesProjection) {
  for (double d : {0.9, 1.1}) {
    const C0Evaluation e = evaluate_c0(light_states(), 0.1, d / std::sqrt(light_states().omega.omega0));
    EXPECT_LE(std::abs(e.t - e.projection), 1e-10 * std::abs(e.t)) << d;
  }
}

TEST(C0, BisectionBracketsTheSignChange) {
  RootOptions o;
  o.tolerance = 0.05;
  const DRoot r = find_d_root(light_states(), 0.1, o);
  const double unit = 1.0 / std::sqrt(light_states().omega.omega0);
  // Closest evaluations on each side of the root have opposite signs.
  double left = -INFINITY, right = INFINITY, tl = 0.0, tr = 0.0;
  for (const auto& e : r.evaluations) {
    if (e.d <= r.d && e.d > left) left = e.d, tl = e.t;
    if (e.d >= r.d && e.d < right) right = e.d, tr = e.t;
  }
  EXPECT_LT(tl * tr, 0.0);
  EXPECT_LE(right - left, 0.05 * unit + 1e-12);
  EXPECT_NEAR(r.rho, peak_law(0.1, r.d), 1e-15);
}

TEST(FullSolve, ConvergesFromTheRoot) {
  const ScalarStates& st = light_states();
  RootOptions o;
  o.tolerance = 0.01;
  const DRoot r = find_d_root(st, 0.1, o);
  const Stage s = build_stage(st, 0.1, r.d);
  const RemainderPair pair = solve_projected(s.ansatz, s.errors);
  const FullSolution fs = full_solve(s, FieldPair{pair.phi.values, pair.psi.values});
  EXPECT_LE(fs.residual_u, 1e-9);
  EXPECT_LE(fs.residual_v, 1e-9);
  EXPECT_TRUE(fs.positive);
  ASSERT_EQ(fs.peaks.size(), 1u);
  EXPECT_NEAR(fs.rho_hat, r.rho, 0.1 * r.rho);
  EXPECT_LT(fs.upsilon_distance, 0.1);
  // The residual is recomputed here from the returned fields.
  const FieldPair f = full_residual(s.ansatz, fs.u.values, fs.v.values);
  EXPECT_LE(f.slow.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(f.fast.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FullSolve, DecouplesAtZeroCouplingAndReportsMerger) {
  ModelParams p;
  p.beta = 0.0;
  const ScalarStates st = solve_scalar_states(p, light_grids());
  const Stage s = build_stage(st, 0.1, 0.0);
  const AnsatzBundle& b = s.ansatz;
  // Single central bump for v: the decoupled problem has it as a solution.
  const Eigen::VectorXd bump = b.fast->sample([&](double y1, double t) { return b.spike(std::hypot(y1, t)); });
  const FieldPair start{Eigen::VectorXd::Zero(b.xi.values.size()), bump - b.theta.values};

  EXPECT_THROW(full_solve(s, start), PeakMergerError);
  const FullSolution fs = full_solve(s, start, {.require_two_peaks = false});
  ASSERT_EQ(fs.peaks.size(), 1u);
  EXPECT_EQ(fs.peaks[0], 0.0);
  EXPECT_EQ(fs.rho_hat, 0.0);

  // Scalar Newton for -Delta u + V u = u^3 on the slow grid, from Upsilon.
  Eigen::VectorXd u = b.slow->sample([&](double x1, double t) { return b.upsilon(std::hypot(x1, t)); });
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd f =
        -(b.lap_slow * u) + (b.v_slow.array() * u.array() - u.array().cube()).matrix();
    if (f.cwiseAbs().maxCoeff() < 1e-11) break;
    SparseMatrix j = -b.lap_slow;
    j.diagonal() += (b.v_slow.array() - 3.0 * u.array().square()).matrix();
    Eigen::SparseLU<SparseMatrix> lu(j);
    u -= lu.solve(f);
  }
  EXPECT_LE((fs.u.values - u).cwiseAbs().maxCoeff(), 1e-9);

  // v solves the scalar fast equation with W alone.
  const Eigen::VectorXd g =
      -(b.lap_fast * fs.v.values) + (b.w_fast.array() * fs.v.values.array() - fs.v.values.array().cube()).matrix();
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FullSolve, RejectsMismatchedStart) {
  const Stage s = build_stage(light_states(), 0.1, 0.0);
  EXPECT_THROW(full_solve(s, FieldPair{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)}), GridError);
}
