#include "spikelab/corrections.hpp"

#include "spikelab/errors.hpp"
#include "spikelab/fit.hpp"
#include "spikelab/linear_solve.hpp"
#include "spikelab/operators.hpp"

#include <cmath>
#include <vector>

namespace spikelab {

namespace {

constexpr const char* kModule = "corrections";

void check_shift(const RadialProfile& p, double shift, const GridPtr& fast) {
  // Beyond the profile's support the bump is truncated to zero anyway; what
  // matters is that both peaks sit well inside the fast box.
  if (!(shift >= 0.0) || shift + 0.25 * p.grid().r_max() > fast->axial().length() + 1e-12)
    throw GridError("shift " + std::to_string(shift) + " does not fit inside the fast grid");
}

}  // namespace

double two_bump(const RadialProfile& p, double y1, double t, double shift) {
  return p(std::hypot(y1 - shift, t)) + p(std::hypot(y1 + shift, t));
}

double bump_dx1(const RadialProfile& p, double y1, double t, double center) {
  const double r = std::hypot(y1 - center, t);
  return r > 0.0 ? p.derivative(r) * (y1 - center) / r : 0.0;
}

PhiSolution solve_phi_rhs(const GroundState& upsilon, double mu1, const GridPtr& slow, const Eigen::VectorXd& rhs) {
  const SymmetricGrid& g = *slow;
  const int dim = g.dim();
  const Eigen::VectorXd coef = g.sample([&](double x1, double t) {
    const double y = upsilon.profile(std::hypot(x1, t));
    return upsilon.potential.at(x1, t, dim) - 3.0 * mu1 * y * y;
  });
  SparseMatrix a = -laplacian_symmetric(g);
  a += SparseMatrix(coef.asDiagonal());
  LinearSolution sol;
  try {
    sol = solve_linear({a, rhs});
  } catch (const SingularMatrixError& e) {
    throw SolverError(kModule, std::string("degenerate linearization around Upsilon: ") + e.what());
  }
  PhiSolution out;
  out.field = {slow, sol.x};
  out.sup_norm = max_abs(sol.x);
  out.at_origin = sol.x[0];
  out.relative_residual = sol.relative_residual;
  return out;
}

PhiSolution solve_phi(const GroundState& upsilon, double mu1, const GroundState& spike, double shift, double eps,
                      const GridPtr& slow) {
  if (!(eps > 0.0)) throw GridError("solve_phi: eps must be positive");
  const Eigen::VectorXd rhs = slow->sample([&](double x1, double t) {
    const double u = two_bump(spike.profile, x1 / eps, t / eps, shift);
    return upsilon.profile(std::hypot(x1, t)) * u * u;
  });
  return solve_phi_rhs(upsilon, mu1, slow, rhs);
}

PsiProfile solve_psi_profile(const GroundState& spike, double omega0, double mu2, bool zero_rhs) {
  if (!(omega0 > 0.0)) throw AssumptionError("solve_psi_profile: omega0 must be positive");
  const RadialGrid& g = spike.profile.grid();
  const auto n = static_cast<Eigen::Index>(g.num_unknowns());
  const Eigen::VectorXd u = spike.profile.values().head(n);
  SparseMatrix a = -laplacian_radial(g, g.dim(), 4);
  a += SparseMatrix((omega0 - 3.0 * mu2 * u.array().square()).matrix().asDiagonal());
  const Eigen::VectorXd rhs = zero_rhs ? Eigen::VectorXd::Zero(n) : u;
  LinearSolution sol;
  try {
    sol = solve_linear({a, rhs});
  } catch (const SingularMatrixError& e) {
    throw SolverError(kModule, std::string("singular radial operator for Psi: ") + e.what());
  }
  Eigen::VectorXd full(n + 1);
  full.head(n) = sol.x;
  full[n] = 0.0;
  PsiProfile out{RadialProfile(g, full), max_abs(a * sol.x - rhs), 0.0};
  if (zero_rhs) return out;

  // Tail rate from ln|Psi| over the part of the tail between 1e-2 and 1e-8 of
  // the maximum, stopping eight decay lengths short of the Dirichlet edge.
  const double scale = max_abs(sol.x);
  const double r_stop = g.r_max() - 8.0 / std::sqrt(omega0);
  std::vector<double> xs, ys;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const double v = std::abs(sol.x[i]);
    const double r = g.r(static_cast<std::size_t>(i));
    if (r > r_stop || v < 1e-8 * scale) continue;
    if (v > 1e-2 * scale || sol.x[i] * sol.x[i - 1] <= 0.0) break;
    xs.push_back(r);
    ys.push_back(std::log(v));
  }
  if (xs.size() >= 10) out.tail_rate = -fit_line(xs, ys).slope;
  return out;
}

SymmetricField assemble_psi_eps(const RadialProfile& psi, double phi0, double upsilon0, double beta, double shift,
                                const GridPtr& fast) {
  check_shift(psi, shift, fast);
  const double c = 2.0 * beta * phi0 * upsilon0;
  return {fast, fast->sample([&](double y1, double t) { return c * two_bump(psi, y1, t, shift); })};
}

KernelElement assemble_Z(const GroundState& spike, double shift, const GridPtr& fast) {
  const RadialProfile& u = spike.profile;
  check_shift(u, shift, fast);
  const SymmetricGrid& g = *fast;
  KernelElement k;
  k.z = {fast, g.sample([&](double y1, double t) { return bump_dx1(u, y1, t, -shift) - bump_dx1(u, y1, t, shift); })};
  k.norm_sq = inner(k.z.values, k.z.values, g.weights());
  const double omega0 = spike.potential.at_origin();
  const Eigen::VectorXd source = g.sample([&](double y1, double t) {
    const double up = u(std::hypot(y1 + shift, t));
    const double um = u(std::hypot(y1 - shift, t));
    return 3.0 * spike.mu * (up * up * bump_dx1(u, y1, t, -shift) - um * um * bump_dx1(u, y1, t, shift));
  });
  const Eigen::VectorXd res = -(laplacian_symmetric(g) * k.z.values) + omega0 * k.z.values - source;
  k.equation_residual = max_abs(res);
  return k;
}

}  // namespace spikelab
