#include "spikelab/corrector.hpp"

#include "spikelab/errors.hpp"

#include <cmath>
#include <random>

namespace spikelab {

namespace {

constexpr const char* kModule = "projected-corrector";

using Array = Eigen::ArrayXd;

void check_pair(const FieldPair& x, const AnsatzBundle& b) {
  if (x.slow.size() != static_cast<Eigen::Index>(b.slow->num_unknowns()) ||
      x.fast.size() != static_cast<Eigen::Index>(b.fast->num_unknowns()))
    throw GridError("field pair does not match the ansatz grids");
}

Eigen::Index n_slow(const AnsatzBundle& b) { return static_cast<Eigen::Index>(b.slow->num_unknowns()); }
Eigen::Index n_fast(const AnsatzBundle& b) { return static_cast<Eigen::Index>(b.fast->num_unknowns()); }

double pair_norm(const FieldPair& r, const AnsatzBundle& b) {
  const double a = l2_norm(r.slow, b.slow->weights());
  const double c = l2_norm(r.fast, b.fast->weights());
  return std::sqrt(a * a + c * c);
}

void add_block(std::vector<Eigen::Triplet<double>>& trip, const SparseMatrix& m, Eigen::Index row0, Eigen::Index col0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      trip.emplace_back(static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()), it.value());
}

// [J, -(0, Z); (0, w Z)^T / ||Z||^2, 0].
SparseMatrix bordered(const SparseMatrix& j, const AnsatzBundle& b) {
  const Eigen::Index ns = n_slow(b), nf = n_fast(b), n = ns + nf;
  const Eigen::VectorXd& z = b.z.z.values;
  const Eigen::VectorXd& w = b.fast->weights();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(j.nonZeros() + 2 * nf));
  add_block(trip, j, 0, 0);
  for (Eigen::Index k = 0; k < nf; ++k) {
    if (z[k] == 0.0) continue;
    trip.emplace_back(static_cast<int>(ns + k), static_cast<int>(n), -z[k]);
    trip.emplace_back(static_cast<int>(n), static_cast<int>(ns + k), w[k] * z[k] / b.z.norm_sq);
  }
  SparseMatrix m(n + 1, n + 1);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

struct Residual {
  FieldPair g;
  double constraint = 0.0;  ///< <psi, Z> / ||Z||^2
  double norm = 0.0;
};

Residual residual(const FieldPair& x, double t, const AnsatzBundle& b, const FieldPair& rhs, bool linear) {
  const FieldPair l = eval_L(x, b);
  Residual r;
  r.g = {l.slow - rhs.slow, l.fast - rhs.fast - t * b.z.z.values};
  if (!linear) {
    const FieldPair nl = eval_N(x, b);
    r.g.slow -= nl.slow;
    r.g.fast -= nl.fast;
  }
  r.constraint = inner(x.fast, b.z.z.values, b.fast->weights()) / b.z.norm_sq;
  const double c = r.constraint * std::sqrt(b.z.norm_sq);
  r.norm = std::sqrt(std::pow(pair_norm(r.g, b), 2) + c * c);
  return r;
}

}  // namespace

FieldPair eval_L(const FieldPair& x, const AnsatzBundle& b) {
  check_pair(x, b);
  const Array xi = b.xi.values.array(), ths = b.theta_on_slow.array();
  const Array th = b.theta.values.array(), xif = b.xi_on_fast.array();
  const Array psi_s = (b.fast_to_slow * x.fast).array();
  const Array phi_f = (b.slow_to_fast * x.slow).array();
  const Array ps = x.slow.array(), pf = x.fast.array();
  FieldPair out;
  out.slow = -(b.lap_slow * x.slow) +
             ((b.v_slow.array() - 3.0 * b.mu1 * xi.square() - b.beta * ths.square()) * ps -
              2.0 * b.beta * xi * ths * psi_s)
                 .matrix();
  out.fast = -(b.lap_fast * x.fast) +
             ((b.w_fast.array() - 3.0 * b.mu2 * th.square() - b.beta * xif.square()) * pf -
              2.0 * b.beta * xif * th * phi_f)
                 .matrix();
  return out;
}

FieldPair eval_N(const FieldPair& x, const AnsatzBundle& b) {
  check_pair(x, b);
  const Array xi = b.xi.values.array(), ths = b.theta_on_slow.array();
  const Array th = b.theta.values.array(), xif = b.xi_on_fast.array();
  const Array psi_s = (b.fast_to_slow * x.fast).array();
  const Array phi_f = (b.slow_to_fast * x.slow).array();
  const Array phi = x.slow.array(), psi = x.fast.array();
  FieldPair out;
  out.slow = (b.mu1 * phi.square() * (3.0 * xi + phi) + b.beta * phi * psi_s * (2.0 * ths + psi_s) +
              b.beta * xi * psi_s.square())
                 .matrix();
  out.fast = (b.mu2 * psi.square() * (3.0 * th + psi) + b.beta * psi * phi_f * (2.0 * xif + phi_f) +
              b.beta * th * phi_f.square())
                 .matrix();
  return out;
}

SparseMatrix coupled_jacobian(const FieldPair& x, const AnsatzBundle& b) {
  check_pair(x, b);
  const Eigen::Index ns = n_slow(b), nf = n_fast(b);
  const Array us = b.xi.values.array() + x.slow.array();
  const Array vs = b.theta_on_slow.array() + (b.fast_to_slow * x.fast).array();
  const Array v = b.theta.values.array() + x.fast.array();
  const Array uf = b.xi_on_fast.array() + (b.slow_to_fast * x.slow).array();

  SparseMatrix j11 = -b.lap_slow;
  j11.diagonal() += (b.v_slow.array() - 3.0 * b.mu1 * us.square() - b.beta * vs.square()).matrix();
  SparseMatrix j22 = -b.lap_fast;
  j22.diagonal() += (b.w_fast.array() - 3.0 * b.mu2 * v.square() - b.beta * uf.square()).matrix();
  const Eigen::VectorXd c12 = (-2.0 * b.beta * us * vs).matrix();
  const Eigen::VectorXd c21 = (-2.0 * b.beta * v * uf).matrix();
  const SparseMatrix j12 = c12.asDiagonal() * b.fast_to_slow;
  const SparseMatrix j21 = c21.asDiagonal() * b.slow_to_fast;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(j11.nonZeros() + j12.nonZeros() + j21.nonZeros() + j22.nonZeros()));
  add_block(trip, j11, 0, 0);
  add_block(trip, j12, 0, ns);
  add_block(trip, j21, ns, 0);
  add_block(trip, j22, ns, ns);
  SparseMatrix j(ns + nf, ns + nf);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

double h2_norm(const Eigen::VectorXd& f, const SparseMatrix& lap, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd lf = lap * f;
  const double l2 = inner(f, f, weights);
  const double grad = std::abs(inner(f, lf, weights));
  const double second = inner(lf, lf, weights);
  return std::sqrt(l2 + grad + second);
}

RemainderPair solve_projected(const AnsatzBundle& b, const ErrorFields& e, const ProjectedOptions& opt) {
  if (e.e1.grid != b.slow || e.e2.grid != b.fast) throw GridError("error fields do not belong to this ansatz");
  return solve_projected(b, FieldPair{e.e1.values, e.e2.values}, opt);
}

RemainderPair solve_projected(const AnsatzBundle& b, const FieldPair& rhs, const ProjectedOptions& opt) {
  check_pair(rhs, b);
  if (!(b.z.norm_sq > 0.0)) throw SolverError(kModule, "kernel element Z vanishes on the fast grid");
  const Eigen::Index ns = n_slow(b), nf = n_fast(b), n = ns + nf;
  const double target = opt.tolerance * std::max(1.0, pair_norm(rhs, b));

  FieldPair x{Eigen::VectorXd::Zero(ns), Eigen::VectorXd::Zero(nf)};
  double t = 0.0;
  Residual r = residual(x, t, b, rhs, opt.linear);
  int it = 0;
  while (r.norm > target) {
    if (it == opt.max_iterations)
      throw SolverError(kModule, "Newton did not converge in " + std::to_string(opt.max_iterations) +
                                     " iterations (residual " + std::to_string(r.norm) + ")");
    const SparseMatrix j = coupled_jacobian(opt.linear ? FieldPair{x.slow * 0.0, x.fast * 0.0} : x, b);
    Eigen::VectorXd g(n + 1);
    g << r.g.slow, r.g.fast, r.constraint;
    const Factorization lu(bordered(j, b));
    Eigen::VectorXd step = lu.solve(-g);
    // One refinement pass; the bordered matrix mixes 1/h^2 and O(1) scales.
    const Eigen::VectorXd defect = -g - bordered(j, b) * step;
    step += lu.solve(defect);
    // Backtracking on the residual norm; a full step is taken near the root.
    FieldPair trial;
    double alpha = 1.0, t_trial = t;
    Residual rt;
    for (int k = 0;; ++k) {
      trial = {x.slow + alpha * step.head(ns), x.fast + alpha * step.segment(ns, nf)};
      t_trial = t + alpha * step[n];
      rt = residual(trial, t_trial, b, rhs, opt.linear);
      if ((std::isfinite(rt.norm) && rt.norm < r.norm) || k == 10) break;
      alpha *= 0.5;
    }
    ++it;
    if (!std::isfinite(rt.norm)) throw SolverError(kModule, "Newton produced non-finite values");
    if (!(rt.norm < r.norm))
      throw SolverError(kModule, "Newton stalled: no descent along the step (residual " + std::to_string(r.norm) + ")");
    x = std::move(trial);
    t = t_trial;
    r = std::move(rt);
  }

  RemainderPair out;
  out.phi = {b.slow, x.slow};
  out.psi = {b.fast, x.fast};
  out.t = t;
  out.residual = r.norm;
  out.iterations = it;
  const double psi_norm = l2_norm(x.fast, b.fast->weights());
  out.orthogonality = psi_norm > 0.0 ? std::abs(inner(x.fast, b.z.z.values, b.fast->weights())) /
                                           (psi_norm * std::sqrt(b.z.norm_sq))
                                     : 0.0;
  if (out.orthogonality > 1e-12)
    throw SolverError(kModule, "constraint <psi, Z> = 0 lost (relative " + std::to_string(out.orthogonality) + ")");
  out.norms.h2_phi = h2_norm(x.slow, b.lap_slow, b.slow->weights());
  out.norms.h2_psi = h2_norm(x.fast, b.lap_fast, b.fast->weights());
  out.norms.l2_phi = l2_norm(x.slow, b.slow->weights());
  out.norms.l2_psi = psi_norm;
  out.norms.sup_phi = max_abs(x.slow);
  out.norms.sup_psi = max_abs(x.fast);
  return out;
}

double multiplier_projection(const AnsatzBundle& b, const FieldPair& e, const RemainderPair& r) {
  const FieldPair x{r.phi.values, r.psi.values};
  const Eigen::VectorXd g = eval_L(x, b).fast - eval_N(x, b).fast - e.fast;
  return inner(g, b.z.z.values, b.fast->weights()) / b.z.norm_sq;
}

CoercivityReport coercivity_probe(const AnsatzBundle& b, bool constrained, double tolerance, int max_iterations,
                                  std::uint64_t seed) {
  const Eigen::Index ns = n_slow(b), nf = n_fast(b), n = ns + nf;
  Eigen::VectorXd sqrt_w(n);
  sqrt_w << b.slow->weights().cwiseSqrt(), b.fast->weights().cwiseSqrt();
  const SparseMatrix j = coupled_jacobian({Eigen::VectorXd::Zero(ns), Eigen::VectorXd::Zero(nf)}, b);
  const Factorization lu(constrained ? bordered(j, b) : j);
  const Eigen::Index m = lu.size();

  // Inverse operator B and its transpose in D^{1/2}-scaled coordinates.
  const auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    f.head(n) = v.cwiseQuotient(sqrt_w);
    return Eigen::VectorXd(lu.solve(f).head(n).cwiseProduct(sqrt_w));
  };
  const auto apply_t = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    f.head(n) = v.cwiseProduct(sqrt_w);
    return Eigen::VectorXd(lu.solve_transpose(f).head(n).cwiseQuotient(sqrt_w));
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = normal(rng);
  v.normalize();
  double lambda = 0.0, change = 1.0;
  int it = 0;
  while (it < max_iterations) {
    const Eigen::VectorXd bv = apply(v);
    const double next = bv.squaredNorm();
    ++it;
    change = lambda > 0.0 ? std::abs(next - lambda) / next : 1.0;
    lambda = next;
    if (!std::isfinite(lambda) || lambda == 0.0) throw SolverError(kModule, "coercivity power iteration broke down");
    v = apply_t(bv);
    v.normalize();
    if (change < tolerance) break;
  }
  if (change >= tolerance)
    throw SolverError(kModule, "coercivity power iteration did not settle (relative change " + std::to_string(change) + ")");
  return {1.0 / std::sqrt(lambda), b.eps, constrained, it, change};
}

}  // namespace spikelab
