#include "spikelab/ground_state.hpp"

#include "spikelab/errors.hpp"
#include "spikelab/linear_solve.hpp"
#include "spikelab/operators.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace spikelab {

namespace {

constexpr const char* kModule = "scalar-ground-state";
constexpr const char* kMagic = "# spikelab-profile v1";

Eigen::VectorXd potential_nodes(const RadialGrid& grid, const PotentialSpec& pot) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.num_unknowns()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = pot.radial(grid.r(static_cast<std::size_t>(i)));
  return v;
}

Eigen::VectorXd with_boundary(const Eigen::VectorXd& u) {
  Eigen::VectorXd full(u.size() + 1);
  full.head(u.size()) = u;
  full[u.size()] = 0.0;
  return full;
}

struct NewtonOutcome {
  Eigen::VectorXd u;
  double residual;
  int iterations;
  bool converged;
};

NewtonOutcome newton(const SparseMatrix& lap, const Eigen::VectorXd& pot, double mu, Eigen::VectorXd u,
                     const GroundStateOptions& opt) {
  const auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return -(lap * w) + (pot.array() * w.array() - mu * w.array().cube()).matrix();
  };
  Eigen::VectorXd r = residual(u);
  double rn = max_abs(r);
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (rn <= opt.tolerance) return {u, rn, it, true};
    SparseMatrix jac = -lap;
    jac += SparseMatrix((pot.array() - 3.0 * mu * u.array().square()).matrix().asDiagonal());
    const Eigen::VectorXd step = Factorization(jac).solve(-r);
    double alpha = 1.0;
    Eigen::VectorXd trial = u + step;
    Eigen::VectorXd rt = residual(trial);
    while (max_abs(rt) >= rn && alpha > 1.0 / 1024.0) {
      alpha *= 0.5;
      trial = u + alpha * step;
      rt = residual(trial);
    }
    // A step at roundoff level means the residual has hit its floor.
    const bool stalled = max_abs(alpha * step) <= 1e-14 * std::max(1.0, max_abs(u));
    u = std::move(trial);
    r = std::move(rt);
    rn = max_abs(r);
    if (stalled) return {u, rn, it + 1, rn <= 10.0 * opt.tolerance};
  }
  return {u, rn, opt.max_iterations, rn <= opt.tolerance};
}

// Petviashvili iteration for A u = mu u^3 with A = -Delta + V positive
// definite. The stabilizing factor M^{3/2} makes the ground state an
// attracting fixed point from any positive guess.
Eigen::VectorXd petviashvili(const SparseMatrix& lap, const Eigen::VectorXd& pot, const Eigen::VectorXd& weights,
                             double mu, Eigen::VectorXd u) {
  SparseMatrix a = -lap;
  a += SparseMatrix(pot.asDiagonal());
  const Factorization lu(a);
  for (int it = 0; it < 400; ++it) {
    const Eigen::VectorXd nl = mu * u.array().cube().matrix();
    const double m = inner(u, a * u, weights) / inner(u, nl, weights);
    const Eigen::VectorXd next = std::pow(m, 1.5) * lu.solve(nl);
    const double change = max_abs(next - u) / max_abs(next);
    u = next;
    if (change < 1e-6) break;
  }
  return u;
}

}  // namespace

RadialGrid scaled_radial_grid(double lambda, int dim, double h_units, double r_units) {
  if (!(lambda > 0.0)) throw AssumptionError("scaled_radial_grid: lambda must be positive");
  const double s = 1.0 / std::sqrt(lambda);
  const double n = std::round(r_units / h_units);
  return RadialGrid(n * h_units * s, h_units * s, dim);
}

double ground_state_residual(const RadialProfile& profile, const PotentialSpec& potential, double mu,
                             int stencil_order) {
  const RadialGrid& g = profile.grid();
  const Eigen::VectorXd u = profile.values().head(static_cast<Eigen::Index>(g.num_unknowns()));
  const Eigen::VectorXd pot = potential_nodes(g, potential);
  const Eigen::VectorXd r =
      -(laplacian_radial(g, g.dim(), stencil_order) * u) + (pot.array() * u.array() - mu * u.array().cube()).matrix();
  return max_abs(r);
}

GroundState solve_ground_state(const PotentialSpec& potential, double mu, const RadialGrid& grid,
                               const GroundStateOptions& options) {
  if (!(mu > 0.0)) throw AssumptionError("ground state needs mu > 0");
  potential.validate(grid.r_max(), grid.dim());
  if (!potential.is_radial()) throw AssumptionError("ground state needs a radial potential");

  const int dim = grid.dim();
  // The second-order problem is the robust one from crude guesses; the
  // fourth-order solve is polished from its solution.
  const SparseMatrix lap = laplacian_radial(grid, dim, 2);
  const SparseMatrix lap_fine = laplacian_radial(grid, dim, options.stencil_order);
  const Eigen::VectorXd pot = potential_nodes(grid, potential);
  const double v0 = pot[0];
  // Peak of the unit ground state is about sqrt(2) * {1, 1.56, 3.07} for N = 1, 2, 3.
  const std::array<double, 3> shape{1.0, 1.56, 3.07};
  const double amp = shape[static_cast<std::size_t>(dim - 1)] * std::sqrt(2.0 * v0 / mu);
  const double width = std::sqrt(v0);

  std::string last_failure = "no attempt";
  for (double factor : {1.0, 0.8, 1.25, 0.6, 1.6}) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(grid.num_unknowns()));
    for (Eigen::Index i = 0; i < u.size(); ++i)
      u[i] = factor * amp / std::cosh(width * grid.r(static_cast<std::size_t>(i)));
    if (factor == 1.0) u = petviashvili(lap, pot, grid.weights(), mu, u);
    NewtonOutcome out = newton(lap, pot, mu, u, options);
    if (out.converged && options.stencil_order != 2) {
      const int coarse_iterations = out.iterations;
      out = newton(lap_fine, pot, mu, out.u, options);
      out.iterations += coarse_iterations;
    }
    if (!out.converged) {
      last_failure = "Newton stalled at residual " + std::to_string(out.residual);
      continue;
    }
    const double peak = out.u.maxCoeff();
    if (peak < 1e-6) {
      last_failure = "converged to the zero solution";
      continue;
    }
    if (out.u.minCoeff() <= 0.0) {
      last_failure = "converged to a sign-changing solution";
      continue;
    }
    GroundState gs{RadialProfile(grid, with_boundary(out.u)), potential, mu, peak, out.residual, out.iterations, {}};
    if (potential.kind() == PotentialSpec::Kind::Constant) {
      try {
        const auto [lo, hi] = default_decay_window(gs.profile, std::sqrt(v0));
        gs.decay = fit_decay(gs.profile, lo, hi);
      } catch (const Error&) {
        // Too short a tail on this grid; leave the fit empty.
      }
    }
    return gs;
  }
  throw SolverError(kModule, "no positive ground state found: " + last_failure);
}

GroundState rescale_ground_state(const GroundState& base, double lambda, double mu, const RadialGrid& target) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw AssumptionError("rescale_ground_state needs lambda > 0 and mu > 0");
  if (base.potential.kind() != PotentialSpec::Kind::Constant || base.potential.at_origin() != 1.0 || base.mu != 1.0)
    throw AssumptionError("rescale_ground_state needs a base solved at V = 1, mu = 1");
  if (target.dim() != base.dim()) throw GridError("rescale_ground_state: dimension mismatch");
  const double amp = std::sqrt(lambda / mu);
  const double k = std::sqrt(lambda);
  Eigen::VectorXd v(static_cast<Eigen::Index>(target.num_nodes()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amp * base.profile(k * target.r(static_cast<std::size_t>(i)));
  v[v.size() - 1] = 0.0;
  const PotentialSpec pot = PotentialSpec::constant(lambda);
  GroundState gs{RadialProfile(target, v), pot, mu, v.maxCoeff(), 0.0, 0, {}};
  gs.residual = ground_state_residual(gs.profile, pot, mu);
  if (base.decay) {
    DecayFit d = *base.decay;
    d.rate *= k;
    d.r_lo /= k;
    d.r_hi /= k;
    gs.decay = d;
  }
  return gs;
}

DecayFit fit_decay(const RadialProfile& profile, double r_lo, double r_hi) {
  const RadialGrid& g = profile.grid();
  const double a = 0.5 * (g.dim() - 1);
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < g.num_unknowns(); ++i) {
    const double r = g.r(i);
    const double u = profile.values()[static_cast<Eigen::Index>(i)];
    if (r < r_lo || r > r_hi) continue;
    if (!(u > 0.0)) throw GridError("fit_decay: profile not positive inside the window");
    xs.push_back(r);
    ys.push_back(std::log(u) + a * std::log(r));
  }
  if (xs.size() < 10) throw GridError("fit_decay: window holds fewer than 10 nodes");
  const auto m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / m;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) ss += std::pow(ys[k] - icpt - slope * xs[k], 2);
  return {-slope, a, std::sqrt(ss / m), xs.front(), xs.back(), xs.size()};
}

std::pair<double, double> default_decay_window(const RadialProfile& profile, double rate_guess) {
  const RadialGrid& g = profile.grid();
  double lo = -1.0, hi = -1.0;
  for (std::size_t i = 0; i < g.num_unknowns(); ++i) {
    const double u = profile.values()[static_cast<Eigen::Index>(i)];
    if (lo < 0.0 && u <= 1e-2) lo = g.r(i);
    if (u >= 1e-8) hi = g.r(i);
  }
  hi = std::min(hi, g.r_max() - 8.0 / rate_guess);
  if (lo < 0.0 || hi <= lo) throw GridError("default_decay_window: no resolved tail on this grid");
  return {lo, hi};
}

NondegeneracyReport check_nondegeneracy(const GroundState& gs, double shift) {
  const RadialGrid& g = gs.profile.grid();
  const auto n = static_cast<Eigen::Index>(g.num_unknowns());
  SparseMatrix a = -laplacian_radial(g, g.dim());
  const Eigen::VectorXd pot = potential_nodes(g, gs.potential);
  const Eigen::VectorXd u = gs.profile.values().head(n);
  a += SparseMatrix((pot.array() - 3.0 * gs.mu * u.array().square() - shift).matrix().asDiagonal());
  // The three-term recurrence has off-diagonal products >= 0, so it is similar
  // to a symmetric tridiagonal matrix with the same spectrum.
  Eigen::VectorXd diag(n), off(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) diag[i] = a.coeff(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double p = a.coeff(i, i + 1) * a.coeff(i + 1, i);
    if (p < 0.0) throw SolverError(kModule, "eigen-solve: radial operator is not symmetrizable");
    off[i] = -std::sqrt(p);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError(kModule, "eigen-solve failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::Index k = 0;
  ev.cwiseAbs().minCoeff(&k);
  NondegeneracyReport rep;
  rep.smallest_eigenvalue = ev[k];
  rep.smallest_eigenvalue_magnitude = std::abs(ev[k]);
  rep.threshold = 1e-6 * gs.potential.infimum(g.r_max());
  rep.degenerate = rep.smallest_eigenvalue_magnitude < rep.threshold;
  return rep;
}

void write_ground_state(std::ostream& out, const GroundState& gs) {
  const RadialGrid& g = gs.profile.grid();
  out << kMagic << '\n' << std::setprecision(17);
  out << "dim " << g.dim() << '\n';
  out << "h " << g.h() << '\n';
  out << "nodes " << g.num_nodes() << '\n';
  out << "mu " << gs.mu << '\n';
  out << "potential " << gs.potential.to_json().dump() << '\n';
  out << "residual " << gs.residual << '\n';
  out << "iterations " << gs.iterations << '\n';
  out << "values\n";
  for (Eigen::Index i = 0; i < gs.profile.values().size(); ++i) out << gs.profile.values()[i] << '\n';
}

GroundState read_ground_state(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ConfigError("profile checkpoint: missing magic header");
  int dim = 0, iterations = 0;
  double h = 0.0, mu = 0.0, residual = 0.0;
  std::size_t nodes = 0;
  std::optional<PotentialSpec> pot;
  while (std::getline(in, line) && line != "values") {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "dim") ss >> dim;
    else if (key == "h") ss >> h;
    else if (key == "nodes") ss >> nodes;
    else if (key == "mu") ss >> mu;
    else if (key == "residual") ss >> residual;
    else if (key == "iterations") ss >> iterations;
    else if (key == "potential") {
      std::string rest;
      std::getline(ss, rest);
      pot = PotentialSpec::from_json(nlohmann::json::parse(rest));
    } else {
      throw ConfigError("profile checkpoint: unknown header key '" + key + "'");
    }
  }
  if (line != "values" || !pot || nodes < 5) throw ConfigError("profile checkpoint: incomplete header");
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(in >> v[i])) throw ConfigError("profile checkpoint: truncated value column");
  const RadialGrid grid(h * static_cast<double>(nodes - 1), h, dim);
  GroundState gs{RadialProfile(grid, v), *pot, mu, v.maxCoeff(), residual, iterations, {}};
  if (pot->kind() == PotentialSpec::Kind::Constant) {
    try {
      const auto [lo, hi] = default_decay_window(gs.profile, std::sqrt(pot->at_origin()));
      gs.decay = fit_decay(gs.profile, lo, hi);
    } catch (const Error&) {
    }
  }
  return gs;
}

}  // namespace spikelab
