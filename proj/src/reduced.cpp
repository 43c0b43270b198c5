#include "spikelab/reduced.hpp"

#include "spikelab/asymptotics.hpp"
#include "spikelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace spikelab {

namespace {

constexpr const char* kModule = "reduced-problem";

}  // namespace

void ReducedConstants::validate() const {
  if (!(b > 0.0) || !(c > 0.0)) throw ConfigError("reduced constants: b and c must be positive");
  if (!(mu2 > 0.0) || !(omega0 > 0.0)) throw ConfigError("reduced constants: mu2 and omega0 must be positive");
  if (!(d11_omega0 < 0.0)) throw ConfigError("reduced constants: d11 omega(0) must be negative");
  if (dim < 1 || dim > 3) throw ConfigError("reduced constants: dimension must be 1, 2 or 3");
}

double compute_b(const GroundState& u) {
  const RadialProfile& p = u.profile;
  const RadialGrid& g = p.grid();
  const int dim = p.dim();
  // Trapezoid in r; the integrand vanishes at both ends.
  double sum = 0.0;
  for (std::size_t i = 1; i < g.num_unknowns(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sum += std::pow(g.r(i), dim) * p.values()[k] * p.node_derivative()[k];
  }
  const double b = -sphere_area(dim) / dim * sum * g.h();
  if (!(b > 0.0)) throw SolverError(kModule, "b came out non-positive; the profile is broken");
  return b;
}

ConstantFit compute_c(const GroundState& u, double max_drift) {
  const double lambda = u.potential.at_origin();
  const double k = std::sqrt(lambda);
  const int dim = u.dim();
  ConstantFit out;
  out.lambda = lambda;
  out.lo = 6.0 / k;
  out.hi = 12.0 / k;
  const auto samples = theta_samples(u.profile, 1.0, 3.0, out.lo, out.hi, 13);
  const double power = -(dim - 1) / 2.0;
  const RateFit fixed = fixed_rate_prefactor(samples, k, power, false);
  const RateFit free = fit_rate(samples, power, false);
  out.c = fixed.prefactor;
  out.drift = fixed.drift;
  out.fitted_rate = free.rate;
  for (const auto& s : samples)
    if (!(s.value > 0.0)) throw SolverError(kModule, "Theta_{1,3} is not positive on the calibration window");
  if (out.drift > max_drift)
    throw SolverError(kModule, "prefactor of Theta_{1,3} drifts by " + std::to_string(out.drift) +
                                   "; asymptotic regime not reached");
  return out;
}

ReducedConstants reduced_constants(const ScalarStates& states) {
  ReducedConstants k;
  k.b = compute_b(states.spike);
  k.c = compute_c(states.spike).c;
  k.d11_omega0 = states.omega.d11_omega0;
  k.mu2 = states.params.mu2;
  k.omega0 = states.omega.omega0;
  k.dim = states.params.dim;
  return k;
}

double model_residual(double rho, double eps, const ReducedConstants& k) {
  const double x = rho / eps;
  return -k.d11_omega0 * k.b * eps * rho -
         2.0 * k.mu2 * k.c * std::exp(-2.0 * std::sqrt(k.omega0) * x) * std::pow(x, -(k.dim - 1) / 2.0);
}

ModelRoot model_reduced_root(double eps, const ReducedConstants& k) {
  k.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("model_reduced_root: eps must lie in (0, 1)");
  double lo = 0.0, hi = 10.0 * eps * std::log(1.0 / eps);
  if (!(model_residual(hi, eps, k) > 0.0))
    throw SolverError(kModule, "model balance has no sign change on the bracket; eps too large");
  ModelRoot r;
  while (hi - lo > 1e-15 * hi && r.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (model_residual(mid, eps, k) > 0.0)
      hi = mid;
    else
      lo = mid;
    ++r.iterations;
  }
  r.rho = 0.5 * (lo + hi);
  r.x = r.rho / eps;
  r.residual = model_residual(r.rho, eps, k);
  return r;
}

C0Evaluation evaluate_c0(const ScalarStates& states, double eps, double d, bool leading_only,
                         const ProjectedOptions& opt) {
  const Stage st = build_stage(states, eps, d, leading_only);
  const RemainderPair r = solve_projected(st.ansatz, st.errors, opt);
  C0Evaluation out;
  out.d = st.ansatz.d;
  out.t = r.t;
  out.projection = multiplier_projection(st.ansatz, FieldPair{st.errors.e1.values, st.errors.e2.values}, r);
  out.iterations = r.iterations;
  return out;
}

double c0_of_d(const ScalarStates& states, double eps, double d, bool leading_only) {
  return evaluate_c0(states, eps, d, leading_only).t;
}

DRoot find_d_root(const ScalarStates& states, double eps, const RootOptions& opt) {
  const double unit = 1.0 / std::sqrt(states.omega.omega0);
  if (!(opt.lo < opt.hi) || !(opt.tolerance > 0.0)) throw ConfigError("find_d_root: bad bracket or tolerance");
  DRoot out;
  double lo = opt.lo * unit, hi = opt.hi * unit;
  out.evaluations.push_back(evaluate_c0(states, eps, lo, opt.leading_only));
  out.evaluations.push_back(evaluate_c0(states, eps, hi, opt.leading_only));
  double flo = out.evaluations[0].t;
  double fhi = out.evaluations[1].t;
  // Widen toward the endpoint with the smaller |c0|, inside the admissible window.
  while (!(flo * fhi < 0.0)) {
    const bool right = std::abs(fhi) < std::abs(flo);
    const double next = right ? hi / unit + opt.expand_step : lo / unit - opt.expand_step;
    if (next > opt.max_hi + 1e-12 || next < opt.min_lo - 1e-12)
      throw SolverError(kModule, "c0 keeps its sign on the d bracket (c0 = " + std::to_string(flo) + ", " +
                                     std::to_string(fhi) + ")");
    out.evaluations.push_back(evaluate_c0(states, eps, next * unit, opt.leading_only));
    if (right) {
      lo = hi;
      flo = fhi;
      hi = next * unit;
      fhi = out.evaluations.back().t;
    } else {
      hi = lo;
      fhi = flo;
      lo = next * unit;
      flo = out.evaluations.back().t;
    }
  }
  while (hi - lo > opt.tolerance * unit) {
    const double mid = 0.5 * (lo + hi);
    out.evaluations.push_back(evaluate_c0(states, eps, mid, opt.leading_only));
    const double fm = out.evaluations.back().t;
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  out.d = 0.5 * (lo + hi);
  out.rho = peak_law(eps, out.d);
  return out;
}

FieldPair full_residual(const AnsatzBundle& b, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  using Array = Eigen::ArrayXd;
  const Array ua = u.array(), va = v.array();
  const Array vs = (b.fast_to_slow * v).array();
  const Array uf = (b.slow_to_fast * u).array();
  FieldPair f;
  f.slow = -(b.lap_slow * u) + ((b.v_slow.array() - b.mu1 * ua.square() - b.beta * vs.square()) * ua).matrix();
  f.fast = -(b.lap_fast * v) + ((b.w_fast.array() - b.mu2 * va.square() - b.beta * uf.square()) * va).matrix();
  return f;
}

FullSolution full_solve(const Stage& stage, const FieldPair& start, const FullSolveOptions& opt) {
  // Same linearization as the projected problem once the cross profiles are
  // taken from the grid fields themselves.
  AnsatzBundle b = stage.ansatz;
  b.theta_on_slow = b.fast_to_slow * b.theta.values;
  b.xi_on_fast = b.slow_to_fast * b.xi.values;
  const Eigen::Index ns = static_cast<Eigen::Index>(b.slow->num_unknowns());
  const Eigen::Index nf = static_cast<Eigen::Index>(b.fast->num_unknowns());
  if (start.slow.size() != ns || start.fast.size() != nf) throw GridError("full_solve: start does not match the grids");

  const auto norm = [&](const FieldPair& f) {
    const double a = l2_norm(f.slow, b.slow->weights()), c = l2_norm(f.fast, b.fast->weights());
    return std::sqrt(a * a + c * c);
  };
  const auto converged = [&](const FieldPair& f) {
    return max_abs(f.slow) <= opt.tolerance && max_abs(f.fast) <= opt.tolerance;
  };

  FieldPair x = start;
  FieldPair f = full_residual(b, b.xi.values + x.slow, b.theta.values + x.fast);
  double fn = norm(f);
  int it = 0;
  while (!converged(f)) {
    if (it == opt.max_iterations)
      throw SolverError(kModule, "coupled Newton did not converge in " + std::to_string(opt.max_iterations) +
                                     " iterations (residual " + std::to_string(fn) + ")");
    const SparseMatrix j = coupled_jacobian(x, b);
    Eigen::VectorXd g(ns + nf);
    g << f.slow, f.fast;
    const Factorization lu(j);
    Eigen::VectorXd step = lu.solve(-g);
    step += lu.solve(-g - j * step);
    double alpha = 1.0;
    FieldPair trial, ft;
    double ftn = 0.0;
    for (int k = 0;; ++k) {
      trial = {x.slow + alpha * step.head(ns), x.fast + alpha * step.tail(nf)};
      ft = full_residual(b, b.xi.values + trial.slow, b.theta.values + trial.fast);
      ftn = norm(ft);
      if ((std::isfinite(ftn) && ftn < fn) || k == 10) break;
      alpha *= 0.5;
    }
    ++it;
    if (!std::isfinite(ftn)) throw SolverError(kModule, "coupled Newton produced non-finite values");
    if (!(ftn < fn)) {
      // Roundoff floor: accept if already at the tolerance scale.
      if (converged(ft)) {
        x = std::move(trial);
        f = std::move(ft);
        break;
      }
      throw SolverError(kModule, "coupled Newton stalled (residual " + std::to_string(fn) + ")");
    }
    x = std::move(trial);
    f = std::move(ft);
    fn = ftn;
  }

  FullSolution out;
  out.u = {b.slow, b.xi.values + x.slow};
  out.v = {b.fast, b.theta.values + x.fast};
  out.residual_u = max_abs(f.slow);
  out.residual_v = max_abs(f.fast);
  out.iterations = it;
  out.min_u = out.u.values.minCoeff();
  out.min_v = out.v.values.minCoeff();
  out.positive = out.min_u > 0.0 && out.min_v > 0.0;

  const double vmax = out.v.values.maxCoeff();
  const SymmetricGrid& fg = *b.fast;
  for (double y : axis_maxima(out.v)) {
    std::size_t i = 0;
    while (i + 1 < fg.n1() && fg.axial()[i + 1] <= y) ++i;
    if (i + 1 < fg.n1() && fg.axial()[i + 1] - y < y - fg.axial()[i]) ++i;
    if (out.v.values[static_cast<Eigen::Index>(fg.index(i, 0))] >= opt.peak_floor * vmax) out.peaks.push_back(y);
  }
  const bool two = out.peaks.size() == 1 && out.peaks[0] > 0.0;
  if (two) out.rho_hat = b.eps * out.peaks[0];
  if (!two && opt.require_two_peaks)
    throw PeakMergerError("v does not have exactly two symmetric peaks (" + std::to_string(out.peaks.size()) +
                          " maxima on the half axis)");

  const RadialProfile& ups = b.upsilon;
  const Eigen::VectorXd ups_s = b.slow->sample([&](double x1, double t) { return ups(std::hypot(x1, t)); });
  out.upsilon_distance = max_abs(out.u.values - ups_s) / max_abs(ups_s);
  out.profile_distance = max_abs(out.v.values - b.u_eps.values) / max_abs(out.v.values);
  return out;
}

}  // namespace spikelab
