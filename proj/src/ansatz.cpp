#include "spikelab/ansatz.hpp"

#include "spikelab/errors.hpp"
#include "spikelab/fit.hpp"

#include <cmath>

namespace spikelab {

void ModelParams::validate() const {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw ConfigError("model: mu1 and mu2 must be positive");
  if (beta > 0.0) throw ConfigError("model: beta must be negative (0 for the decoupled check)");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("model: eps must lie in (0, 1)");
  if (d < 0.0) throw ConfigError("model: d must be positive (0 selects 1/sqrt(omega0))");
  if (dim != 2 && dim != 3) throw ConfigError("model: the two-grid pipeline supports N = 2 and N = 3");
}

double EffectivePotential::operator()(double x1, double t) const {
  const double y = upsilon(dim == 1 ? x1 : std::hypot(x1, t));
  return w.at(x1, t, dim) - beta * y * y;
}

EffectivePotential effective_potential(const PotentialSpec& w, double beta, const GroundState& upsilon) {
  EffectivePotential om{w, beta, upsilon.profile, upsilon.dim()};
  const Eigen::VectorXd& y = upsilon.profile.values();
  const double h = upsilon.profile.grid().h();
  // Five-point second differences on the radial nodes (Upsilon is even).
  const auto d2 = [h](double fm2, double fm1, double f0, double f1, double f2) {
    return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * f1 - f2) / (12.0 * h * h);
  };
  om.upsilon0 = y[0];
  om.d11_upsilon0 = d2(y[2], y[1], y[0], y[1], y[2]);
  om.omega0 = w.at_origin() - beta * y[0] * y[0];
  const auto omega_axis = [&](int k) { return om(k * h, 0.0); };
  om.d11_omega0 = d2(omega_axis(-2), omega_axis(-1), omega_axis(0), omega_axis(1), omega_axis(2));
  om.d11_w0 = w.d11_at_origin();
  om.min_pot = om.d11_omega0 < 0.0;
  om.beta_threshold = -om.d11_w0 / (2.0 * om.upsilon0 * std::abs(om.d11_upsilon0));
  om.beta_condition = beta < om.beta_threshold;
  om.beta_bound_binding = om.d11_w0 > 0.0;
  if (!(om.omega0 > 0.0))
    throw AssumptionError("omega0 = W(0) - beta Upsilon(0)^2 = " + std::to_string(om.omega0) + " is not positive");
  return om;
}

double peak_law(double eps, double d) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("peak_law: eps must lie in (0, 1)");
  if (!(d > 0.0)) throw ConfigError("peak_law: d must be positive");
  return d * eps * std::log(1.0 / eps);
}

AnsatzBundle assemble_ansatz(const ModelParams& params, const GroundState& upsilon, const GroundState& spike,
                             const CorrectionBundle& corrections, const EffectivePotential& omega) {
  const GridPtr slow = corrections.phi.grid;
  const GridPtr fast = corrections.psi_eps.grid;
  if (!slow || !fast) throw GridError("assemble_ansatz: corrections carry no grids");
  if (slow->dim() != params.dim || fast->dim() != params.dim) throw GridError("assemble_ansatz: dimension mismatch");
  if (corrections.eps != params.eps) throw GridError("assemble_ansatz: corrections were built for another eps");
  const double d = params.d > 0.0 ? params.d : 1.0 / std::sqrt(omega.omega0);
  const double rho = peak_law(params.eps, d);
  if (std::abs(rho / params.eps - corrections.shift) > 1e-12 * (1.0 + corrections.shift))
    throw GridError("assemble_ansatz: corrections were built for another peak distance");

  AnsatzBundle b{.slow = slow,
                 .fast = fast,
                 .eps = params.eps,
                 .d = d,
                 .rho = rho,
                 .shift = corrections.shift,
                 .mu1 = params.mu1,
                 .mu2 = params.mu2,
                 .beta = params.beta,
                 .omega = omega,
                 .upsilon = upsilon.profile,
                 .spike = spike.profile};
  const double eps = params.eps;
  const double beta = params.beta;
  const double s = b.shift;
  const int dim = params.dim;
  const double psi_scale = 2.0 * beta * corrections.phi_at_origin * omega.upsilon0;

  b.xi = {slow, slow->sample([&](double x1, double t) { return upsilon.profile(std::hypot(x1, t)); }) +
                    beta * corrections.phi.values};
  b.u_eps = {fast, fast->sample([&](double y1, double t) { return two_bump(spike.profile, y1, t, s); })};
  b.theta = {fast, b.u_eps.values + beta * corrections.psi_eps.values};
  b.z = assemble_Z(spike, s, fast);

  b.theta_on_slow = slow->sample([&](double x1, double t) {
    const double y1 = x1 / eps, yt = t / eps;
    return two_bump(spike.profile, y1, yt, s) + beta * psi_scale * two_bump(corrections.psi.profile, y1, yt, s);
  });
  b.fast_to_slow = interpolation_matrix(*fast, scaled_nodes(*slow, 1.0 / eps));
  b.slow_to_fast = interpolation_matrix(*slow, scaled_nodes(*fast, eps));
  b.xi_on_fast = fast->sample([&](double y1, double t) { return upsilon.profile(eps * std::hypot(y1, t)); }) +
                 beta * (b.slow_to_fast * corrections.phi.values);
  b.v_slow = slow->sample([&](double x1, double t) { return upsilon.potential.at(x1, t, dim); });
  b.w_fast = fast->sample([&](double y1, double t) { return params.W.at(eps * y1, eps * t, dim); });
  b.lap_slow = laplacian_symmetric(*slow);
  b.lap_fast = laplacian_symmetric(*fast);
  return b;
}

ErrorFields eval_error_terms(const AnsatzBundle& b, const CorrectionBundle& corr, bool leading_only) {
  if (!corr.phi.grid || corr.phi.grid != b.slow || corr.psi_eps.grid != b.fast)
    throw GridError("eval_error_terms: corrections do not belong to this ansatz");
  const double beta = b.beta, mu1 = b.mu1, mu2 = b.mu2, eps = b.eps, s = b.shift;
  const double b2 = beta * beta, b3 = b2 * beta, b4 = b3 * beta;
  const double c = 2.0 * beta * corr.phi_at_origin * b.omega.upsilon0;
  const RadialProfile& psi = corr.psi.profile;
  ErrorFields out;

  // Slow grid: Y = Upsilon(x), F = Phi(x), A = U_eps(x/eps), S = Psi_eps(x/eps).
  const SymmetricGrid& gs = *b.slow;
  const Eigen::ArrayXd Y = gs.sample([&](double x1, double t) { return b.upsilon(std::hypot(x1, t)); }).array();
  const Eigen::ArrayXd F = corr.phi.values.array();
  const Eigen::ArrayXd A = gs.sample([&](double x1, double t) { return two_bump(b.spike, x1 / eps, t / eps, s); }).array();
  const Eigen::ArrayXd S = c * gs.sample([&](double x1, double t) { return two_bump(psi, x1 / eps, t / eps, s); }).array();
  std::vector<std::pair<std::string, Eigen::ArrayXd>> t1{
      {"3mu1_beta2_Y_Phi2", 3.0 * mu1 * b2 * Y * F * F},
      {"mu1_beta3_Phi3", mu1 * b3 * F * F * F},
      {"beta3_Y_Psi2", b3 * Y * S * S},
      {"2beta2_Y_U_Psi", 2.0 * b2 * Y * A * S},
      {"beta2_Phi_U2", b2 * F * A * A},
      {"beta4_Phi_Psi2", b4 * F * S * S},
      {"2beta3_Phi_U_Psi", 2.0 * b3 * F * A * S},
  };
  Eigen::ArrayXd e1 = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(gs.num_unknowns()));
  for (auto& [name, term] : t1) {
    if (leading_only) term.setZero();
    e1 += term;
    out.terms1.push_back({name, l2_norm(term.matrix(), gs.weights())});
  }

  // Fast grid: a = U_P, b = U_-P, p, q the matching Psi bumps, Yf = Upsilon(eps y),
  // Ff = Phi(eps y).
  const SymmetricGrid& gf = *b.fast;
  const Eigen::ArrayXd ua = gf.sample([&](double y1, double t) { return b.spike(std::hypot(y1 + s, t)); }).array();
  const Eigen::ArrayXd ub = gf.sample([&](double y1, double t) { return b.spike(std::hypot(y1 - s, t)); }).array();
  const Eigen::ArrayXd pa = gf.sample([&](double y1, double t) { return psi(std::hypot(y1 + s, t)); }).array();
  const Eigen::ArrayXd pb = gf.sample([&](double y1, double t) { return psi(std::hypot(y1 - s, t)); }).array();
  const Eigen::ArrayXd Yf = gf.sample([&](double y1, double t) { return b.upsilon(eps * std::hypot(y1, t)); }).array();
  const Eigen::ArrayXd Ff = (b.slow_to_fast * corr.phi.values).array();
  const Eigen::ArrayXd Uf = ua + ub;
  const Eigen::ArrayXd Sf = c * (pa + pb);
  const Eigen::ArrayXd Th = Uf + beta * Sf;
  const Eigen::ArrayXd dOmega =
      b.omega.omega0 - gf.sample([&](double y1, double t) { return b.omega(eps * y1, eps * t); }).array();
  const double origin = corr.phi_at_origin * b.omega.upsilon0;
  std::vector<std::pair<std::string, Eigen::ArrayXd>> t2{
      {"potential", dOmega * (leading_only ? Uf : Th)},
      {"origin_modulus", 2.0 * b2 * Uf * (Yf * Ff - origin)},
      {"overlap_cubic", mu2 * (Uf.cube() - ua.cube() - ub.cube())},
      {"overlap_psi", 3.0 * beta * mu2 * (Uf.square() - ua.square() - ub.square()) * Sf},
      {"superposition_psi", 3.0 * beta * mu2 * c * (ua.square() * pb + ub.square() * pa)},
      {"beta3_Phi2_Theta", b3 * Ff * Ff * Th},
      {"2beta3_Psi_Y_Phi", 2.0 * b3 * Sf * Yf * Ff},
      {"3mu2_beta2_U_Psi2", 3.0 * mu2 * b2 * Uf * Sf * Sf},
      {"mu2_beta3_Psi3", mu2 * b3 * Sf.cube()},
  };
  Eigen::ArrayXd e2 = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(gf.num_unknowns()));
  for (auto& [name, term] : t2) {
    if (leading_only && name != "potential" && name != "overlap_cubic") term.setZero();
    e2 += term;
    out.terms2.push_back({name, l2_norm(term.matrix(), gf.weights())});
  }
  out.e1 = {b.slow, e1.matrix()};
  out.e2 = {b.fast, e2.matrix()};
  out.norm_e1 = l2_norm(out.e1.values, gs.weights());
  out.norm_e2 = l2_norm(out.e2.values, gf.weights());
  return out;
}

double scaling_fit(const std::vector<ScalingSample>& samples, int log_power) {
  if (samples.size() < 4) throw Error("scaling_fit: need at least 4 samples");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& smp = samples[k];
    if (!(smp.eps > 0.0 && smp.eps < 1.0) || !(smp.value > 0.0)) throw Error("scaling_fit: eps in (0,1) and value > 0 required");
    if (k > 0 && !(smp.eps < samples[k - 1].eps)) throw Error("scaling_fit: eps must decrease strictly");
    const double l = std::abs(std::log(smp.eps));
    x.push_back(std::log(smp.eps));
    y.push_back(std::log(smp.value) - log_power * std::log(l));
  }
  return fit_line(x, y).slope;
}

std::vector<double> axis_maxima(const SymmetricField& field) {
  const SymmetricGrid& g = *field.grid;
  const std::size_t n = g.n1();
  const auto at = [&](std::ptrdiff_t i) {
    if (i < 0) i = -i;
    return static_cast<std::size_t>(i) >= n ? 0.0 : field.values[static_cast<Eigen::Index>(g.index(static_cast<std::size_t>(i), 0))];
  };
  const auto x = [&](std::ptrdiff_t i) {
    return i < 0 ? -g.axial()[static_cast<std::size_t>(-i)] : g.axial()[static_cast<std::size_t>(i)];
  };
  std::vector<double> peaks;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double f0 = at(i), fm = at(i - 1), fp = at(i + 1);
    if (i == 0 ? !(f0 > fp) : !(f0 > fm && f0 >= fp)) continue;
    if (i == 0) {
      peaks.push_back(0.0);
      continue;
    }
    // Vertex of the parabola through the three samples.
    const double xm = x(i - 1), x0 = x(i), xp = x(i + 1);
    const double num = (x0 - xm) * (x0 - xm) * (f0 - fp) - (x0 - xp) * (x0 - xp) * (f0 - fm);
    const double den = (x0 - xm) * (f0 - fp) - (x0 - xp) * (f0 - fm);
    peaks.push_back(den != 0.0 ? x0 - 0.5 * num / den : x0);
  }
  return peaks;
}

}  // namespace spikelab
