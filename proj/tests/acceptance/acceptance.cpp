// One PASS/FAIL line per acceptance criterion, with the measured numbers.
// Exit status is nonzero when any criterion fails.

#include "spikelab/asymptotics.hpp"
#include "spikelab/corrector.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/fit.hpp"
#include "spikelab/ground_state.hpp"
#include "spikelab/pipeline.hpp"
#include "spikelab/reduced.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace spikelab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

std::string list(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(f, x);
  return s;
}

const ScalarStates& default_states() {
  static const ScalarStates st = solve_scalar_states(ModelParams{});
  return st;
}

// Everything measured on one point of the default eps ladder.
struct LadderPoint {
  double eps = 0.0;
  double sup_phi = 0.0, l2_psi = 0.0;
  double e1 = 0.0, e2 = 0.0;
  double remainder = NAN;
  std::string remainder_error;
  double sigma_con = NAN, sigma_free = NAN;
};

const std::vector<LadderPoint>& ladder() {
  static const std::vector<LadderPoint> pts = [] {
    const std::vector<double> eps{0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.025};
    const std::vector<double> coercive{0.1, 0.05, 0.025};
    std::vector<LadderPoint> out;
    for (double e : eps) {
      const Stage s = build_stage(default_states(), e, 0.0);
      LadderPoint p;
      p.eps = e;
      p.sup_phi = s.corrections.sup_phi;
      p.l2_psi = std::sqrt(s.corrections.psi_eps.values.cwiseAbs2().dot(s.ansatz.fast->weights()));
      p.e1 = s.errors.norm_e1;
      p.e2 = s.errors.norm_e2;
      try {
        p.remainder = solve_projected(s.ansatz, s.errors).norms.pair();
      } catch (const SolverError& err) {
        p.remainder_error = err.what();
      }
      if (std::find(coercive.begin(), coercive.end(), e) != coercive.end()) {
        p.sigma_con = coercivity_probe(s.ansatz, true).sigma_min;
        p.sigma_free = coercivity_probe(s.ansatz, false).sigma_min;
      }
      out.push_back(p);
    }
    return out;
  }();
  return pts;
}

Verdict sech_oracle() {
  const GroundState gs = solve_ground_state(PotentialSpec::constant(1.0), 1.0, RadialGrid(20.0, 0.01, 1));
  const auto& g = gs.profile.grid();
  double err = 0.0;
  for (Eigen::Index i = 0; i < gs.profile.values().size(); ++i)
    err = std::max(err, std::abs(gs.profile.values()[i] - std::sqrt(2.0) / std::cosh(g.r(static_cast<std::size_t>(i)))));
  return {err <= 1e-6, fmt("max |U - sqrt2 sech| = %.3e (tol 1e-6)", err)};
}

Verdict decay_law() {
  bool ok = true;
  std::string d;
  for (int dim : {1, 3})
    for (double lambda : {1.0, 4.0}) {
      const GroundState gs =
          solve_ground_state(PotentialSpec::constant(lambda), 1.0, scaled_radial_grid(lambda, dim));
      const auto [lo, hi] = default_decay_window(gs.profile, std::sqrt(lambda));
      const double rate = fit_decay(gs.profile, lo, hi).rate;
      const double rel = std::abs(rate / std::sqrt(lambda) - 1.0);
      ok = ok && rel <= 0.02;
      d += fmt("%sN=%d lambda=%g rate %.5f (rel %.1e)", d.empty() ? "" : "; ", dim, lambda, rate, rel);
    }
  return {ok, d + " (tol 2%)"};
}

Verdict overlap_oracle() {
  const GroundState gs = solve_ground_state(PotentialSpec::constant(1.0), 1.0, scaled_radial_grid(1.0, 1));
  double worst = 0.0, at = 0.0;
  for (double z = 2.0; z <= 10.0 + 1e-12; z += 0.5) {
    const double exact = 4.0 * z / std::sinh(z);
    const double rel = std::abs(overlap_uv(gs.profile, gs.profile, z) / exact - 1.0);
    if (rel > worst) worst = rel, at = z;
  }
  return {worst <= 5e-3, fmt("worst relative error %.2e at zeta=%g over [2, 10] (tol 0.5%%)", worst, at)};
}

Verdict theta_regimes() {
  const ScalarStates& st = default_states();
  const ConstantFit c = compute_c(st.spike);
  const double root = std::sqrt(st.omega.omega0);
  const double rel = std::abs(c.fitted_rate / root - 1.0);
  const GroundState g3 = solve_ground_state(PotentialSpec::constant(1.0), 1.0, scaled_radial_grid(1.0, 3));
  const RegimePrediction p = theta_regime(2.0, 2.0, 3, 1.0);
  const LogDetection log = detect_log(theta_samples(g3.profile, 2.0, 2.0, 6.0, 14.0, 17), p.rate, p.power);
  return {rel <= 0.02 && log.prefers_log,
          fmt("Theta13 rate %.4f vs sqrt(omega0) %.4f (rel %.2e, tol 2%%); N=3 Theta22 BIC plain %.1f log %.1f, q=%.3f",
              c.fitted_rate, root, rel, log.bic_plain, log.bic_log, log.q)};
}

Verdict correction_scaling() {
  std::vector<double> phi, psi;
  for (const auto& p : ladder()) {
    phi.push_back(p.sup_phi / p.eps);  // eps^{N/2} with N = 2
    psi.push_back(p.l2_psi / p.eps);
  }
  const double a = spread(phi), b = spread(psi);
  return {a <= 3.0 && b <= 3.0, fmt("max/min over eps in [0.025, 0.2]: sup Phi/eps %.2f [%s], |Psi|_2/eps %.2f [%s] (tol 3)",
                                    a, list(phi).c_str(), b, list(psi).c_str())};
}

Verdict error_scaling() {
  std::vector<ScalingSample> s2;
  std::vector<double> r1;
  for (const auto& p : ladder()) {
    s2.push_back({p.eps, p.e2});
    r1.push_back(p.e1 / (p.eps * p.eps));
  }
  const double slope = scaling_fit(s2, 2);
  const double ratio = spread(r1);
  return {slope >= 1.7 && slope <= 2.3 && ratio <= 3.0,
          fmt("E2/|ln eps|^2 slope %.3f (want [1.7, 2.3]); E1/eps^2 max/min %.2f (tol 3) [%s]", slope, ratio,
              list(r1).c_str())};
}

Verdict coercivity() {
  std::vector<double> con, collapse;
  for (const auto& p : ladder())
    if (std::isfinite(p.sigma_con)) {
      con.push_back(p.sigma_con);
      collapse.push_back(p.sigma_con / p.sigma_free);
    }
  const bool positive = std::all_of(con.begin(), con.end(), [](double s) { return s > 0.0; });
  const double var = spread(con);
  const double weakest = *std::min_element(collapse.begin(), collapse.end());
  return {positive && var <= 2.0 && weakest >= 10.0,
          fmt("constrained sigma at eps 0.1 0.05 0.025 [%s], max/min %.3f (tol 2); collapse without constraint [%s], "
              "min %.2fx (want >= 10x)",
              list(con).c_str(), var, list(collapse, "%.3g").c_str(), weakest)};
}

Verdict remainder_size() {
  std::vector<ScalingSample> s;
  std::string failed;
  for (const auto& p : ladder()) {
    if (std::isfinite(p.remainder))
      s.push_back({p.eps, p.remainder});
    else
      failed += fmt(" eps=%g: %s;", p.eps, p.remainder_error.c_str());
  }
  if (s.size() < 4) return {false, "too few converged points:" + failed};
  const double slope = scaling_fit(s, 2);
  std::vector<double> norms;
  for (const auto& x : s) norms.push_back(x.value);
  return {failed.empty() && slope >= 1.7 && slope <= 2.3,
          fmt("|(phi, psi)|/|ln eps|^2 slope %.3f (want [1.7, 2.3]) from [%s]%s", slope, list(norms).c_str(),
              failed.empty() ? "" : (" unsolved:" + failed).c_str())};
}

Verdict constant_b() {
  const GroundState gs = solve_ground_state(PotentialSpec::constant(1.0), 1.0, scaled_radial_grid(1.0, 1));
  const double b = compute_b(gs);
  return {std::abs(b - 2.0) <= 1e-4, fmt("b = %.8f (want 2 within 1e-4)", b)};
}

Verdict model_root() {
  ReducedConstants k;
  k.b = k.c = k.mu2 = k.omega0 = 1.0;
  k.d11_omega0 = -1.0;
  k.dim = 2;
  const double x = model_reduced_root(0.01, k).x;
  const bool point = std::abs(x / 6.3 - 1.0) <= 0.01;
  std::vector<double> ratio;
  for (double e : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) ratio.push_back(model_reduced_root(e, k).x / std::log(1.0 / e));
  const double limit = 1.0 / std::sqrt(k.omega0);
  bool approaching = true;
  for (std::size_t i = 1; i < ratio.size(); ++i)
    approaching = approaching && std::abs(ratio[i] - limit) < std::abs(ratio[i - 1] - limit);
  const double last = std::abs(ratio.back() / limit - 1.0);
  const bool trend = approaching && last <= 0.15;
  return {point && trend, fmt("rho/eps at eps=0.01 is %.6f (want 6.3 within 1%%: %s); rho/(eps ln 1/eps) [%s] -> %g, "
                              "monotone %s, final off by %.1f%% (tol 15%%)",
                              x, point ? "ok" : "no", list(ratio).c_str(), limit, approaching ? "yes" : "no", 100 * last)};
}

std::vector<C0Evaluation> g_root_evaluations;

Verdict end_to_end() {
  const ScalarStates& st = default_states();
  std::vector<double> rho;
  bool ok = true;
  std::string d;
  for (double eps : {0.1, 0.07, 0.05}) {
    try {
      const DRoot r = find_d_root(st, eps);
      g_root_evaluations.insert(g_root_evaluations.end(), r.evaluations.begin(), r.evaluations.end());
      const Stage s = build_stage(st, eps, r.d);
      const RemainderPair pair = solve_projected(s.ansatz, s.errors);
      const FullSolution f = full_solve(s, {pair.phi.values, pair.psi.values});
      const double res = std::max(f.residual_u, f.residual_v);
      const bool here = res <= 1e-9 && f.positive && f.peaks.size() == 1 && f.upsilon_distance < 0.1;
      ok = ok && here;
      rho.push_back(f.rho_hat);
      d += fmt("%seps=%g residual %.1e, positive %s, peaks at +-%.4f, |u-Upsilon|/|Upsilon| %.3f, rho %.5f", d.empty() ? "" : "; ",
               eps, res, f.positive ? "yes" : "no", f.peaks.empty() ? 0.0 : f.peaks.back(), f.upsilon_distance, f.rho_hat);
    } catch (const Error& e) {
      ok = false;
      d += fmt("%seps=%g failed: %s", d.empty() ? "" : "; ", eps, e.what());
      rho.push_back(NAN);
    }
  }
  const bool decreasing = rho.size() == 3 && rho[0] > rho[1] && rho[1] > rho[2];
  return {ok && decreasing, d + fmt("; rho decreasing %s", decreasing ? "yes" : "no")};
}

Verdict multiplier_identity() {
  ModelParams weak;
  weak.beta = -0.5;
  const ScalarStates weak_states = solve_scalar_states(weak);
  ModelParams steep;
  steep.W = PotentialSpec::quadratic_form(1.0, {4.0, 4.0});
  const ScalarStates steep_states = solve_scalar_states(steep);
  struct Case {
    const char* name;
    const ScalarStates* st;
    double eps, d;
  };
  const std::vector<Case> cases{{"default eps=0.1 d=1.0", &default_states(), 0.1, 1.0},
                                {"beta=-0.5 eps=0.07 d=0.9", &weak_states, 0.07, 0.9},
                                {"quadratic W eps=0.05 d=1.1", &steep_states, 0.05, 1.1}};
  double worst = 0.0;
  std::string d;
  for (const Case& c : cases) {
    const double u = 1.0 / std::sqrt(c.st->omega.omega0);
    const C0Evaluation e = evaluate_c0(*c.st, c.eps, c.d * u);
    const double rel = std::abs(e.t - e.projection) / std::abs(e.t);
    worst = std::max(worst, rel);
    d += fmt("%s%s: t=%.6e rel %.1e", d.empty() ? "" : "; ", c.name, e.t, rel);
  }
  // Near the c0 root t itself tends to zero, so the root-search points are
  // reported against the largest |t| seen instead of their own.
  double scale = 0.0, diff = 0.0;
  for (const auto& e : g_root_evaluations) {
    scale = std::max(scale, std::abs(e.t));
    diff = std::max(diff, std::abs(e.t - e.projection));
  }
  return {worst <= 1e-10, d + fmt("; worst %.1e (tol 1e-10); %zu root-search points: max |t - projection| / max |t| = %.1e",
                                  worst, g_root_evaluations.size(), scale > 0.0 ? diff / scale : 0.0)};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"sech-oracle", sech_oracle},
      {"decay-law", decay_law},
      {"overlap-oracle", overlap_oracle},
      {"theta-regimes", theta_regimes},
      {"correction-scaling", correction_scaling},
      {"error-norm-scaling", error_scaling},
      {"coercivity", coercivity},
      {"remainder-size", remainder_size},
      {"constant-b", constant_b},
      {"model-reduced-root", model_root},
      {"end-to-end", end_to_end},
      {"multiplier-identity", multiplier_identity},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::printf("%s %s: %s [%.0f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
