#include "spikelab/commands.hpp"

#include "spikelab/asymptotics.hpp"
#include "spikelab/corrector.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

namespace spikelab {

namespace {

using Row = std::vector<Cell>;

Cell num(double v) { return v; }
Cell integer(long long v) { return v; }
Cell text(std::string v) { return v; }

const Table kGroundState{"groundstate", 1,
                         {{"label", "which profile (groundstate, upsilon, spike)"},
                          {"dim", "space dimension N"},
                          {"mu", "cubic coefficient"},
                          {"v_origin", "potential at the origin"},
                          {"peak", "profile value at r = 0"},
                          {"residual", "max-norm PDE residual"},
                          {"iterations", "Newton iterations"},
                          {"decay_rate", "fitted tail rate (empty if not fitted)"},
                          {"decay_expected", "sqrt of the potential at infinity for constant potentials"},
                          {"smallest_eigenvalue", "signed eigenvalue of least magnitude of the radial linearization"},
                          {"degenerate", "eigenvalue below threshold"},
                          {"checkpoint", "profile checkpoint path relative to the output directory"}}};

const Table kCorrections{"corrections", 1,
                         {{"eps", "semiclassical parameter"},
                          {"d", "peak-law coefficient"},
                          {"shift", "rho / eps, fast units"},
                          {"sup_phi", "max |Phi_eps| on the slow grid"},
                          {"sup_phi_scaled", "sup_phi / eps^(N/2)"},
                          {"phi_at_origin", "Phi_eps(0)"},
                          {"phi_residual", "relative residual of the Phi solve"},
                          {"psi_eps_l2", "||Psi_eps|| in L2 of the fast variable (= x-norm / eps^(N/2))"},
                          {"psi_tail_rate", "fitted tail rate of the radial Psi"},
                          {"z_norm_sq", "||Z_eps||^2, fast variable"},
                          {"z_residual", "max-norm residual of the Z equation"}}};

const Table kErrorTerms{"errornorms_terms", 1,
                        {{"eps", "semiclassical parameter"},
                         {"equation", "E1 (slow) or E2 (fast)"},
                         {"term", "term name, or total"},
                         {"l2", "weighted L2 norm"}}};

const Table kErrorFit{"errornorms_fit", 1,
                      {{"quantity", "E1 or E2"},
                       {"log_power", "p in ||E|| / |ln eps|^p"},
                       {"exponent", "least-squares slope against ln eps (empty when refused)"},
                       {"samples", "eps values used"},
                       {"scaled_ratio", "max/min of ||E1|| / eps^N over the ladder (E1 only)"},
                       {"note", "reason a fit was refused"}}};

const Table kCoercivity{"coercivity", 1,
                        {{"eps", "semiclassical parameter"},
                         {"sigma_constrained", "smallest singular value with psi orthogonal to Z"},
                         {"sigma_unconstrained", "smallest singular value of the bare linearization"},
                         {"collapse", "sigma_constrained / sigma_unconstrained"},
                         {"iterations_constrained", "power iterations"},
                         {"iterations_unconstrained", "power iterations"},
                         {"seed", "random start seed"}}};

const Table kReducedConstants{"reduced_constants", 1,
                              {{"mode", "toy or pipeline"},
                               {"b", "potential-side constant"},
                               {"c", "interaction constant (Theta_{1,3} prefactor)"},
                               {"c_drift", "relative prefactor drift over the calibration window"},
                               {"c_rate", "free-rate fit of Theta_{1,3} (empty in toy mode)"},
                               {"d11_omega0", "x1-curvature of omega at the origin"},
                               {"omega0", "omega at the origin"},
                               {"mu2", "second cubic coefficient"},
                               {"dim", "space dimension N"}}};

const Table kReducedModel{"reduced_model", 1,
                          {{"mode", "toy or pipeline"},
                           {"eps", "semiclassical parameter"},
                           {"rho", "root of the two-term balance with c"},
                           {"rho_over_eps", "rho / eps"},
                           {"rho_ratio", "rho / (eps ln(1/eps))"},
                           {"target", "1 / sqrt(omega0)"},
                           {"rho_paired", "root with c 2^(-(N+1)/2), the normalization of the discrete c0"}}};

const Table kSolve{"solve", 1,
                   {{"eps", "semiclassical parameter"},
                    {"outcome", "two-peak, merged, no-root or diverged"},
                    {"d_hat", "root of c0 in d (or the configured d)"},
                    {"c0_evaluations", "projected solves spent on the root"},
                    {"rho_law", "d_hat eps ln(1/eps)"},
                    {"rho_hat", "eps times the v peak on the x1 axis"},
                    {"rho_ratio", "rho_hat / (eps ln(1/eps))"},
                    {"residual_u", "max-norm residual, first equation"},
                    {"residual_v", "max-norm residual, second equation"},
                    {"iterations", "coupled Newton iterations"},
                    {"min_u", "minimum of u"},
                    {"min_v", "minimum of v"},
                    {"upsilon_distance", "||u - Upsilon||_inf / ||Upsilon||_inf"},
                    {"profile_distance", "||v - U_eps||_inf / ||v||_inf"},
                    {"message", "solver message for failed outcomes"}}};

const Table kRegimes{"asymptotics", 1,
                     {{"s", "power on the shifted profile"},
                      {"t", "power under the derivative"},
                      {"dim", "space dimension N"},
                      {"lambda", "stiffness of the profile"},
                      {"regime", "i, ii-sum, ii-log or ii-plain from the tail data"},
                      {"predicted_rate", "exponential rate from the tails"},
                      {"predicted_power", "algebraic power from the tails"},
                      {"predicted_log", "log factor present"},
                      {"printed_power", "power of the three-case formula (empty for s > t)"},
                      {"printed_matches", "printed power equals the tail prediction"},
                      {"fitted_rate", "free-rate fit with the predicted power and log divided out"},
                      {"rate_error", "fitted_rate / (min(s,t) sqrt(lambda)) - 1"},
                      {"prefactor_drift", "relative drift of the prefactor at the predicted rate"},
                      {"bic_plain", "BIC of the constant-prefactor model (s = t only)"},
                      {"bic_log", "BIC with an added ln ln zeta term (s = t only)"},
                      {"prefers_log", "log model preferred (s = t only)"}}};

std::string relative_to(const std::string& path, const std::string& base) {
  return std::filesystem::relative(path, base).generic_string();
}

Row ground_state_row(const std::string& label, const GroundState& gs, const std::string& checkpoint) {
  const NondegeneracyReport nd = check_nondegeneracy(gs);
  const bool constant = gs.potential.kind() == PotentialSpec::Kind::Constant;
  return {text(label),
          integer(gs.dim()),
          num(gs.mu),
          num(gs.potential.at_origin()),
          num(gs.peak_value),
          num(gs.residual),
          integer(gs.iterations),
          gs.decay ? num(gs.decay->rate) : Cell{},
          constant ? num(std::sqrt(gs.potential.at_origin())) : Cell{},
          num(nd.smallest_eigenvalue),
          Cell(nd.degenerate),
          text(checkpoint)};
}

std::string csv_text(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) return format_double(*v);
  if (const std::string* v = std::get_if<std::string>(&c)) return *v;
  return "";
}

double eps_power(double eps, double p) { return std::pow(eps, p); }

ReducedConstants toy_constants(int dim) {
  ReducedConstants k;
  k.b = k.c = k.mu2 = k.omega0 = 1.0;
  k.d11_omega0 = -1.0;
  k.dim = dim;
  return k;
}

struct SolveOutcome {
  Row row;
  int code = kExitOk;
};

SolveOutcome solve_at(const ScalarStates& st, const RunConfig& c, double eps) {
  const double ln = std::log(1.0 / eps);
  double d = c.model.d;
  long long evals = 0;
  SolveOutcome out;
  const auto failed = [&](const std::string& outcome, const std::string& msg) {
    out.row = {num(eps), text(outcome), d > 0.0 ? num(d) : Cell{}, integer(evals), d > 0.0 ? num(peak_law(eps, d)) : Cell{},
               Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, text(msg)};
  };
  try {
    if (!(d > 0.0)) {
      RootOptions o;
      o.lo = c.sweep.d_lo;
      o.hi = c.sweep.d_hi;
      o.tolerance = c.sweep.d_tolerance;
      o.leading_only = c.sweep.leading_only;
      const DRoot r = find_d_root(st, eps, o);
      d = r.d;
      evals = static_cast<long long>(r.evaluations.size());
    }
  } catch (const PeakMergerError&) {
    throw;
  } catch (const SolverError& e) {
    failed("no-root", e.what());
    out.code = kExitNonConvergence;
    return out;
  }
  const Stage s = build_stage(st, eps, d, c.sweep.leading_only);
  try {
    // Start from ansatz plus remainder; when the projected problem has no
    // solution at this d, from the bare ansatz.
    FieldPair start{Eigen::VectorXd::Zero(s.ansatz.xi.values.size()), Eigen::VectorXd::Zero(s.ansatz.theta.values.size())};
    try {
      const RemainderPair pair = solve_projected(s.ansatz, s.errors);
      start = {pair.phi.values, pair.psi.values};
    } catch (const SolverError&) {
    }
    FullSolveOptions fo;
    fo.require_two_peaks = false;
    const FullSolution fs = full_solve(s, start, fo);
    const bool two = fs.rho_hat > 0.0;
    out.row = {num(eps),
               text(two ? "two-peak" : "merged"),
               num(d),
               integer(evals),
               num(peak_law(eps, d)),
               num(fs.rho_hat),
               num(fs.rho_hat / (eps * ln)),
               num(fs.residual_u),
               num(fs.residual_v),
               integer(fs.iterations),
               num(fs.min_u),
               num(fs.min_v),
               num(fs.upsilon_distance),
               num(fs.profile_distance),
               text(two ? "" : "v has a single central maximum")};
    out.code = two ? kExitOk : kExitMerged;
  } catch (const SolverError& e) {
    failed("diverged", e.what());
    out.code = kExitNonConvergence;
  }
  return out;
}

int worst(int a, int b) {
  // Non-convergence outranks a merged pair; both outrank success.
  const auto rank = [](int c) { return c == kExitNonConvergence ? 2 : c == kExitMerged ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GridError*>(&e)) return kExitConfig;
  if (dynamic_cast<const PeakMergerError*>(&e)) return kExitMerged;
  if (dynamic_cast<const SolverError*>(&e)) return kExitNonConvergence;
  if (dynamic_cast<const AssumptionError*>(&e)) return kExitAssumption;
  return kExitFailure;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"groundstate", "corrections", "errornorms", "coercivity",
                                              "reduced",     "asymptotics", "full-solve"};
  return names;
}

ScalarStates load_states(const RunConfig& c) {
  const std::string dir = checkpoint_directory(c.outputs.directory, fnv1a(scalar_section_text(c)));
  const std::string up = dir + "/upsilon.profile", sp = dir + "/spike.profile";
  ScalarHints hints{read_checkpoint(up), read_checkpoint(sp)};
  ScalarStates st = solve_scalar_states(c.model, c.grids, hints);
  if (!hints.upsilon) write_checkpoint(up, st.upsilon);
  if (!hints.spike) write_checkpoint(sp, st.spike);
  return st;
}

int cmd_groundstate(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const std::string dir = checkpoint_directory(c.outputs.directory, fnv1a(scalar_section_text(c)));
  if (c.groundstate) {
    const ScalarProblem& p = *c.groundstate;
    const double lambda = p.potential.infimum(c.grids.radial_extent);
    p.potential.validate(c.grids.radial_extent / std::sqrt(std::max(lambda, 1e-300)), p.dim);
    const GroundState gs = solve_ground_state(p.potential, p.mu,
                                              scaled_radial_grid(lambda, p.dim, c.grids.radial_h, c.grids.radial_extent));
    const std::string path = dir + "/groundstate.profile";
    write_checkpoint(path, gs);
    ledger.append(kGroundState, ground_state_row("groundstate", gs, relative_to(path, c.outputs.directory)));
    log << "groundstate: peak " << format_double(gs.peak_value) << ", residual " << format_double(gs.residual) << '\n';
    if (check_nondegeneracy(gs).degenerate) throw AssumptionError("ground state linearization is degenerate");
    return kExitOk;
  }
  const ScalarStates st = load_states(c);
  ledger.append(kGroundState, ground_state_row("upsilon", st.upsilon, relative_to(dir + "/upsilon.profile", c.outputs.directory)));
  ledger.append(kGroundState, ground_state_row("spike", st.spike, relative_to(dir + "/spike.profile", c.outputs.directory)));
  log << "groundstate: Upsilon(0) " << format_double(st.upsilon.peak_value) << ", omega0 "
      << format_double(st.omega.omega0) << '\n';
  return kExitOk;
}

int cmd_corrections(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const ScalarStates st = load_states(c);
  const auto& eps = c.sweep.eps;
  std::vector<Row> rows(eps.size());
  run_pool(eps.size(), c.workers, [&](std::size_t i) {
    const Stage s = build_stage(st, eps[i], c.model.d);
    const CorrectionBundle& k = s.corrections;
    rows[i] = {num(eps[i]),
               num(s.ansatz.d),
               num(s.ansatz.shift),
               num(k.sup_phi),
               num(k.sup_phi / eps_power(eps[i], c.model.dim / 2.0)),
               num(k.phi_at_origin),
               num(k.phi_residual),
               num(l2_norm(k.psi_eps.values, s.ansatz.fast->weights())),
               num(k.psi.tail_rate),
               num(s.ansatz.z.norm_sq),
               num(s.ansatz.z.equation_residual)};
  });
  for (const Row& r : rows) ledger.append(kCorrections, r);
  log << "corrections: " << eps.size() << " eps values\n";
  return kExitOk;
}

int cmd_errornorms(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const ScalarStates st = load_states(c);
  const auto& eps = c.sweep.eps;
  std::vector<ErrorFields> errs(eps.size());
  run_pool(eps.size(), c.workers, [&](std::size_t i) { errs[i] = build_stage(st, eps[i], c.model.d).errors; });
  std::vector<ScalingSample> s1, s2;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (const TermNorm& t : errs[i].terms1) ledger.append(kErrorTerms, {num(eps[i]), text("E1"), text(t.name), num(t.l2)});
    ledger.append(kErrorTerms, {num(eps[i]), text("E1"), text("total"), num(errs[i].norm_e1)});
    for (const TermNorm& t : errs[i].terms2) ledger.append(kErrorTerms, {num(eps[i]), text("E2"), text(t.name), num(t.l2)});
    ledger.append(kErrorTerms, {num(eps[i]), text("E2"), text("total"), num(errs[i].norm_e2)});
    s1.push_back({eps[i], errs[i].norm_e1});
    s2.push_back({eps[i], errs[i].norm_e2});
  }
  double lo = INFINITY, hi = 0.0;
  for (const auto& s : s1) {
    const double r = s.value / eps_power(s.eps, c.model.dim);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const Cell ratio = lo > 0.0 ? num(hi / lo) : Cell{};
  const auto fit_row = [&](const char* q, const std::vector<ScalingSample>& s, int p, const Cell& extra) {
    try {
      ledger.append(kErrorFit, {text(q), integer(p), num(scaling_fit(s, p)), integer(static_cast<long long>(s.size())), extra, text("")});
    } catch (const Error& e) {
      ledger.append(kErrorFit, {text(q), integer(p), Cell{}, integer(static_cast<long long>(s.size())), extra, text(e.what())});
    }
  };
  fit_row("E1", s1, 0, ratio);
  fit_row("E2", s2, 2, Cell{});
  log << "errornorms: " << eps.size() << " eps values\n";
  return kExitOk;
}

int cmd_coercivity(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const ScalarStates st = load_states(c);
  const auto& eps = c.sweep.coercivity_eps;
  std::vector<Row> rows(eps.size());
  run_pool(eps.size(), c.workers, [&](std::size_t i) {
    const Stage s = build_stage(st, eps[i], c.model.d);
    const CoercivityReport con = coercivity_probe(s.ansatz, true, 1e-9, 400, c.seed);
    const CoercivityReport free = coercivity_probe(s.ansatz, false, 1e-9, 400, c.seed);
    rows[i] = {num(eps[i]),
               num(con.sigma_min),
               num(free.sigma_min),
               num(con.sigma_min / free.sigma_min),
               integer(con.iterations),
               integer(free.iterations),
               integer(static_cast<long long>(c.seed))};
  });
  for (const Row& r : rows) ledger.append(kCoercivity, r);
  log << "coercivity: " << eps.size() << " eps values\n";
  return kExitOk;
}

int cmd_reduced(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const bool toy = c.sweep.toy_constants;
  ReducedConstants k;
  std::optional<ScalarStates> st;
  Row constants;
  if (toy) {
    k = toy_constants(c.model.dim);
    constants = {text("toy"), num(k.b), num(k.c), Cell{}, Cell{}, num(k.d11_omega0), num(k.omega0), num(k.mu2), integer(k.dim)};
  } else {
    st = load_states(c);
    if (!st->omega.min_pot)
      throw AssumptionError("curvature d11 omega(0) = " + format_double(st->omega.d11_omega0) + " is not negative");
    const ConstantFit cf = compute_c(st->spike);
    k = reduced_constants(*st);
    constants = {text("pipeline"), num(k.b), num(k.c), num(cf.drift), num(cf.fitted_rate),
                 num(k.d11_omega0), num(k.omega0), num(k.mu2), integer(k.dim)};
  }
  ledger.append(kReducedConstants, constants);
  ReducedConstants paired = k;
  paired.c = k.c * std::pow(2.0, -(k.dim + 1) / 2.0);
  for (double e : c.sweep.model_eps) {
    const ModelRoot r = model_reduced_root(e, k);
    const ModelRoot rp = model_reduced_root(e, paired);
    ledger.append(kReducedModel, {text(toy ? "toy" : "pipeline"), num(e), num(r.rho), num(r.x),
                                  num(r.x / std::log(1.0 / e)), num(1.0 / std::sqrt(k.omega0)), num(rp.rho)});
  }
  log << "reduced: " << c.sweep.model_eps.size() << " model roots\n";
  if (toy) return kExitOk;

  const auto& eps = c.sweep.full_solve_eps;
  std::vector<SolveOutcome> out(eps.size());
  run_pool(eps.size(), c.workers, [&](std::size_t i) { out[i] = solve_at(*st, c, eps[i]); });
  int code = kExitOk;
  for (const auto& o : out) {
    ledger.append(kSolve, o.row);
    log << "  eps " << csv_text(o.row[0]) << ": " << csv_text(o.row[1]) << '\n';
    code = worst(code, o.code);
  }
  return code;
}

int cmd_asymptotics(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const ScalarStates st = load_states(c);
  const GroundState& u = st.spike;
  const double lambda = u.potential.at_origin(), k = std::sqrt(lambda);
  const int dim = u.dim();
  const auto& pairs = c.asymptotics.pairs;
  std::vector<Row> rows(pairs.size());
  run_pool(pairs.size(), c.workers, [&](std::size_t i) {
    const auto [s, t] = pairs[i];
    const RegimePrediction p = theta_regime(s, t, dim, lambda);
    std::optional<RegimePrediction> printed;
    if (s <= t) printed = printed_theta_regime(s, t, dim, lambda);
    const auto samples =
        theta_samples(u.profile, s, t, c.asymptotics.window_lo / k, c.asymptotics.window_hi / k, c.asymptotics.samples);
    const RateFit f = fit_rate(samples, p.power, p.log);
    const RateFit fixed = fixed_rate_prefactor(samples, p.rate, p.power, p.log);
    Cell bp, bl, pl;
    if (s == t) {
      const LogDetection d = detect_log(samples, p.rate, p.power);
      bp = d.bic_plain;
      bl = d.bic_log;
      pl = d.prefers_log;
    }
    rows[i] = {num(s),
               num(t),
               integer(dim),
               num(lambda),
               text(p.label),
               num(p.rate),
               num(p.power),
               Cell(p.log),
               printed ? num(printed->power) : Cell{},
               printed ? Cell(printed->power == p.power && printed->log == p.log) : Cell{},
               num(f.rate),
               num(f.rate / (std::min(s, t) * k) - 1.0),
               num(fixed.drift),
               bp,
               bl,
               pl};
  });
  for (const Row& r : rows) ledger.append(kRegimes, r);
  log << "asymptotics: " << pairs.size() << " (s, t) pairs\n";
  return kExitOk;
}

int cmd_full_solve(const RunConfig& c, Ledger& ledger, std::ostream& log) {
  const ScalarStates st = load_states(c);
  if (!st.omega.min_pot)
    throw AssumptionError("curvature d11 omega(0) = " + format_double(st.omega.d11_omega0) + " is not negative");
  const SolveOutcome o = solve_at(st, c, c.model.eps);
  ledger.append(kSolve, o.row);
  log << "full-solve: eps " << csv_text(o.row[0]) << ": " << csv_text(o.row[1]) << '\n';
  return o.code;
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& log) {
  try {
    Ledger ledger(config.outputs.directory, config.outputs.csv, config.outputs.json);
    if (name == "groundstate") return cmd_groundstate(config, ledger, log);
    if (name == "corrections") return cmd_corrections(config, ledger, log);
    if (name == "errornorms") return cmd_errornorms(config, ledger, log);
    if (name == "coercivity") return cmd_coercivity(config, ledger, log);
    if (name == "reduced") return cmd_reduced(config, ledger, log);
    if (name == "asymptotics") return cmd_asymptotics(config, ledger, log);
    if (name == "full-solve") return cmd_full_solve(config, ledger, log);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const std::exception& e) {
    log << "spikelab " << name << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace spikelab
