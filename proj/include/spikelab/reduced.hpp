#pragma once

#include "spikelab/corrector.hpp"
#include "spikelab/pipeline.hpp"

#include <vector>

namespace spikelab {

/// Constants of the two-term balance for the peak distance.
struct ReducedConstants {
  double b = 0.0;
  double c = 0.0;
  double d11_omega0 = 0.0;  ///< must be < 0
  double mu2 = 1.0;
  double omega0 = 1.0;
  int dim = 2;

  /// Throws ConfigError unless b, c, mu2, omega0 > 0 and d11_omega0 < 0.
  void validate() const;
};

/// -int y1^2 U U' / |y| dy over R^N, reduced to -(|S^{N-1}| / N) int r^N U U' dr.
/// Throws SolverError when the result is not positive.
double compute_b(const GroundState& u);

struct ConstantFit {
  double c = 0.0;           ///< prefactor at the predicted rate sqrt(lambda)
  double drift = 0.0;       ///< relative spread of the divided-out prefactor
  double fitted_rate = 0.0; ///< free-rate fit over the same window
  double lambda = 0.0;
  double lo = 0.0, hi = 0.0;
};

/// Prefactor of Theta_{1,3}(zeta) ~ c e^{-sqrt(lambda) zeta} zeta^{-(N-1)/2},
/// sampled over zeta in [6, 12] / sqrt(lambda). Throws SolverError when the
/// prefactor drifts by more than `max_drift` or comes out non-positive.
ConstantFit compute_c(const GroundState& u, double max_drift = 0.1);

/// Constants for a solved pipeline: b and c from U, curvature from omega.
ReducedConstants reduced_constants(const ScalarStates& states);

struct ModelRoot {
  double rho = 0.0;
  double x = 0.0;  ///< rho / eps
  double residual = 0.0;
  int iterations = 0;
};

/// The scalar balance
///   -d11_omega0 b eps rho = 2 mu2 c e^{-2 sqrt(omega0) rho / eps} (rho / eps)^{-(N-1)/2}
/// solved by bisection for rho in (0, 10 eps ln(1/eps)). Throws SolverError
/// when the bracket has no sign change.
ModelRoot model_reduced_root(double eps, const ReducedConstants& k);

/// Left side minus right side of the balance; increasing in rho.
double model_residual(double rho, double eps, const ReducedConstants& k);

struct C0Evaluation {
  double d = 0.0;
  double t = 0.0;
  double projection = 0.0;  ///< the same quantity from the projection formula
  int iterations = 0;
};

/// Multiplier t of the projected problem at (eps, d); equals c0 by the
/// multiplier identity.
C0Evaluation evaluate_c0(const ScalarStates& states, double eps, double d, bool leading_only = false,
                         const ProjectedOptions& opt = {});
double c0_of_d(const ScalarStates& states, double eps, double d, bool leading_only = false);

struct RootOptions {
  double lo = 0.8;          ///< bracket, units of 1/sqrt(omega0)
  double hi = 1.2;
  double tolerance = 2e-3;  ///< bracket width at exit, units of 1/sqrt(omega0)
  double expand_step = 0.1; ///< bracket growth when c0 has one sign on it
  double min_lo = 0.55, max_hi = 1.45;
  bool leading_only = false;
};

struct DRoot {
  double d = 0.0;
  double rho = 0.0;
  std::vector<C0Evaluation> evaluations;
};

/// Bisection on c0(d). A one-signed bracket is moved by expand_step toward
/// the smaller |c0| while it stays in [min_lo, max_hi]; past that, SolverError.
DRoot find_d_root(const ScalarStates& states, double eps, const RootOptions& opt = {});

struct FullSolveOptions {
  double tolerance = 1e-9;  ///< max-norm of both residuals
  int max_iterations = 30;
  bool require_two_peaks = true;
  double peak_floor = 1e-3;  ///< maxima below this fraction of max v are ignored
};

struct FullSolution {
  SymmetricField u;  ///< slow grid
  SymmetricField v;  ///< fast grid
  double residual_u = 0.0, residual_v = 0.0;
  int iterations = 0;
  std::vector<double> peaks;  ///< positive-side maxima of v on the y1 axis, fast units
  double rho_hat = 0.0;       ///< eps times the outer peak
  double min_u = 0.0, min_v = 0.0;
  bool positive = false;
  double upsilon_distance = 0.0;  ///< ||u - Upsilon||_inf / ||Upsilon||_inf
  double profile_distance = 0.0;  ///< ||v - U_eps||_inf / ||v||_inf
};

/// Newton on the discrete coupled system, with v sampled on the slow grid and
/// u on the fast grid through the interpolation matrices, started from the
/// ansatz plus `start`. Throws SolverError on divergence and PeakMergerError
/// when v ends with a single central bump (unless require_two_peaks is off).
FullSolution full_solve(const Stage& stage, const FieldPair& start, const FullSolveOptions& opt = {});

/// Discrete residual of the coupled system at (u, v).
FieldPair full_residual(const AnsatzBundle& b, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace spikelab
