#pragma once

#include "spikelab/corrections.hpp"
#include "spikelab/ground_state.hpp"
#include "spikelab/model.hpp"
#include "spikelab/operators.hpp"

#include <string>
#include <vector>

namespace spikelab {

/// omega = W - beta Upsilon^2, the potential felt by the concentrating
/// component, with its value and x1-curvature at the origin.
struct EffectivePotential {
  PotentialSpec w;
  double beta = 0.0;
  RadialProfile upsilon;
  int dim = 1;
  double omega0 = 0.0;
  double d11_omega0 = 0.0;
  double d11_w0 = 0.0;
  double upsilon0 = 0.0;
  double d11_upsilon0 = 0.0;
  bool min_pot = false;          ///< d11_omega0 < 0
  double beta_threshold = 0.0;   ///< -d11 W(0) / (2 Upsilon(0) |Upsilon''(0)|)
  bool beta_condition = false;   ///< beta < beta_threshold
  bool beta_bound_binding = false;  ///< d11 W(0) > 0, so the beta bound is what makes min_pot hold

  double operator()(double x1, double t) const;
};

/// Throws AssumptionError if omega0 <= 0.
EffectivePotential effective_potential(const PotentialSpec& w, double beta, const GroundState& upsilon);

/// rho = d eps ln(1/eps). Throws ConfigError for eps outside (0, 1) or d <= 0.
double peak_law(double eps, double d);

struct AnsatzBundle {
  GridPtr slow, fast;
  double eps = 0.0, d = 0.0, rho = 0.0, shift = 0.0;  ///< shift = rho / eps
  double mu1 = 1.0, mu2 = 1.0, beta = 0.0;
  EffectivePotential omega;
  RadialProfile upsilon;  ///< Upsilon on its radial grid
  RadialProfile spike;    ///< U at stiffness omega0
  SymmetricField xi{};      ///< Upsilon + beta Phi on the slow grid
  SymmetricField theta{};   ///< U_eps + beta Psi_eps on the fast grid
  SymmetricField u_eps{};
  KernelElement z{};
  Eigen::VectorXd theta_on_slow{};  ///< Theta(x/eps) at slow nodes, from the profiles
  Eigen::VectorXd xi_on_fast{};     ///< Xi(eps y) at fast nodes
  Eigen::VectorXd v_slow{};         ///< V(x) at slow nodes
  Eigen::VectorXd w_fast{};         ///< W(eps y) at fast nodes
  SparseMatrix fast_to_slow{};      ///< psi -> psi(x/eps) at slow nodes
  SparseMatrix slow_to_fast{};      ///< phi -> phi(eps y) at fast nodes
  SparseMatrix lap_slow{}, lap_fast{};
};

AnsatzBundle assemble_ansatz(const ModelParams& params, const GroundState& upsilon, const GroundState& spike,
                             const CorrectionBundle& corrections, const EffectivePotential& omega);

struct TermNorm {
  std::string name;
  double l2 = 0.0;
};

struct ErrorFields {
  SymmetricField e1;  ///< slow grid
  SymmetricField e2;  ///< fast grid
  double norm_e1 = 0.0;
  double norm_e2 = 0.0;
  std::vector<TermNorm> terms1, terms2;
};

/// Term-by-term evaluation of the ansatz error, E = -F(Xi, Theta) in the
/// continuum (profiles evaluated analytically, Phi interpolated).
/// `leading_only` keeps (omega0 - omega) U_eps and the cubic overlap in E2 and
/// zeroes E1.
ErrorFields eval_error_terms(const AnsatzBundle& bundle, const CorrectionBundle& corrections,
                             bool leading_only = false);

struct ScalingSample {
  double eps;
  double value;
};

/// Least-squares slope of ln(value / |ln eps|^p) against ln eps. Needs >= 4
/// samples with strictly decreasing eps.
double scaling_fit(const std::vector<ScalingSample>& samples, int log_power);

/// Local maxima of a fast-grid field along the y1 axis (t = 0), refined by
/// three-point parabolic interpolation. Returns the positive-side abscissae,
/// 0 for a maximum at the origin.
std::vector<double> axis_maxima(const SymmetricField& field);

}  // namespace spikelab
