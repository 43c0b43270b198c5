#pragma once

#include "spikelab/potential.hpp"

namespace spikelab {

/// Scalar data of the coupled system
///   -Delta u + V(x) u = mu1 u^3 + beta u v^2(x/eps)
///   -Delta v + W(eps y) v = mu2 v^3 + beta u^2(eps y) v
/// with spikes of v at y = +-rho/eps e1, rho = d eps ln(1/eps).
struct ModelParams {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double beta = -1.0;
  double eps = 0.05;
  double d = 0.0;  ///< peak-law coefficient; 0 selects 1/sqrt(omega0)
  int dim = 2;
  PotentialSpec V = PotentialSpec::constant(1.0);
  PotentialSpec W = PotentialSpec::constant(1.0);

  /// Throws ConfigError on mu <= 0, beta > 0, eps outside (0,1), d < 0, or a
  /// dimension other than 2 and 3. beta = 0 is accepted as the decoupled case.
  void validate() const;
};

/// Discretization knobs, in units of the relevant decay length.
struct GridSettings {
  double radial_h = 0.01;        ///< radial spacing, decay lengths
  double radial_extent = 25.0;   ///< radial truncation, decay lengths
  double slow_extent = 18.0;     ///< slow box half-width, decay lengths of inf V
  double slow_core = 2.0;        ///< graded core of the slow grid, units of eps
  double slow_per_efold = 40.0;  ///< slow nodes per e-fold of the sinh map
  double fast_h = 0.08;          ///< fast spacing, units of 1/sqrt(omega0)
  double fast_margin = 14.0;     ///< fast box margin beyond the peak, 1/sqrt(omega0)
};

}  // namespace spikelab
