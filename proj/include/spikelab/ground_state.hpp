#pragma once

#include "spikelab/grid.hpp"
#include "spikelab/potential.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

namespace spikelab {

/// ln U(r) + a ln r ~ const - rate * r with a = (N-1)/2 held fixed.
struct DecayFit {
  double rate = 0.0;
  double power = 0.0;
  double rms_residual = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::size_t samples = 0;
};

struct GroundState {
  RadialProfile profile;
  PotentialSpec potential;
  double mu = 1.0;
  double peak_value = 0.0;
  double residual = 0.0;  ///< max-norm of the discrete PDE residual
  int iterations = 0;
  std::optional<DecayFit> decay;

  int dim() const { return profile.dim(); }
};

struct GroundStateOptions {
  double tolerance = 1e-10;
  int max_iterations = 60;
  int stencil_order = 4;  ///< radial Laplacian order used by the Newton solve
};

/// Positive radial solution of -Delta u + V u = mu u^3 on the grid, by damped
/// Newton from sech-shaped guesses. Throws SolverError on non-convergence or
/// when only zero / sign-changing limits are found.
GroundState solve_ground_state(const PotentialSpec& potential, double mu, const RadialGrid& grid,
                               const GroundStateOptions& options = {});

/// Grid with r_max = r_units / sqrt(lambda) and h = h_units / sqrt(lambda).
RadialGrid scaled_radial_grid(double lambda, int dim, double h_units = 0.01, double r_units = 25.0);

/// sqrt(lambda/mu) U(sqrt(lambda) r) from a base solved with V = 1, mu = 1,
/// resampled onto `target`.
GroundState rescale_ground_state(const GroundState& base, double lambda, double mu, const RadialGrid& target);

/// Max-norm of -Delta u + V u - mu u^3 at the unknown nodes.
double ground_state_residual(const RadialProfile& profile, const PotentialSpec& potential, double mu,
                             int stencil_order = 4);

/// Decay fit over nodes with r in [r_lo, r_hi]. Needs at least 10 nodes.
DecayFit fit_decay(const RadialProfile& profile, double r_lo, double r_hi);

/// Window where the profile lies in [1e-8, 1e-2], pulled in from the
/// Dirichlet edge by eight decay lengths of `rate_guess`.
std::pair<double, double> default_decay_window(const RadialProfile& profile, double rate_guess);

struct NondegeneracyReport {
  double smallest_eigenvalue = 0.0;  ///< signed eigenvalue of least magnitude
  double smallest_eigenvalue_magnitude = 0.0;
  double threshold = 0.0;
  bool degenerate = false;
  std::string subspace = "even (radial)";
};

/// Spectrum of the radial discretization of -Delta + V - 3 mu U^2 - shift.
NondegeneracyReport check_nondegeneracy(const GroundState& gs, double shift = 0.0);

/// Text checkpoint: magic line, key/value header, one value per node.
void write_ground_state(std::ostream& out, const GroundState& gs);
GroundState read_ground_state(std::istream& in);

}  // namespace spikelab
