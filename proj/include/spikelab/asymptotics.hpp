#pragma once

#include "spikelab/grid.hpp"

#include <string>
#include <vector>

namespace spikelab {

/// Quadrature controls for the shifted-product integrals. The box spans both
/// supports; `h` defaults to r_max / 1250 of the first profile.
struct OverlapQuadrature {
  double h = 0.0;
};

/// Theta_{s,t}(zeta) = int U^s(x + zeta e1) d/dx1 U^t(x) dx over R^N
/// (N = profile dimension). Odd in zeta. Throws GridError when the shift
/// leaves no overlap inside the profile's support.
double theta_integral(const RadialProfile& u, double s, double t, double zeta, const OverlapQuadrature& q = {});

/// int u(x - zeta e1) v(x) dx over R^N.
double overlap_uv(const RadialProfile& u, const RadialProfile& v, double zeta, const OverlapQuadrature& q = {});

/// |x|^a e^{-b|x|} tail data.
struct Tail {
  double a = 0.0;
  double b = 1.0;
};

/// Asymptotic form e^{-rate |zeta|} |zeta|^power (ln|zeta|)^{log}.
struct RegimePrediction {
  std::string label;  ///< "i", "ii-sum", "ii-log", "ii-plain"
  double rate = 0.0;
  double power = 0.0;
  bool log = false;
  bool swapped = false;  ///< the pair was reordered to meet the a >= a' (or b < b') convention
};

/// Product-overlap asymptotics of two radial tails in R^N. Equal rates are
/// judged with relative tolerance `tol`.
RegimePrediction classify_regime(Tail u, Tail v, int dim, double tol = 1e-9);

/// Theta_{s,t} at stiffness lambda in R^N, from the tails of U^s and d1 U^t
/// (a = -s(N-1)/2, b = s sqrt(lambda)).
RegimePrediction theta_regime(double s, double t, int dim, double lambda);

/// The exponent printed for s = t in the three-case formula:
/// -s(N-1) + (N+1)/2 below s = (N+1)/(N-1), -s(N-1)/2 (with log) at it,
/// -s(N-1)/2 above it; N = 1 uses the first case.
RegimePrediction printed_theta_regime(double s, double t, int dim, double lambda);

struct DecaySample {
  double zeta;
  double value;
};

/// `count` samples of Theta_{s,t} on [lo, hi], equally spaced.
std::vector<DecaySample> theta_samples(const RadialProfile& u, double s, double t, double lo, double hi, int count,
                                       const OverlapQuadrature& q = {});

struct RateFit {
  double rate = 0.0;       ///< fitted exponential rate
  double prefactor = 0.0;  ///< C in C e^{-rate z} z^power (ln z)^log
  double drift = 0.0;      ///< (max - min) / mean of the divided-out prefactor at the fitted rate
  double rms = 0.0;
};

/// Fits ln|value| - power ln z - log ln ln z = ln C - rate z. Needs >= 4
/// samples with z > 1.
RateFit fit_rate(const std::vector<DecaySample>& samples, double power, bool log);

/// Prefactor C(z) = |value| e^{rate z} z^{-power} (ln z)^{-log} with the rate
/// held fixed: returns mean and relative drift.
RateFit fixed_rate_prefactor(const std::vector<DecaySample>& samples, double rate, double power, bool log);

struct LogDetection {
  double q = 0.0;  ///< coefficient of ln ln z in the richer model
  double rss_plain = 0.0;
  double rss_log = 0.0;
  double bic_plain = 0.0;
  double bic_log = 0.0;
  bool prefers_log = false;
};

/// Nested comparison with rate and power held fixed:
///   plain: ln|value| + rate z - power ln z = c
///   log:   ... = c + q ln ln z
/// The log model is preferred when its BIC is lower.
LogDetection detect_log(const std::vector<DecaySample>& samples, double rate, double power);

}  // namespace spikelab
