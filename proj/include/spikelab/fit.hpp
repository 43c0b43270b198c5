#pragma once

#include <span>

namespace spikelab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  ///< root-mean-square residual
  double rss = 0.0;  ///< residual sum of squares
};

/// Ordinary least squares y ~ intercept + slope * x. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace spikelab
