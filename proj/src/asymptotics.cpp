#include "spikelab/asymptotics.hpp"

#include "spikelab/errors.hpp"
#include "spikelab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spikelab {

namespace {

// Trapezoid sum of f(x1, t) over R^N on nodes x1 = k h in [lo, hi] and t = j h
// in [0, tmax]. The transverse measure is 2 dt (N = 2) or 2 pi t dt (N = 3,
// with the h^2/12 endpoint correction for the t weight).
template <class F>
double box_integral(int dim, double lo, double hi, double tmax, double h, F&& f) {
  const auto k0 = static_cast<long>(std::ceil(lo / h));
  const auto k1 = static_cast<long>(std::floor(hi / h));
  const auto nt = static_cast<long>(std::floor(tmax / h));
  double total = 0.0;
  for (long k = k0; k <= k1; ++k) {
    const double x1 = static_cast<double>(k) * h;
    if (dim == 1) {
      total += f(x1, 0.0);
      continue;
    }
    double line = 0.0;
    if (dim == 2) {
      line = f(x1, 0.0);
      for (long j = 1; j <= nt; ++j) line += 2.0 * f(x1, static_cast<double>(j) * h);
    } else {
      for (long j = 1; j <= nt; ++j) {
        const double t = static_cast<double>(j) * h;
        line += 2.0 * std::numbers::pi * t * f(x1, t);
      }
      line += 2.0 * std::numbers::pi * h / 12.0 * f(x1, 0.0);
    }
    total += line * h;
  }
  return total * h;
}

double positive_pow(double v, double p) { return v > 0.0 ? std::pow(v, p) : 0.0; }

double step_for(const RadialProfile& u, const OverlapQuadrature& q) {
  const double h = q.h > 0.0 ? q.h : u.grid().r_max() / 1250.0;
  if (!(h > 0.0)) throw GridError("overlap quadrature step must be positive");
  return h;
}

}  // namespace

double theta_integral(const RadialProfile& u, double s, double t, double zeta, const OverlapQuadrature& q) {
  if (!(s >= 1.0) || !(t >= 1.0)) throw Error("theta_integral: powers must be >= 1");
  const double r = u.grid().r_max();
  const double lo = std::max(-zeta - r, -r), hi = std::min(-zeta + r, r);
  if (!(hi > lo)) throw GridError("theta_integral: shift leaves no overlap inside the profile support");
  const int dim = u.dim();
  return box_integral(dim, lo, hi, r, step_for(u, q), [&](double x1, double tr) {
    const double a = positive_pow(u(std::hypot(x1 + zeta, tr)), s);
    if (a == 0.0) return 0.0;
    const double rr = std::hypot(x1, tr);
    if (rr == 0.0) return 0.0;
    const double ur = u(rr);
    return a * t * positive_pow(ur, t - 1.0) * u.derivative(rr) * x1 / rr;
  });
}

double overlap_uv(const RadialProfile& u, const RadialProfile& v, double zeta, const OverlapQuadrature& q) {
  if (u.dim() != v.dim()) throw GridError("overlap_uv: profiles live in different dimensions");
  const double ru = u.grid().r_max(), rv = v.grid().r_max();
  const double lo = std::max(zeta - ru, -rv), hi = std::min(zeta + ru, rv);
  if (!(hi > lo)) throw GridError("overlap_uv: shift leaves no overlap inside the profile supports");
  return box_integral(u.dim(), lo, hi, std::min(ru, rv), step_for(u, q), [&](double x1, double t) {
    return u(std::hypot(x1 - zeta, t)) * v(std::hypot(x1, t));
  });
}

RegimePrediction classify_regime(Tail u, Tail v, int dim, double tol) {
  if (!(u.b > 0.0) || !(v.b > 0.0)) throw Error("classify_regime: decay rates must be positive");
  RegimePrediction p;
  const double n1 = (dim + 1) / 2.0;
  if (std::abs(u.b - v.b) > tol * std::max(u.b, v.b)) {
    if (u.b > v.b) {
      std::swap(u, v);
      p.swapped = true;
    }
    p.label = "i";
    p.rate = u.b;
    p.power = u.a;
    return p;
  }
  if (u.a < v.a) {
    std::swap(u, v);
    p.swapped = true;
  }
  p.rate = u.b;
  if (v.a > -n1 + tol) {
    p.label = "ii-sum";
    p.power = u.a + v.a + n1;
  } else if (v.a >= -n1 - tol) {
    p.label = "ii-log";
    p.power = u.a;
    p.log = true;
  } else {
    p.label = "ii-plain";
    p.power = u.a;
  }
  return p;
}

RegimePrediction theta_regime(double s, double t, int dim, double lambda) {
  const double k = std::sqrt(lambda);
  return classify_regime({-s * (dim - 1) / 2.0, s * k}, {-t * (dim - 1) / 2.0, t * k}, dim);
}

RegimePrediction printed_theta_regime(double s, double t, int dim, double lambda) {
  RegimePrediction p;
  p.rate = s * std::sqrt(lambda);
  if (s < t) {
    p.label = "i";
    p.power = -s * (dim - 1) / 2.0;
    return p;
  }
  if (s > t) throw Error("printed_theta_regime: the printed forms cover s <= t only");
  if (dim == 1) {
    p.label = "ii-sum";
    p.power = 1.0;
    return p;
  }
  const double critical = (dim + 1.0) / (dim - 1.0);
  if (std::abs(s - critical) <= 1e-12) {
    p.label = "ii-log";
    p.power = -s * (dim - 1) / 2.0;
    p.log = true;
  } else if (s < critical) {
    p.label = "ii-sum";
    p.power = -s * (dim - 1) + (dim + 1) / 2.0;
  } else {
    p.label = "ii-plain";
    p.power = -s * (dim - 1) / 2.0;
  }
  return p;
}

std::vector<DecaySample> theta_samples(const RadialProfile& u, double s, double t, double lo, double hi, int count,
                                       const OverlapQuadrature& q) {
  if (count < 2 || !(hi > lo)) throw Error("theta_samples: need count >= 2 and hi > lo");
  std::vector<DecaySample> out;
  for (int k = 0; k < count; ++k) {
    const double z = lo + (hi - lo) * k / (count - 1);
    out.push_back({z, theta_integral(u, s, t, z, q)});
  }
  return out;
}

namespace {

std::vector<double> divided_log(const std::vector<DecaySample>& samples, double power, bool log) {
  std::vector<double> y;
  for (const auto& smp : samples) {
    if (!(smp.zeta > 1.0) || smp.value == 0.0) throw Error("decay fit: need z > 1 and nonzero values");
    y.push_back(std::log(std::abs(smp.value)) - power * std::log(smp.zeta) -
                (log ? std::log(std::log(smp.zeta)) : 0.0));
  }
  return y;
}

void prefactor_stats(const std::vector<DecaySample>& samples, const std::vector<double>& y, double rate, RateFit& f) {
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double c = std::exp(y[k] + rate * samples[k].zeta);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  const double mean = sum / static_cast<double>(y.size());
  f.drift = (hi - lo) / mean;
  if (f.prefactor == 0.0) f.prefactor = mean;
}

}  // namespace

RateFit fit_rate(const std::vector<DecaySample>& samples, double power, bool log) {
  if (samples.size() < 4) throw Error("fit_rate: need at least 4 samples");
  const std::vector<double> y = divided_log(samples, power, log);
  std::vector<double> z;
  for (const auto& smp : samples) z.push_back(smp.zeta);
  const LineFit lf = fit_line(z, y);
  RateFit f;
  f.rate = -lf.slope;
  f.prefactor = std::exp(lf.intercept);
  f.rms = lf.rms;
  prefactor_stats(samples, y, f.rate, f);
  return f;
}

RateFit fixed_rate_prefactor(const std::vector<DecaySample>& samples, double rate, double power, bool log) {
  if (samples.size() < 2) throw Error("fixed_rate_prefactor: need at least 2 samples");
  const std::vector<double> y = divided_log(samples, power, log);
  RateFit f;
  f.rate = rate;
  prefactor_stats(samples, y, rate, f);
  return f;
}

LogDetection detect_log(const std::vector<DecaySample>& samples, double rate, double power) {
  if (samples.size() < 4) throw Error("detect_log: need at least 4 samples");
  const std::vector<double> y0 = divided_log(samples, power, false);
  std::vector<double> y, lnln;
  for (std::size_t k = 0; k < y0.size(); ++k) {
    y.push_back(y0[k] + rate * samples[k].zeta);
    lnln.push_back(std::log(std::log(samples[k].zeta)));
  }
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v / n;
  LogDetection d;
  for (double v : y) d.rss_plain += (v - mean) * (v - mean);
  const LineFit lf = fit_line(lnln, y);
  d.q = lf.slope;
  d.rss_log = lf.rss;
  const auto bic = [n](double rss, int k) { return n * std::log(std::max(rss, 1e-300) / n) + k * std::log(n); };
  d.bic_plain = bic(d.rss_plain, 1);
  d.bic_log = bic(d.rss_log, 2);
  d.prefers_log = d.bic_log < d.bic_plain;
  return d;
}

}  // namespace spikelab
