#include "spikelab/potential.hpp"

#include "spikelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace spikelab {

PotentialSpec PotentialSpec::constant(double lambda) {
  PotentialSpec p;
  p.kind_ = Kind::Constant;
  p.lambda_ = lambda;
  return p;
}

PotentialSpec PotentialSpec::power_trap(double lambda, double c, double m) {
  if (!(m > 0.0)) throw ConfigError("power-trap exponent m must be positive");
  PotentialSpec p;
  p.kind_ = Kind::PowerTrap;
  p.lambda_ = lambda;
  p.c_ = c;
  p.m_ = m;
  return p;
}

PotentialSpec PotentialSpec::quadratic_form(double w0, std::vector<double> a) {
  if (a.size() > 3) throw ConfigError("quadratic-form takes at most 3 coefficients");
  PotentialSpec p;
  p.kind_ = Kind::QuadraticForm;
  p.lambda_ = w0;
  p.a_ = std::move(a);
  p.a_.resize(3, 0.0);
  return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> r, std::vector<double> v) {
  if (r.size() < 2 || r.size() != v.size()) throw ConfigError("tabulated potential needs >= 2 matching (r, v) pairs");
  if (r.front() != 0.0) throw ConfigError("tabulated potential must start at r = 0");
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1])) throw ConfigError("tabulated radii must increase strictly");
  PotentialSpec p;
  p.kind_ = Kind::TabulatedRadial;
  p.table_r_ = std::move(r);
  p.table_v_ = std::move(v);
  return p;
}

std::string PotentialSpec::kind_name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::PowerTrap: return "power-trap";
    case Kind::QuadraticForm: return "quadratic-form";
    default: return "tabulated-radial";
  }
}

bool PotentialSpec::is_radial() const {
  return kind_ != Kind::QuadraticForm || (a_[0] == a_[1] && a_[1] == a_[2]);
}

double PotentialSpec::radial_or_axis(double r) const {
  switch (kind_) {
    case Kind::Constant: return lambda_;
    case Kind::PowerTrap: return lambda_ + c_ * std::pow(std::abs(r), m_);
    case Kind::QuadraticForm: return lambda_ + a_[0] * r * r;
    default: {
      const double x = std::abs(r);
      if (x >= table_r_.back()) return table_v_.back();
      const auto it = std::upper_bound(table_r_.begin(), table_r_.end(), x);
      const auto k = static_cast<std::size_t>(it - table_r_.begin()) - 1;
      const double s = (x - table_r_[k]) / (table_r_[k + 1] - table_r_[k]);
      return (1.0 - s) * table_v_[k] + s * table_v_[k + 1];
    }
  }
}

double PotentialSpec::radial(double r) const {
  if (!is_radial()) throw ConfigError("potential '" + kind_name() + "' is not radial");
  return radial_or_axis(r);
}

double PotentialSpec::at(double x1, double t, int dim) const {
  if (kind_ == Kind::QuadraticForm) {
    if (dim == 1) return lambda_ + a_[0] * x1 * x1;
    return lambda_ + a_[0] * x1 * x1 + a_[1] * t * t;
  }
  return radial_or_axis(dim == 1 ? x1 : std::hypot(x1, t));
}

double PotentialSpec::infimum(double radius) const {
  switch (kind_) {
    case Kind::Constant: return lambda_;
    case Kind::PowerTrap: return lambda_ + std::min(0.0, c_ * std::pow(radius, m_));
    case Kind::QuadraticForm: {
      double v = lambda_;
      for (double a : a_) v += std::min(0.0, a) * radius * radius;
      return v;
    }
    default: {
      double v = radial_or_axis(radius);
      for (std::size_t k = 0; k < table_r_.size() && table_r_[k] <= radius; ++k) v = std::min(v, table_v_[k]);
      return v;
    }
  }
}

double PotentialSpec::d11_at_origin() const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::QuadraticForm: return 2.0 * a_[0];
    case Kind::PowerTrap:
      if (m_ == 2.0) return 2.0 * c_;
      if (m_ > 2.0) return 0.0;
      [[fallthrough]];
    default: {
      const double h = 1e-3;
      return (radial_or_axis(h) - 2.0 * radial_or_axis(0.0) + radial_or_axis(-h)) / (h * h);
    }
  }
}

void PotentialSpec::validate(double radius, int dim) const {
  const double inf = infimum(radius);
  if (!(inf > 0.0))
    throw AssumptionError("potential '" + kind_name() + "' has infimum " + std::to_string(inf) +
                          " <= 0 over the computational domain");
  if (kind_ == Kind::QuadraticForm && dim == 3 && a_[1] != a_[2])
    throw AssumptionError("quadratic-form potential in N=3 must be axisymmetric (a2 == a3)");
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  switch (kind_) {
    case Kind::Constant: j["lambda"] = lambda_; break;
    case Kind::PowerTrap:
      j["lambda"] = lambda_;
      j["c"] = c_;
      j["m"] = m_;
      break;
    case Kind::QuadraticForm:
      j["w0"] = lambda_;
      j["a"] = a_;
      break;
    default:
      j["r"] = table_r_;
      j["v"] = table_v_;
  }
  return j;
}

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in potential block");
  }
}

double required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("potential block needs numeric '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("potential block needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "lambda"});
    return constant(required(j, "lambda"));
  }
  if (kind == "power-trap") {
    check_keys(j, {"kind", "lambda", "c", "m"});
    return power_trap(required(j, "lambda"), required(j, "c"), required(j, "m"));
  }
  if (kind == "quadratic-form") {
    check_keys(j, {"kind", "w0", "a"});
    if (!j.contains("a") || !j.at("a").is_array()) throw ConfigError("quadratic-form needs an array 'a'");
    return quadratic_form(required(j, "w0"), j.at("a").get<std::vector<double>>());
  }
  if (kind == "tabulated-radial") {
    check_keys(j, {"kind", "r", "v"});
    if (!j.contains("r") || !j.contains("v")) throw ConfigError("tabulated-radial needs arrays 'r' and 'v'");
    return tabulated(j.at("r").get<std::vector<double>>(), j.at("v").get<std::vector<double>>());
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

}  // namespace spikelab
