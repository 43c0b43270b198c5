#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace spikelab {

/// External potential families. All are even in each variable.
class PotentialSpec {
 public:
  enum class Kind { Constant, PowerTrap, QuadraticForm, TabulatedRadial };

  static PotentialSpec constant(double lambda);
  /// lambda + c |x|^m
  static PotentialSpec power_trap(double lambda, double c, double m);
  /// w0 + sum_i a_i x_i^2; missing coefficients are 0.
  static PotentialSpec quadratic_form(double w0, std::vector<double> a);
  /// Piecewise linear in r through (r_k, v_k), constant past the last node.
  static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v);

  Kind kind() const { return kind_; }
  std::string kind_name() const;

  /// Value at a point given by its axial coordinate x1 and transverse
  /// coordinate t (x2 for N=2, r' for N=3, ignored for N=1).
  double at(double x1, double t, int dim) const;
  double radial(double r) const;
  bool is_radial() const;
  double at_origin() const { return radial_or_axis(0.0); }
  /// Lower bound over the ball of the given radius.
  double infimum(double radius) const;
  /// d^2/dx1^2 at the origin, analytic where available, else a centered
  /// second difference.
  double d11_at_origin() const;

  /// Throws AssumptionError unless the infimum over the ball is positive and
  /// the spec is consistent with the dimension (axisymmetry for N = 3).
  void validate(double radius, int dim) const;

  nlohmann::json to_json() const;
  static PotentialSpec from_json(const nlohmann::json& j);

 private:
  double radial_or_axis(double r) const;

  Kind kind_ = Kind::Constant;
  double lambda_ = 1.0;
  double c_ = 0.0;
  double m_ = 2.0;
  std::vector<double> a_;
  std::vector<double> table_r_;
  std::vector<double> table_v_;
};

}  // namespace spikelab
