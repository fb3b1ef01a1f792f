#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "percodiff/geometry.hpp"

namespace percodiff {

enum class ProfileFamily { power_law, constant, table, radial_power };

/// A nonnegative function of the radius t = |x|.
///
/// Families:
///   power_law     kappa * (1 - t)^exponent
///   constant      kappa
///   table         log-linear interpolation of ln f against ln(1 - t)
///   radial_power  kappa * t^exponent (for profiles on the exterior of the ball)
class RadialFunction {
 public:
  static RadialFunction power_law(double kappa, double exponent);
  static RadialFunction constant(double kappa);
  static RadialFunction table(std::vector<double> radii, std::vector<double> values);
  static RadialFunction radial_power(double kappa, double exponent);

  double at_radius(double t) const;
  /// Value at t = 1 - u, evaluated without forming 1 - u where it matters.
  double at_boundary_distance(double u) const;
  /// e such that f(t) behaves like (1 - t)^e as t -> 1.
  double tail_exponent() const;
  bool is_zero() const;

  ProfileFamily family() const { return family_; }
  double kappa() const { return kappa_; }
  double exponent() const { return exponent_; }
  const std::vector<double>& table_radii() const { return radii_; }
  const std::vector<double>& table_values() const { return values_; }

  friend bool operator==(const RadialFunction&, const RadialFunction&) = default;

 private:
  RadialFunction() = default;
  double table_at(double u) const;

  ProfileFamily family_ = ProfileFamily::constant;
  double kappa_ = 0.0;
  double exponent_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> log_u_;
  std::vector<double> log_v_;
};

/// Obstacle radius phi as a function of |x|.
class RadiusProfile {
 public:
  /// kappa (1 - t)^gamma with kappa > 0 and gamma >= 1.
  static RadiusProfile power_law(double kappa, double gamma);
  static RadiusProfile constant(double kappa);
  /// Values must be positive and nonincreasing in t.
  static RadiusProfile table(std::vector<double> radii, std::vector<double> values);
  static RadiusProfile radial_power(double kappa, double exponent);
  static RadiusProfile zero() { return constant(0.0); }

  /// Descriptor grammar: "power-law K G" | "constant K" | "table t:v,t:v,..." | "radial-power K P".
  static RadiusProfile parse(std::string_view descriptor);
  std::string describe() const;

  double operator()(double t) const { return f_.at_radius(t); }
  double at(const Point& x) const { return f_.at_radius(x.norm()); }
  double at_boundary_distance(double u) const { return f_.at_boundary_distance(u); }
  const RadialFunction& function() const { return f_; }

  friend bool operator==(const RadiusProfile&, const RadiusProfile&) = default;

 private:
  explicit RadiusProfile(RadialFunction f) : f_(std::move(f)) {}
  RadialFunction f_;
};

/// Poisson intensity nu as a function of |x|.
class IntensityProfile {
 public:
  /// kappa (1 - t)^{-beta} with kappa > 0.
  static IntensityProfile power_law(double kappa, double beta);
  static IntensityProfile constant(double kappa);
  static IntensityProfile table(std::vector<double> radii, std::vector<double> values);
  static IntensityProfile radial_power(double kappa, double exponent);
  static IntensityProfile zero() { return constant(0.0); }

  /// Same grammar as RadiusProfile; for "power-law K B" the exponent is -B.
  static IntensityProfile parse(std::string_view descriptor);
  std::string describe() const;

  double operator()(double t) const { return f_.at_radius(t); }
  double at(const Point& x) const { return f_.at_radius(x.norm()); }
  double at_boundary_distance(double u) const { return f_.at_boundary_distance(u); }
  const RadialFunction& function() const { return f_; }

  friend bool operator==(const IntensityProfile&, const IntensityProfile&) = default;

 private:
  explicit IntensityProfile(RadialFunction f) : f_(std::move(f)) {}
  RadialFunction f_;
};

}  // namespace percodiff
