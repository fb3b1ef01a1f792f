#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "percodiff/geometry.hpp"
#include "percodiff/profiles.hpp"

namespace percodiff {

/// Outcome of checking a (phi, nu) pair against the standing assumptions.
struct ProfileValidation {
  /// Smallest C with phi(x)/C <= phi(y) <= C phi(x) for y in B(x, (1-|x|)/2), over the sample grid.
  double quasi_constancy_phi = 1.0;
  double quasi_constancy_nu = 1.0;
  bool quasi_constancy_ok = true;
  /// sup phi(t) / (1 - t); must stay below 1.
  double boundary_ratio = 0.0;
  bool boundary_ratio_ok = true;
  /// sup (1 - t)^2 phi(t)^{d-2} nu(t); must stay bounded as t -> 1.
  double mass_bound = 0.0;
  /// Log-log growth rate of that quantity over the innermost decades (<= 0 when bounded).
  double mass_growth = 0.0;
  bool mass_bound_ok = true;

  bool passed() const { return quasi_constancy_ok && boundary_ratio_ok && mass_bound_ok; }
  std::string summary() const;
};

/// Evaluates the quasi-constancy, boundary-ratio and mass-growth assumptions on a
/// deterministic grid reaching 1e-12 from the sphere. Throws InvalidProfile when
/// a profile produces negative or non-finite values on the grid.
ProfileValidation validate_profiles(const RadiusProfile& phi, const IntensityProfile& nu, int d);

struct MeanMeasure {
  double value = 0.0;
  /// Set when the region reaches the sphere and nu is not integrable there.
  bool divergent = false;
};

/// mu({a <= |x| < b}) = |S^{d-1}| * int_a^b t^{d-1} nu(t) dt.
MeanMeasure mean_measure(const IntensityProfile& nu, double a, double b, int d);

/// mu(Q) for an axis-aligned cube inside the ball, by tensor Gauss-Legendre quadrature.
double cube_mean_measure(const IntensityProfile& nu, const Cube& q);

/// One sample of the Poisson process truncated to {|x| < 1 - epsilon}.
struct Realization {
  int dimension = 3;
  std::vector<Point> centers;
  std::vector<double> radii;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string phi;
  std::string nu;

  std::size_t size() const { return centers.size(); }
  /// Keeps the centres with |p| < 1 - epsilon (epsilon >= this->epsilon).
  Realization restricted(double epsilon) const;

  friend bool operator==(const Realization&, const Realization&) = default;
};

/// Samples the process: per dyadic annulus 1 - 2^{-j} <= |x| < 1 - 2^{-j-1}, a
/// Poisson count with the annulus mean measure, then points placed by
/// rejection against the annulus supremum of t^{d-1} nu(t). Annulus j draws
/// from a sub-seed of (seed, j). Throws InvalidProfile when validation fails and
/// DivergenceError when the truncated region carries infinite mean measure.
Realization sample_realization(const IntensityProfile& nu, const RadiusProfile& phi, double epsilon,
                               std::uint64_t seed, int d);

/// A_P: one closed ball B(p, phi(|p|)) per centre. Centres with phi = 0 carry no
/// obstacle (a point is polar) and are skipped.
std::vector<Ball> build_archipelago(const Realization& r);

/// Line-oriented text format: a header (dimension, epsilon, seed, profiles,
/// count) followed by one "x_1 ... x_d r" line per obstacle, 17 significant digits.
void write_realization(std::ostream& out, const Realization& r);
Realization read_realization(std::istream& in);

}  // namespace percodiff
