#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percodiff/geometry.hpp"

namespace percodiff {

// Capacities use the normalization cap(B(x, r)) = r^{d-2}.

enum class CapacityMethod { exact, subadditive, aikawa_borichev, oracle, none };

const char* to_string(CapacityMethod m);

struct CapacityEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  CapacityMethod method = CapacityMethod::none;
  CapacityMethod lower_method = CapacityMethod::none;
  CapacityMethod upper_method = CapacityMethod::none;
};

double ball_capacity(double radius, int d);

/// Subadditive bound sum_k r_k^{d-2}.
double capacity_upper(std::span<const Ball> balls);

/// Superadditivity constant used in the Aikawa-Borichev lower bound. Chosen as
/// the calibrated infimum of oracle / sum r^{d-2} over admissible
/// configurations (see calibrate_ab_constant), floored at 0.05. Measured
/// infima: 0.709 for d = 3 and 0.920 for d = 4 (200 configurations, seed
/// 20260101); the smaller one, rounded down, serves every dimension.
inline constexpr double kAikawaBorichevConstant = 0.70;

struct LowerBound {
  std::optional<double> value;
  /// Names the first violated precondition when value is empty.
  std::string violated;
  bool applicable() const { return value.has_value(); }
};

/// c_AB * sum r_k^{d-2}, valid when the balls fit in a ball of unit radius,
/// every r_k <= (sigma_d 2^d)^{-1/2} (sigma_d the unit-ball volume), and the
/// enlarged balls B(y_k, sigma_d^{-1/d} r_k^{1-2/d}) are pairwise disjoint.
LowerBound capacity_lower_ab(std::span<const Ball> balls, int d, double constant = kAikawaBorichevConstant);

/// Enlarged radius sigma_d^{-1/d} r^{1-2/d} appearing in the disjointness precondition.
double ab_enlarged_radius(double r, int d);

/// Boundary-element estimate of the capacity of a union of at most 64 balls.
///
/// Each sphere carries n_panels quasi-uniform collocation panels (Fibonacci
/// sphere in d = 3); panels inside another ball are discarded. The panel
/// charges solve sum_j q_j |x_i - x_j|^{2-d} = 1 with flat-panel self terms;
/// the capacity is the total charge. The solve runs at n and 4n panels per
/// ball: `value` is the finer result, [lower, upper] spans both.
CapacityEstimate capacity_oracle(std::span<const Ball> balls, int n_panels);

/// Single-level solve used by capacity_oracle.
double capacity_oracle_level(std::span<const Ball> balls, int n_panels);

/// Balls meeting the closed cube, each shrunk to radius min(r, dist(p, complement of Q')),
/// Q' being the cube dilated by one sidelength. Balls shrunk to zero are dropped.
std::vector<Ball> clip_to_cube(std::span<const Ball> balls, const Cube& q);

/// cap(A n Q): subadditive value of the clipped balls, with the Aikawa-Borichev
/// lower bound after rescaling when it applies (0 otherwise). A single clipped
/// ball is reported exactly.
CapacityEstimate cube_capacity(std::span<const Ball> balls, const Cube& q);

/// Random admissible configuration for the lower bound: `count` balls with
/// radii in [r_min, r_max], inside the unit ball, enlarged balls disjoint.
std::vector<Ball> random_admissible_configuration(int d, int count, double r_min, double r_max, std::uint64_t seed);

/// Tightest admissible packing of `count` equal balls of radius r (enlarged balls
/// tangent along a greedy cluster), the adversarial case for superadditivity.
std::vector<Ball> packed_admissible_configuration(int d, int count, double r, std::uint64_t seed);

struct Calibration {
  double infimum = 0.0;
  double constant = 0.0;  // max(infimum, 0.05)
  int configurations = 0;
};

/// Infimum of oracle / sum r^{d-2} over a seeded battery of random and packed
/// admissible configurations.
Calibration calibrate_ab_constant(int d, int configurations, std::uint64_t seed, int n_panels);

}  // namespace percodiff
