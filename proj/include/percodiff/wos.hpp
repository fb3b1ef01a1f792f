#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "percodiff/geometry.hpp"
#include "percodiff/obstacle_index.hpp"
#include "percodiff/profiles.hpp"

namespace percodiff {

struct WalkSettings {
  /// A walker with 1 - |x| below this has escaped.
  double boundary_shell = 1e-6;
  /// A walker closer than kill_factor * r to an obstacle of radius r is absorbed.
  double kill_factor = 1e-9;
  std::int64_t max_steps = 1'000'000;
};

struct EscapeEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
  std::int64_t escaped = 0;
  /// Includes the censored paths.
  std::int64_t absorbed = 0;
  std::int64_t censored = 0;
  std::int64_t steps = 0;
  /// Set when the start point lies in an obstacle; every path then counts as absorbed.
  bool blocked = false;
};

/// Walk-on-spheres estimate of the probability that Brownian motion from x0
/// reaches the unit sphere before the obstacles. Path i draws from
/// derive_seed(seed, path, {i}), so the estimate does not depend on `threads`.
/// Throws InvalidStart when x0 is outside the ball or within the kill shell of an obstacle.
EscapeEstimate escape_probability(const ObstacleIndex& index, const Point& x0, const WalkSettings& settings,
                                  std::int64_t n_paths, std::uint64_t seed, int threads = 1);

/// Escape statistics across realizations at one truncation.
struct ProbeRung {
  double epsilon = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Fraction of realizations whose escape frequency exceeds 3 binomial sigma.
  double fraction_positive = 0.0;
  int realizations = 0;
  int blocked = 0;
  std::int64_t censored = 0;
  std::int64_t paths = 0;
  std::vector<double> probabilities;
};

/// For each rung, escape_probability over n_realizations archipelagos. Realization
/// k is sampled once at the smallest rung from derive_seed(seed, probe_realization, {k})
/// and restricted to |p| < 1 - eps for the other rungs, which has the law of a
/// sample at eps; paths reuse derive_seed(seed, probe_paths, {k}) on every rung.
/// A start point swallowed by an obstacle reports probability 0 and is counted as blocked.
std::vector<ProbeRung> avoidability_probe(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                          std::span<const double> ladder, const Point& x0, std::int64_t n_paths,
                                          int n_realizations, std::uint64_t seed, const WalkSettings& settings = {},
                                          int threads = 1);

/// Same statistics for a fixed family of archipelagos, one per rung.
ProbeRung probe_archipelago(std::span<const Ball> balls, double epsilon, const Point& x0, std::int64_t n_paths,
                            std::uint64_t seed, const WalkSettings& settings = {}, int threads = 1);

/// CSV with header "# schema=1" and columns
/// epsilon,mean,stderr,min,max,fraction_positive,realizations,blocked,censored,paths.
void write_escape_csv(std::ostream& out, std::span<const ProbeRung> rungs);

}  // namespace percodiff
