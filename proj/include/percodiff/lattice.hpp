#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percodiff/geometry.hpp"

namespace percodiff {

/// Deterministic point set in the ball with a separation constant and a covering constant.
struct Lattice {
  int dimension = 3;
  std::vector<Point> points;
  /// |l - l'| >= separation * (1 - |l|) whenever |l| >= |l'|.
  double separation = 0.0;
  /// The ball is covered by B(l, covering * (1 - |l|)).
  double covering = 0.0;
  /// Outermost shell index; the covering check extends to 1 - 2^{-(depth+1)}.
  int depth = 0;
};

/// Points on the shells |x| = 1 - 2^{-j}, j = 0..depth, each shell carrying the
/// radial projection of a cube-surface grid whose spacing is proportional to
/// 2^{-j}. Throws GenerationFailure naming the first violated constraint.
Lattice regular_lattice(int d, double separation, double covering, int depth);

struct RegularityReport {
  bool separation_ok = true;
  bool covering_ok = true;
  /// min |l - l'| / (1 - |l|) over near pairs with |l| >= |l'| (infinity with one point).
  double worst_separation = 0.0;
  std::int64_t samples = 0;
  std::int64_t uncovered = 0;
  std::optional<Point> first_uncovered;
};

/// Verifies separation pairwise over near neighbours and covering by Monte
/// Carlo sampling of {|x| <= 1 - 2^{-(depth+1)}}.
RegularityReport check_regular(const Lattice& lattice, std::int64_t samples = 1'000'000, std::uint64_t seed = 1);

}  // namespace percodiff
