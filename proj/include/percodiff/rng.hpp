#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "percodiff/geometry.hpp"

namespace percodiff {

using Engine = std::mt19937_64;

/// Stream tags used when deriving sub-seeds; each consumer draws from its own family.
enum class Stream : std::uint64_t {
  annulus = 1,
  probe_realization = 2,
  probe_paths = 3,
  wiener_realization = 4,
  path = 5,
  lattice_check = 6,
  capacity_battery = 7,
  lemma3 = 8,
};

/// Counter-based seed derivation: a pure function of (master, stream, counters),
/// so a sub-stream is reproducible regardless of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> counters = {});

Engine make_engine(std::uint64_t seed);

/// Uniformly distributed direction on S^{d-1}.
Point random_direction(Engine& rng, int d);

/// Uniform point in the ball of the given radius centred at the origin.
Point random_in_ball(Engine& rng, int d, double radius);

}  // namespace percodiff
