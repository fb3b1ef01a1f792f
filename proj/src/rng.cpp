#include "percodiff/rng.hpp"

#include <cmath>

namespace percodiff {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  for (std::uint64_t c : counters) h = splitmix64(h ^ splitmix64(c + 0x3c6ef372fe94f82bULL));
  return h;
}

Engine make_engine(std::uint64_t seed) {
  return Engine(seed);
}

Point random_direction(Engine& rng, int d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point v(d);
  double n2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
    n2 = v.norm2();
  } while (n2 < 1e-300);
  return v * (1.0 / std::sqrt(n2));
}

Point random_in_ball(Engine& rng, int d, double radius) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double r = radius * std::pow(uniform(rng), 1.0 / d);
  return random_direction(rng, d) * r;
}

}  // namespace percodiff
