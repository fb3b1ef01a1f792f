#include "percodiff/wos.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "percodiff/errors.hpp"
#include "percodiff/parallel.hpp"
#include "percodiff/point_process.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

namespace {

enum class Fate { escaped, absorbed, censored };

struct PathResult {
  Fate fate = Fate::censored;
  std::int64_t steps = 0;
};

PathResult walk(const ObstacleIndex& index, Point x, const WalkSettings& s, Engine& rng) {
  const int d = x.dim();
  const auto balls = index.balls();
  for (std::int64_t step = 0; step < s.max_steps; ++step) {
    const double to_sphere = 1.0 - x.norm();
    if (to_sphere < s.boundary_shell) return {Fate::escaped, step};
    const auto near = index.nearest(x);
    if (near.ball >= 0 && near.distance < s.kill_factor * balls[static_cast<std::size_t>(near.ball)].radius()) {
      return {Fate::absorbed, step};
    }
    x += random_direction(rng, d) * std::min(to_sphere, near.distance);
  }
  return {Fate::censored, s.max_steps};
}

bool start_blocked(const ObstacleIndex& index, const Point& x0, const WalkSettings& s) {
  const auto near = index.nearest(x0);
  return near.ball >= 0 && near.distance <= s.kill_factor * index.balls()[static_cast<std::size_t>(near.ball)].radius();
}

void check_start(const Point& x0, const WalkSettings& s) {
  if (!(x0.norm() < 1.0 - s.boundary_shell)) throw InvalidStart("start point is not inside the ball");
}

double binomial_error(double p, std::int64_t n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

ProbeRung summarize(double epsilon, const std::vector<EscapeEstimate>& estimates) {
  ProbeRung r;
  r.epsilon = epsilon;
  r.realizations = static_cast<int>(estimates.size());
  if (estimates.empty()) return r;
  r.min = 1.0;
  r.max = 0.0;
  int positive = 0;
  for (const auto& e : estimates) {
    r.probabilities.push_back(e.probability);
    r.min = std::min(r.min, e.probability);
    r.max = std::max(r.max, e.probability);
    r.blocked += e.blocked ? 1 : 0;
    r.censored += e.censored;
    r.paths += e.paths;
    if (e.probability > 3.0 * e.std_error && e.escaped > 0) ++positive;
  }
  const auto n = static_cast<double>(estimates.size());
  r.mean = std::accumulate(r.probabilities.begin(), r.probabilities.end(), 0.0) / n;
  if (estimates.size() > 1) {
    double var = 0.0;
    for (double p : r.probabilities) var += (p - r.mean) * (p - r.mean);
    r.std_error = std::sqrt(var / (n - 1.0) / n);
  } else {
    r.std_error = estimates.front().std_error;
  }
  r.fraction_positive = positive / n;
  return r;
}

EscapeEstimate blocked_estimate(std::int64_t n_paths) {
  EscapeEstimate e;
  e.paths = n_paths;
  e.absorbed = n_paths;
  e.blocked = true;
  return e;
}

}  // namespace

EscapeEstimate escape_probability(const ObstacleIndex& index, const Point& x0, const WalkSettings& settings,
                                  std::int64_t n_paths, std::uint64_t seed, int threads) {
  if (n_paths < 1) throw InvalidParameter("need at least one path");
  if (x0.dim() != index.dim() && !index.empty()) throw InvalidParameter("start point dimension does not match");
  check_start(x0, settings);
  if (start_blocked(index, x0, settings)) throw InvalidStart("start point lies inside an obstacle");

  constexpr std::int64_t kChunk = 256;
  const auto chunks = static_cast<std::size_t>((n_paths + kChunk - 1) / kChunk);
  std::vector<EscapeEstimate> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    EscapeEstimate& e = partial[c];
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(n_paths, begin + kChunk);
    for (std::int64_t i = begin; i < end; ++i) {
      Engine rng = make_engine(derive_seed(seed, Stream::path, {static_cast<std::uint64_t>(i)}));
      const auto result = walk(index, x0, settings, rng);
      e.steps += result.steps;
      ++e.paths;
      if (result.fate == Fate::escaped) {
        ++e.escaped;
      } else {
        ++e.absorbed;
        if (result.fate == Fate::censored) ++e.censored;
      }
    }
  });
  EscapeEstimate total;
  for (const auto& e : partial) {
    total.paths += e.paths;
    total.escaped += e.escaped;
    total.absorbed += e.absorbed;
    total.censored += e.censored;
    total.steps += e.steps;
  }
  total.probability = static_cast<double>(total.escaped) / static_cast<double>(total.paths);
  total.std_error = binomial_error(total.probability, total.paths);
  return total;
}

std::vector<ProbeRung> avoidability_probe(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                          std::span<const double> ladder, const Point& x0, std::int64_t n_paths,
                                          int n_realizations, std::uint64_t seed, const WalkSettings& settings,
                                          int threads) {
  if (ladder.empty()) throw InvalidParameter("truncation ladder is empty");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i] < ladder[i - 1])) throw InvalidParameter("ladder must be strictly decreasing");
  }
  if (n_realizations < 1) throw InvalidParameter("need at least one realization");
  if (x0.dim() != d) throw InvalidParameter("start point dimension does not match");
  check_start(x0, settings);

  const auto n = static_cast<std::size_t>(n_realizations);
  std::vector<std::vector<EscapeEstimate>> per_rung(ladder.size(), std::vector<EscapeEstimate>(n));
  parallel_for(n, threads, [&](std::size_t k) {
    const auto full = sample_realization(nu, phi, ladder.back(), derive_seed(seed, Stream::probe_realization, {k}), d);
    const std::uint64_t path_seed = derive_seed(seed, Stream::probe_paths, {k});
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const auto real = i + 1 == ladder.size() ? full : full.restricted(ladder[i]);
      const ObstacleIndex index(d, build_archipelago(real));
      per_rung[i][k] = start_blocked(index, x0, settings)
                           ? blocked_estimate(n_paths)
                           : escape_probability(index, x0, settings, n_paths, path_seed, 1);
    }
  });
  std::vector<ProbeRung> out;
  for (std::size_t i = 0; i < ladder.size(); ++i) out.push_back(summarize(ladder[i], per_rung[i]));
  return out;
}

ProbeRung probe_archipelago(std::span<const Ball> balls, double epsilon, const Point& x0, std::int64_t n_paths,
                            std::uint64_t seed, const WalkSettings& settings, int threads) {
  check_start(x0, settings);
  const ObstacleIndex index(x0.dim(), std::vector<Ball>(balls.begin(), balls.end()));
  const auto e = start_blocked(index, x0, settings) ? blocked_estimate(n_paths)
                                                    : escape_probability(index, x0, settings, n_paths, seed, threads);
  return summarize(epsilon, {e});
}

void write_escape_csv(std::ostream& out, std::span<const ProbeRung> rungs) {
  out << "# schema=1\n";
  out << "epsilon,mean,stderr,min,max,fraction_positive,realizations,blocked,censored,paths\n";
  for (const auto& r : rungs) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.epsilon, r.mean, r.std_error, r.min, r.max,
                       r.fraction_positive, r.realizations, r.blocked, r.censored, r.paths);
  }
}

}  // namespace percodiff
