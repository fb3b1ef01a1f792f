#include "percodiff/lattice.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "percodiff/errors.hpp"
#include "percodiff/obstacle_index.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

namespace {

// Nodes of the surface of [-1,1]^d with n cells per edge, radially projected to
// the unit sphere. A node on several faces is emitted for the lowest axis only.
std::vector<Point> cube_sphere(int d, int n) {
  std::vector<Point> out;
  const int m = d - 1;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  for (int axis = 0; axis < d; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        Point y(d);
        y[axis] = sign;
        bool owned = true;
        for (int k = 0, i = 0; i < d; ++i) {
          if (i == axis) continue;
          const int g = idx[static_cast<std::size_t>(k++)];
          y[i] = -1.0 + 2.0 * g / n;
          if ((g == 0 || g == n) && i < axis) owned = false;
        }
        if (owned) out.push_back(y * (1.0 / y.norm()));
        int k = 0;
        while (k < m && ++idx[static_cast<std::size_t>(k)] > n) idx[static_cast<std::size_t>(k++)] = 0;
        if (k == m) break;
      }
    }
  }
  return out;
}

std::vector<Ball> point_balls(const std::vector<Point>& pts) {
  std::vector<Ball> balls;
  balls.reserve(pts.size());
  for (const auto& p : pts) balls.emplace_back(p, std::numeric_limits<double>::denorm_min());
  return balls;
}

struct SeparationResult {
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
};

SeparationResult check_separation(const Lattice& lattice) {
  SeparationResult res;
  if (lattice.points.size() < 2) return res;
  const ObstacleIndex index(lattice.dimension, point_balls(lattice.points));
  // Near pairs only: look a little beyond the required gap to report the worst ratio nearby.
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    const Point& p = lattice.points[i];
    const double norm = p.norm();
    const double scale = 1.0 - norm;
    const double reach = std::max(lattice.separation, 1.0) * scale;
    index.for_each_within(p, reach, [&](std::size_t j) {
      if (j == i) return;
      const Point& q = lattice.points[j];
      const double qn = q.norm();
      if (qn > norm || (qn == norm && j > i && !(q == p))) return;
      const double ratio = distance(p, q) / scale;
      res.worst = std::min(res.worst, ratio);
      if (ratio < lattice.separation) res.ok = false;
    });
  }
  return res;
}

}  // namespace

Lattice regular_lattice(int d, double separation, double covering, int depth) {
  check_dimension(d);
  if (!(separation > 0.0)) throw InvalidParameter("separation constant must be positive");
  if (!(covering > 0.0 && covering < 1.0)) throw InvalidParameter("covering constant must lie in (0, 1)");
  if (depth < 0 || depth > 20) throw InvalidParameter("lattice depth must lie in [0, 20]");
  // Shells sit 2^{-j-1} apart radially, so covering radii r 2^{-j} need r > 1/2.
  if (covering <= 0.5) {
    throw GenerationFailure(fmt::format("covering: r = {} cannot bridge the radial gap between dyadic shells "
                                        "(needs r > 1/2)",
                                        covering));
  }
  Lattice lattice;
  lattice.dimension = d;
  lattice.separation = separation;
  lattice.covering = covering;
  lattice.depth = depth;
  lattice.points.push_back(Point(d));
  const double slack = std::sqrt(covering * covering - 0.25);
  for (int j = 1; j <= depth; ++j) {
    const double radius = 1.0 - std::ldexp(1.0, -j);
    // Angular chord <= sqrt(d-1)/n must stay below slack * 2^{-j}.
    const int n = static_cast<int>(std::ceil(1.02 * std::sqrt(d - 1.0) * std::ldexp(1.0, j) / slack));
    for (const auto& w : cube_sphere(d, n)) lattice.points.push_back(w * radius);
  }
  const auto sep = check_separation(lattice);
  if (!sep.ok) {
    throw GenerationFailure(fmt::format("separation: achieved ratio {:.4g} is below the requested {}", sep.worst,
                                        separation));
  }
  return lattice;
}

RegularityReport check_regular(const Lattice& lattice, std::int64_t samples, std::uint64_t seed) {
  check_dimension(lattice.dimension);
  RegularityReport report;
  for (const auto& p : lattice.points) {
    if (!(p.norm() < 1.0)) throw InvalidInput("lattice points must lie in the open unit ball");
  }
  const auto sep = check_separation(lattice);
  report.separation_ok = sep.ok;
  report.worst_separation = sep.worst;

  std::vector<Ball> cover;
  cover.reserve(lattice.points.size());
  for (const auto& p : lattice.points) cover.emplace_back(p, lattice.covering * (1.0 - p.norm()));
  const ObstacleIndex index(lattice.dimension, std::move(cover));
  const double extent = 1.0 - std::ldexp(1.0, -(lattice.depth + 1));
  Engine rng = make_engine(derive_seed(seed, Stream::lattice_check));
  report.samples = samples;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Point x = random_in_ball(rng, lattice.dimension, extent);
    if (!(index.distance(x) < 0.0)) {
      if (!report.first_uncovered) report.first_uncovered = x;
      ++report.uncovered;
    }
  }
  report.covering_ok = report.uncovered == 0;
  return report;
}

}  // namespace percodiff
