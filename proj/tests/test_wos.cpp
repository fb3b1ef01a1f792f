#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "percodiff/errors.hpp"
#include "percodiff/obstacle_index.hpp"
#include "percodiff/rng.hpp"
#include "percodiff/wos.hpp"

using namespace percodiff;

namespace {

double brute_force_distance(const std::vector<Ball>& balls, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : balls) best = std::min(best, distance(x, b.center()) - b.radius());
  return best;
}

// Harmonic in the annulus a < |x| < 1, equal to 0 on |x| = a and 1 on |x| = 1.
double annulus_escape(double a, double s, int d) {
  return (std::pow(a, 2 - d) - std::pow(s, 2 - d)) / (std::pow(a, 2 - d) - 1.0);
}

}  // namespace

TEST(ObstacleIndex, EmptyIndexReportsInfinity) {
  const ObstacleIndex index(3, {});
  EXPECT_TRUE(std::isinf(index.distance(Point{0, 0, 0})));
  EXPECT_EQ(index.nearest(Point{0, 0, 0}).ball, -1);
}

TEST(ObstacleIndex, CollinearDistance) {
  const ObstacleIndex index(3, {Ball(Point{0.5, 0, 0}, 0.05)});
  EXPECT_DOUBLE_EQ(index.distance(Point{0, 0, 0}), 0.45);
  EXPECT_LT(index.distance(Point{0.5, 0, 0}), 0.0);
}

TEST(ObstacleIndex, AgreesWithBruteForce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto rng = make_engine(seed);
    std::vector<Ball> balls;
    std::uniform_real_distribution<double> radius(0.001, 0.05);
    for (int k = 0; k < 500; ++k) balls.emplace_back(random_in_ball(rng, 3, 1.0), radius(rng));
    const ObstacleIndex index(3, balls);
    for (int q = 0; q < 10000; ++q) {
      const Point x = random_in_ball(rng, 3, 1.0);
      const auto near = index.nearest(x);
      ASSERT_NEAR(near.distance, brute_force_distance(balls, x), 1e-12);
      ASSERT_NEAR(distance(x, balls[static_cast<std::size_t>(near.ball)].center()) -
                      balls[static_cast<std::size_t>(near.ball)].radius(),
                  near.distance, 1e-12);
    }
  }
}

TEST(ObstacleIndex, RangeQueryMatchesBruteForce) {
  auto rng = make_engine(11);
  std::vector<Ball> balls;
  for (int k = 0; k < 300; ++k) balls.emplace_back(random_in_ball(rng, 4, 1.0), 0.02);
  const ObstacleIndex index(4, balls);
  for (int q = 0; q < 200; ++q) {
    const Point x = random_in_ball(rng, 4, 1.0);
    std::vector<std::size_t> got;
    index.for_each_within(x, 0.2, [&](std::size_t i) { got.push_back(i); });
    std::sort(got.begin(), got.end());
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < balls.size(); ++i) {
      if (distance(x, balls[i].center()) - balls[i].radius() < 0.2) want.push_back(i);
    }
    ASSERT_EQ(got, want);
  }
}

TEST(WalkOnSpheres, JumpDirectionsAreIsotropic) {
  auto rng = make_engine(derive_seed(3, Stream::path, {0}));
  const int n = 1'000'000;
  Point sum(3);
  for (int i = 0; i < n; ++i) sum += random_direction(rng, 3);
  EXPECT_LT((sum * (1.0 / n)).norm(), 4.0 / std::sqrt(n));
}

TEST(WalkOnSpheres, NoObstaclesAlwaysEscape) {
  const ObstacleIndex index(3, {});
  const auto e = escape_probability(index, Point{0.3, 0.2, 0}, {}, 2000, 1);
  EXPECT_EQ(e.probability, 1.0);
  EXPECT_EQ(e.escaped, 2000);
}

TEST(WalkOnSpheres, AnnulusClosedForm) {
  const ObstacleIndex index(3, {Ball(Point{0, 0, 0}, 0.2)});
  const auto e = escape_probability(index, Point{0.5, 0, 0}, {}, 100000, 2024);
  const double p = annulus_escape(0.2, 0.5, 3);
  EXPECT_DOUBLE_EQ(p, 0.75);
  EXPECT_NEAR(e.probability, p, 3.0 * std::sqrt(p * (1 - p) / 100000));
  EXPECT_LT(e.censored, 100);
}

TEST(WalkOnSpheres, AnnulusInFourDimensions) {
  const ObstacleIndex index(4, {Ball(Point{0, 0, 0, 0}, 0.3)});
  const auto e = escape_probability(index, Point{0, 0.6, 0, 0}, {}, 20000, 5);
  const double p = annulus_escape(0.3, 0.6, 4);
  EXPECT_NEAR(e.probability, p, 3.0 * std::sqrt(p * (1 - p) / 20000));
}

TEST(WalkOnSpheres, StartInsideObstacleIsRejected) {
  const ObstacleIndex index(3, {Ball(Point{0, 0, 0}, 0.2)});
  EXPECT_THROW(escape_probability(index, Point{0.1, 0, 0}, {}, 10, 1), InvalidStart);
  EXPECT_THROW(escape_probability(index, Point{1.5, 0, 0}, {}, 10, 1), InvalidStart);
}

TEST(WalkOnSpheres, IndependentOfThreadCount) {
  const ObstacleIndex index(3, {Ball(Point{0, 0, 0}, 0.2), Ball(Point{0.5, 0.3, 0}, 0.1)});
  const auto a = escape_probability(index, Point{-0.4, 0, 0}, {}, 3000, 77, 1);
  const auto b = escape_probability(index, Point{-0.4, 0, 0}, {}, 3000, 77, 4);
  EXPECT_EQ(a.escaped, b.escaped);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.probability, b.probability);
}

TEST(WalkOnSpheres, CensoringIsCounted) {
  const ObstacleIndex index(3, {Ball(Point{0, 0, 0}, 0.2)});
  WalkSettings s;
  s.max_steps = 2;
  const auto e = escape_probability(index, Point{0.5, 0, 0}, s, 1000, 3);
  EXPECT_GT(e.censored, 0);
  EXPECT_EQ(e.escaped + e.absorbed, e.paths);
  EXPECT_LE(e.censored, e.absorbed);
}

TEST(Probe, EmptyProcessEscapesSurely) {
  const auto rungs = avoidability_probe(RadiusProfile::power_law(0.1, 1), IntensityProfile::zero(), 3,
                                        std::vector<double>{0.1, 0.01, 0.001}, Point(3), 200, 3, 1);
  ASSERT_EQ(rungs.size(), 3u);
  for (const auto& r : rungs) {
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.fraction_positive, 1.0);
  }
}

TEST(Probe, ThreadCountDoesNotChangeResults) {
  const std::vector<double> ladder{0.1, 0.03, 0.01};
  const auto a = avoidability_probe(RadiusProfile::power_law(0.1, 1), IntensityProfile::power_law(1, 2), 3, ladder,
                                    Point(3), 300, 4, 5, {}, 1);
  const auto b = avoidability_probe(RadiusProfile::power_law(0.1, 1), IntensityProfile::power_law(1, 2), 3, ladder,
                                    Point(3), 300, 4, 5, {}, 3);
  std::ostringstream ca, cb;
  write_escape_csv(ca, a);
  write_escape_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().rfind("# schema=1\nepsilon,mean,stderr,min,max,fraction_positive,realizations,blocked,censored,paths\n", 0),
            0u);
}
