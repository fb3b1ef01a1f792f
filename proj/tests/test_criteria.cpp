#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "percodiff/capacity.hpp"
#include "percodiff/criteria.hpp"
#include "percodiff/errors.hpp"
#include "percodiff/quadrature.hpp"

using namespace percodiff;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<LadderEntry> entries(const std::vector<double>& values) {
  const double eps[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<LadderEntry> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({eps[i], values[i]});
  return out;
}

void expect_nondecreasing(const CriterionReport& r) {
  for (std::size_t i = 1; i < r.ladder.size(); ++i) {
    EXPECT_GE(r.ladder[i].value, r.ladder[i - 1].value) << r.criterion << " rung " << i;
  }
}

// |S^{d-1}| int_0^{1-eps} t^{d-1} (1 - t^2) phi^{d-2} nu dt: balayage after the
// Poisson kernel of the sphere of radius t is integrated out.
double factorized_balayage(const RadiusProfile& phi, const IntensityProfile& nu, int d, double eps) {
  auto f = [&](double u) {
    const double t = 1.0 - u;
    return std::pow(t, d - 1) * u * (2.0 - u) * std::pow(phi.at_boundary_distance(u), d - 2) *
           nu.at_boundary_distance(u);
  };
  // Integrate in s = ln u, where power-law profiles become smooth exponentials.
  auto g = [&](double s) { return f(std::exp(s)) * std::exp(s); };
  return unit_sphere_area(d) *
         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, std::log(eps), 0.0, 15, 1e-12);
}

}  // namespace

TEST(Classify, GeometricTailConverges) {
  EXPECT_EQ(classify(entries({1.0, 1.1, 1.11, 1.111})).verdict, Verdict::converges);
}

TEST(Classify, LogarithmicGrowthDiverges) {
  EXPECT_EQ(classify(entries({1, 2, 3, 4})).verdict, Verdict::diverges);
}

TEST(Classify, AmbiguousTailIsInconclusive) {
  EXPECT_EQ(classify(entries({1, 1.5, 1.9, 2.2})).verdict, Verdict::inconclusive);
}

TEST(Classify, PowerGrowthAndFlatLadders) {
  EXPECT_EQ(classify(entries({1, 10, 100, 1000})).verdict, Verdict::diverges);
  const auto flat = classify(entries({0.5, 0.5, 0.5, 0.5}));
  EXPECT_EQ(flat.verdict, Verdict::converges);
  EXPECT_EQ(flat.model.kind, TailModel::Kind::constant);
}

TEST(Classify, MalformedLaddersAreRejected) {
  EXPECT_THROW(classify(entries({1, 2, 3})), InvalidInput);
  EXPECT_THROW(classify(entries({1, 2, 1.5, 3})), InvalidInput);
}

TEST(Radial, ClosedFormConvergentCase) {
  const auto r = radial_criterion(RadiusProfile::power_law(0.1, 1), IntensityProfile::power_law(1, 2), 3,
                                  default_ladder());
  EXPECT_EQ(r.verdict, Verdict::converges);
  ASSERT_TRUE(r.limit);
  EXPECT_NEAR(*r.limit / 0.1, 1.0, 1e-6);
  for (const auto& e : r.ladder) EXPECT_NEAR(e.value / (0.1 * (1.0 - e.epsilon)), 1.0, 1e-6);
}

TEST(Radial, LogarithmicCaseDiverges) {
  const auto r = radial_criterion(RadiusProfile::power_law(0.1, 1), IntensityProfile::power_law(1, 3), 3,
                                  default_ladder());
  EXPECT_EQ(r.verdict, Verdict::diverges);
  for (const auto& e : r.ladder) EXPECT_NEAR(e.value / (0.1 * std::log(1.0 / e.epsilon)), 1.0, 1e-6);
  expect_nondecreasing(r);
}

TEST(Radial, ZeroProfileIsZero) {
  const auto r = radial_criterion(RadiusProfile::zero(), IntensityProfile::power_law(1, 3), 3, default_ladder());
  EXPECT_EQ(r.verdict, Verdict::converges);
  EXPECT_EQ(r.last(), 0.0);
}

TEST(Lundh, CriticalIntensityIntegratesToOne) {
  const auto r = lundh_criterion(IntensityProfile::power_law(1, 2), 3, default_ladder());
  EXPECT_EQ(r.verdict, Verdict::converges);
  ASSERT_TRUE(r.limit);
  EXPECT_NEAR(*r.limit, 1.0, 1e-6);
}

TEST(Lundh, SupercriticalIntensityDiverges) {
  EXPECT_EQ(lundh_criterion(IntensityProfile::power_law(1, 3), 3, default_ladder()).verdict, Verdict::diverges);
}

TEST(Lundh, ConstantIntensity) {
  const auto r = lundh_criterion(IntensityProfile::constant(1), 3, default_ladder());
  ASSERT_TRUE(r.limit);
  EXPECT_NEAR(*r.limit, 1.0 / 3.0, 1e-6);
}

TEST(Lundh, AgreesWithRadialForLinearRadius) {
  for (double beta : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const auto nu = IntensityProfile::power_law(1, beta);
    const auto lundh = lundh_criterion(nu, 3, default_ladder()).verdict;
    for (double c : {0.1, 0.5}) {
      EXPECT_EQ(radial_criterion(RadiusProfile::power_law(c, 1), nu, 3, default_ladder()).verdict, lundh)
          << "beta=" << beta << " c=" << c;
    }
  }
}

TEST(ExpectedCount, InverseSquareClosedForm) {
  const auto nu = IntensityProfile::power_law(1, 2);
  for (double eps : default_ladder()) {
    const double exact = 4.0 * kPi * (1.0 / eps + 2.0 * std::log(eps) - eps);
    EXPECT_NEAR(expected_obstacle_count(nu, eps, 3) / exact, 1.0, 1e-6) << eps;
  }
  EXPECT_EQ(expected_obstacle_count(nu, 3, default_ladder()).verdict, Verdict::diverges);
  EXPECT_TRUE(std::isinf(expected_obstacle_count(nu, 0.0, 3)));
}

TEST(ExpectedCount, UnitIntensityIsBallVolume) {
  EXPECT_NEAR(expected_obstacle_count(IntensityProfile::constant(1), 0.0, 3), 4.0 * kPi / 3.0, 1e-12);
  EXPECT_GE(expected_obstacle_count(IntensityProfile::constant(1), 0.1, 3),
            expected_obstacle_count(IntensityProfile::constant(1), 0.2, 3));
}

TEST(Deterministic, ClosedForms) {
  const auto conv = deterministic_criterion(RadiusProfile::power_law(1, 2.5), 3, default_ladder());
  EXPECT_EQ(conv.verdict, Verdict::converges);
  ASSERT_TRUE(conv.limit);
  EXPECT_NEAR(*conv.limit / (2.0 / 3.0), 1.0, 1e-6);
  const auto div = deterministic_criterion(RadiusProfile::power_law(0.1, 1), 3, default_ladder());
  EXPECT_EQ(div.verdict, Verdict::diverges);
  EXPECT_EQ(deterministic_criterion(RadiusProfile::zero(), 3, default_ladder()).last(), 0.0);
  EXPECT_THROW(deterministic_criterion(RadiusProfile::zero(), 2, default_ladder()), Unsupported);
}

TEST(Exterior, ClosedForms) {
  const auto conv = exterior_criterion(RadiusProfile::radial_power(1, -3), IntensityProfile::constant(2), 3,
                                       default_exterior_ladder());
  EXPECT_EQ(conv.verdict, Verdict::converges);
  ASSERT_TRUE(conv.limit);
  EXPECT_NEAR(*conv.limit / (8.0 * kPi), 1.0, 1e-6);
  for (const auto& e : conv.ladder) EXPECT_NEAR(e.value / (8.0 * kPi * (1.0 - e.epsilon)), 1.0, 1e-6);
  const auto div = exterior_criterion(RadiusProfile::radial_power(1, -2), IntensityProfile::constant(2), 3,
                                      default_exterior_ladder());
  EXPECT_EQ(div.verdict, Verdict::diverges);
  const auto zero = exterior_criterion(RadiusProfile::zero(), IntensityProfile::constant(2), 3,
                                       default_exterior_ladder());
  EXPECT_EQ(zero.last(), 0.0);
  EXPECT_THROW(exterior_criterion(RadiusProfile::power_law(0.1, 1), IntensityProfile::constant(1), 3,
                                  default_exterior_ladder()),
               InvalidProfile);
}

TEST(Exterior, DeterministicVariant) {
  const auto conv = exterior_deterministic_criterion(RadiusProfile::radial_power(1, -3), 3, default_exterior_ladder());
  ASSERT_TRUE(conv.limit);
  EXPECT_NEAR(*conv.limit, 1.0, 1e-6);
  EXPECT_EQ(exterior_deterministic_criterion(RadiusProfile::radial_power(1, -2), 3, default_exterior_ladder()).verdict,
            Verdict::diverges);
}

TEST(WienerSeries, EmptyArchipelago) {
  const auto r = wiener_series({}, BoundaryPoint(Point{1, 0, 0}), default_ladder());
  EXPECT_EQ(r.verdict, Verdict::converges);
  for (const auto& e : r.ladder) EXPECT_EQ(e.value, 0.0);
}

TEST(WienerSeries, SingleBallMatchesBruteForceEnumeration) {
  const std::vector<Ball> balls{Ball(Point{0.5, 0, 0}, 0.01)};
  const BoundaryPoint tau(Point{1, 0, 0});
  const std::vector<double> ladder{1e-1, 3e-2, 1e-2, 3e-3};
  const auto r = wiener_series(balls, tau, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double expected = 0.0;
    const auto meets = [&](const Cube& c) { return c.intersects(balls[0]); };
    visit_whitney_cubes(3, ladder[i], meets, [&](const WhitneyCube& q) {
      if (!meets(q.cube)) return;
      // Clipped radius: distance from the centre to the boundary of the cube dilated by one side.
      double room = 1e300;
      for (int k = 0; k < 3; ++k) {
        room = std::min(room, 1.5 * q.sidelength() - std::abs(balls[0].center()[k] - q.center()[k]));
      }
      const double cap = std::min(0.01, room);
      const double rho = dist_cube_to_point(q, tau);
      expected += q.sidelength() * q.sidelength() * cap / (rho * rho * rho);
    });
    EXPECT_NEAR(r.ladder[i].value, expected, 1e-14 * expected) << ladder[i];
    EXPECT_GT(expected, 0.0);
  }
}

TEST(WienerSeries, PartialSumsAreNondecreasing) {
  std::vector<Ball> balls;
  for (int k = 0; k < 40; ++k) {
    const double t = 1.0 - std::pow(0.8, k + 1);
    const double a = 0.7 * k;
    balls.emplace_back(Point{t * std::cos(a), t * std::sin(a), 0.0}, 0.1 * (1.0 - t));
  }
  const auto r = wiener_series(balls, BoundaryPoint(Point{1, 0, 0}), default_ladder());
  expect_nondecreasing(r);
}

TEST(WienerSeriesInfinity, SingleExteriorBall) {
  const std::vector<Ball> balls{Ball(Point{2, 0, 0}, 0.5)};
  const auto r = wiener_series_infinity(balls, 2);
  ASSERT_EQ(r.ladder.size(), 2u);
  // Shell 1: the side-1 cube centred (1, 0, 0) meets the ball, clipped to 0.5.
  EXPECT_DOUBLE_EQ(r.ladder[0].value, 0.5);
  // Shell 2: the side-3 cube centred (3, 0, 0) adds 0.5 / 3.
  EXPECT_DOUBLE_EQ(r.ladder[1].value, 0.5 + 0.5 / 3.0);
  EXPECT_DOUBLE_EQ(r.ladder[1].epsilon, 1.0 / 9.0);
}

TEST(WienerSeriesInfinity, MoreShellsWithoutObstaclesChangeNothing) {
  const std::vector<Ball> balls{Ball(Point{2, 0, 0}, 0.5), Ball(Point{0, -4, 1}, 0.2)};
  const auto a = wiener_series_infinity(balls, 3);
  const auto b = wiener_series_infinity(balls, 6);
  EXPECT_DOUBLE_EQ(a.last(), b.last());
  EXPECT_EQ(wiener_series_infinity({}, 4).last(), 0.0);
  const std::vector<Ball> touching{Ball(Point{1.2, 0, 0}, 0.5)};
  EXPECT_THROW(wiener_series_infinity(touching, 2), InvalidInput);
}

TEST(Balayage, ZeroRadiusGivesZero) {
  const auto r = balayage(RadiusProfile::zero(), IntensityProfile::power_law(1, 2), BoundaryPoint(Point{1, 0, 0}),
                          default_ladder(), 3);
  EXPECT_EQ(r.last(), 0.0);
}

TEST(Balayage, RotationInvariantForRadialProfiles) {
  const auto phi = RadiusProfile::power_law(0.1, 1);
  const auto nu = IntensityProfile::power_law(1, 2);
  const auto a = balayage(phi, nu, BoundaryPoint(Point{1, 0, 0}), default_ladder(), 3);
  const auto b = balayage(phi, nu, BoundaryPoint(Point{0, 1, 0}), default_ladder(), 3);
  const auto c = balayage(phi, nu, BoundaryPoint::from_direction(Point{1, -2, 2}), default_ladder(), 3);
  for (std::size_t i = 0; i < a.ladder.size(); ++i) {
    EXPECT_NEAR(b.ladder[i].value / a.ladder[i].value, 1.0, 1e-9);
    EXPECT_NEAR(c.ladder[i].value / a.ladder[i].value, 1.0, 1e-9);
  }
}

TEST(Balayage, MatchesPoissonKernelFactorization) {
  for (int d : {3, 4}) {
    const auto phi = RadiusProfile::power_law(0.1, 1);
    const auto nu = IntensityProfile::power_law(1, d - 1);
    const auto r = balayage(phi, nu, BoundaryPoint(Point::axis(d, 0)), default_ladder(), d);
    for (const auto& e : r.ladder) {
      EXPECT_NEAR(e.value / factorized_balayage(phi, nu, d, e.epsilon), 1.0, 1e-6) << "d=" << d << " eps=" << e.epsilon;
    }
    if (d == 3) {
      ASSERT_TRUE(r.limit);
      EXPECT_NEAR(*r.limit / (7.0 * kPi / 30.0), 1.0, 1e-6);
    }
  }
}

TEST(Balayage, VerdictFollowsRadialCriterion) {
  const auto phi = RadiusProfile::power_law(0.1, 1);
  for (double beta : {1.5, 2.0, 3.0}) {
    const auto nu = IntensityProfile::power_law(1, beta);
    EXPECT_EQ(balayage(phi, nu, BoundaryPoint(Point{0, 0, 1}), default_ladder(), 3).verdict,
              radial_criterion(phi, nu, 3, default_ladder()).verdict)
        << beta;
  }
}

TEST(ExpectedWiener, EmptyProcessIsZero) {
  const auto w = expected_wiener(RadiusProfile::power_law(0.1, 1), IntensityProfile::zero(),
                                 BoundaryPoint(Point{1, 0, 0}), default_ladder(), 3, 5, 1);
  for (const auto& s : w) {
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.std_error, 0.0);
  }
}

TEST(ExpectedWiener, StandardErrorShrinksLikeRootN) {
  const auto phi = RadiusProfile::power_law(0.1, 1);
  const auto nu = IntensityProfile::power_law(1, 2);
  const BoundaryPoint tau(Point{1, 0, 0});
  const std::vector<double> ladder{0.2, 0.1, 0.07, 0.05};
  double ratio = 0.0;
  const int trials = 6;
  for (int s = 0; s < trials; ++s) {
    const auto small = expected_wiener(phi, nu, tau, ladder, 3, 60, 100 + s);
    const auto large = expected_wiener(phi, nu, tau, ladder, 3, 120, 200 + s);
    ratio += large.back().std_error / small.back().std_error / trials;
  }
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(ExpectedWiener, IndependentOfThreadCount) {
  const auto phi = RadiusProfile::power_law(0.1, 1);
  const auto nu = IntensityProfile::power_law(1, 2);
  const BoundaryPoint tau(Point{1, 0, 0});
  const std::vector<double> ladder{0.2, 0.1, 0.07, 0.05};
  const auto a = expected_wiener(phi, nu, tau, ladder, 3, 12, 9, 1);
  const auto b = expected_wiener(phi, nu, tau, ladder, 3, 12, 9, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].std_error, b[i].std_error);
  }
}

TEST(CriteriaCsv, SchemaAndLimitRow) {
  const auto r = lundh_criterion(IntensityProfile::power_law(1, 2), 3, default_ladder());
  std::ostringstream out;
  write_criteria_csv(out, std::vector<CriterionReport>{r});
  const auto text = out.str();
  EXPECT_EQ(text.rfind("# schema=1\ncriterion,epsilon,value,verdict,model,params\n", 0), 0u);
  EXPECT_NE(text.find("lundh,0.001,"), std::string::npos);
  EXPECT_NE(text.find("lundh,0,1,converges,limit,"), std::string::npos);
}

TEST(Quadrature, GradedRuleResolvesNearSingularKernel) {
  // Peak of width u at the origin; antiderivative -1 / sqrt(u^2 + x^2).
  const double u = 1e-8;
  const auto r = integrate_graded([&](double x) { return x / std::pow(u * u + x * x, 1.5); }, 0.0, 1.0, 0.0, 1e-10,
                                  1e-3 * u);
  const double exact = 1.0 / u - 1.0 / std::sqrt(u * u + 1.0);
  EXPECT_NEAR(r.value / exact, 1.0, 1e-9);
}

TEST(Quadrature, EndpointSingularityToZero) {
  const auto r = integrate_to_zero([](double u) { return std::pow(u, -0.5); }, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-10);
}
