#include "percodiff/criteria.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "percodiff/capacity.hpp"
#include "percodiff/errors.hpp"
#include "percodiff/obstacle_index.hpp"
#include "percodiff/parallel.hpp"
#include "percodiff/point_process.hpp"
#include "percodiff/quadrature.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::converges:
      return "converges";
    case Verdict::diverges:
      return "diverges";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<double> default_ladder() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

std::vector<double> default_exterior_ladder() {
  return {10.0, std::pow(10.0, 1.5), 100.0, std::pow(10.0, 2.5), 1000.0};
}

std::string TailModel::name() const {
  switch (kind) {
    case Kind::constant:
      return "constant";
    case Kind::geometric:
      return "geometric";
    case Kind::logarithmic:
      return "logarithmic";
    case Kind::power:
      return "power";
  }
  return "constant";
}

std::string TailModel::params() const {
  return fmt::format("slope={};ratio={};tail={};log_rate={}", slope, ratio, tail, log_rate);
}

Classification classify(std::span<const LadderEntry> ladder) {
  const std::size_t n = ladder.size();
  if (n < 4) throw InvalidInput("classification needs at least 4 rungs");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(ladder[i + 1].epsilon < ladder[i].epsilon && ladder[i + 1].epsilon > 0.0)) {
      throw InvalidInput("ladder truncations must be positive and strictly decreasing");
    }
    const double tol = 1e-12 * std::max(std::abs(ladder[i].value), std::abs(ladder[i + 1].value));
    if (ladder[i + 1].value < ladder[i].value - tol) {
      throw InvalidInput("ladder values decrease; terms must be nonnegative");
    }
  }
  const double last = ladder.back().value;
  const double scale = std::max(std::abs(last), std::numeric_limits<double>::min());

  Classification out;
  std::vector<double> level(n - 1);
  std::vector<double> log_g(n - 1);
  std::vector<double> step(n - 1);
  bool flat = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double delta = std::max(ladder[i + 1].value - ladder[i].value, 0.0);
    flat = flat && delta <= 1e-14 * scale;
    const double lo = std::log(1.0 / ladder[i].epsilon);
    const double hi = std::log(1.0 / ladder[i + 1].epsilon);
    step[i] = hi - lo;
    level[i] = 0.5 * (lo + hi);
    log_g[i] = std::log(std::max(delta, 1e-15 * scale) / step[i]);
  }
  if (flat) {
    out.verdict = Verdict::converges;
    out.model.kind = TailModel::Kind::constant;
    return out;
  }

  const double m = static_cast<double>(n - 1);
  const double mean_l = std::accumulate(level.begin(), level.end(), 0.0) / m;
  const double mean_g = std::accumulate(log_g.begin(), log_g.end(), 0.0) / m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sxy += (level[i] - mean_l) * (log_g[i] - mean_g);
    sxx += (level[i] - mean_l) * (level[i] - mean_l);
  }
  const double slope = sxy / sxx;
  const double mean_step = std::accumulate(step.begin(), step.end(), 0.0) / m;
  const double g_last = std::exp(log_g.back());
  const double l_end = std::log(1.0 / ladder.back().epsilon);

  TailModel& model = out.model;
  model.slope = slope;
  model.ratio = std::exp(slope * mean_step);
  model.log_rate = g_last / scale;
  if (model.ratio < 0.9) {
    model.kind = TailModel::Kind::geometric;
    // Remaining increments: integral of g_last * exp(slope (L - L_last)) beyond the last rung.
    model.tail = g_last * std::exp(slope * (l_end - level.back())) / -slope;
    out.verdict = model.tail < 0.05 * scale ? Verdict::converges : Verdict::inconclusive;
  } else if (slope > 0.05) {
    model.kind = TailModel::Kind::power;
    out.verdict = Verdict::diverges;
  } else {
    model.kind = TailModel::Kind::logarithmic;
    out.verdict = model.log_rate > 0.01 ? Verdict::diverges : Verdict::inconclusive;
  }
  return out;
}

namespace {

void check_ladder(std::span<const double> ladder, double upper) {
  if (ladder.empty()) throw InvalidParameter("truncation ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0 && ladder[i] < upper)) {
      throw InvalidParameter(fmt::format("ladder truncations must lie in (0, {})", upper));
    }
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw InvalidParameter("ladder must be strictly decreasing");
  }
}

void finish(CriterionReport& r) {
  if (r.ladder.size() >= 4) {
    const auto c = classify(r.ladder);
    r.verdict = c.verdict;
    r.model = c.model;
    return;
  }
  const bool flat = std::all_of(r.ladder.begin(), r.ladder.end(),
                                [&](const LadderEntry& e) { return e.value == r.ladder.front().value; });
  r.verdict = flat ? Verdict::converges : Verdict::inconclusive;
}

// Integral of g(u) over [eps_i, 1] for each rung, u = 1 - t, computed in s = ln u.
// When the ladder converges the remainder over (0, eps_last] is added as the limit.
CriterionReport boundary_integral(std::string name, const std::function<double(double)>& g,
                                  std::span<const double> ladder, double rel_tol = 1e-11) {
  check_ladder(ladder, 1.0);
  CriterionReport r;
  r.criterion = std::move(name);
  auto h = [&](double s) {
    const double u = std::exp(s);
    return g(u) * u;
  };
  double total = 0.0;
  double upper = 0.0;
  for (double eps : ladder) {
    total += integrate(h, std::log(eps), upper, rel_tol).value;
    upper = std::log(eps);
    r.ladder.push_back({eps, total});
  }
  finish(r);
  if (r.verdict == Verdict::converges) r.limit = total + integrate_to_zero(g, ladder.back(), std::max(rel_tol, 1e-12)).value;
  return r;
}

double checked_power(double base, int exponent) { return exponent == 0 ? 1.0 : std::pow(base, exponent); }

void require_exterior(const RadialFunction& f, const char* what) {
  if (f.family() != ProfileFamily::constant && f.family() != ProfileFamily::radial_power) {
    throw InvalidProfile(fmt::format("exterior {} must be a constant or radial-power profile", what));
  }
}

// Integral of h(r) over [1, R_i] for each rung (epsilon = 1/R), computed in s = ln r.
CriterionReport exterior_integral(std::string name, const std::function<double(double)>& h,
                                  std::span<const double> radii) {
  if (radii.empty()) throw InvalidParameter("radius ladder is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 1.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw InvalidParameter("exterior radii must exceed 1 and increase strictly");
    }
  }
  CriterionReport r;
  r.criterion = std::move(name);
  auto in_log = [&](double s) {
    const double x = std::exp(s);
    return h(x) * x;
  };
  double total = 0.0;
  double lower = 0.0;
  for (double radius : radii) {
    total += integrate(in_log, lower, std::log(radius)).value;
    lower = std::log(radius);
    r.ladder.push_back({1.0 / radius, total});
  }
  finish(r);
  if (r.verdict == Verdict::converges) {
    r.limit = total + integrate_to_zero([&](double v) { return h(1.0 / v) / (v * v); }, 1.0 / radii.back()).value;
  }
  return r;
}

struct IndexedBalls {
  std::span<const Ball> balls;
  ObstacleIndex index;
};

// Visits every Whitney cube (truncation eps) that meets a ball, with its capacity.
void visit_occupied_cubes(const IndexedBalls& set, double eps, double min_side,
                          const std::function<void(const WhitneyCube&, const CapacityEstimate&)>& fn) {
  if (set.index.empty()) return;
  const int d = set.index.dim();
  std::vector<Ball> local;
  visit_whitney_cubes(
      d, eps,
      [&](const Cube& q) {
        if (q.side < min_side) return false;
        return set.index.distance(q.center) <= 0.5 * q.diameter() * (1.0 + 1e-12);
      },
      [&](const WhitneyCube& w) {
        local.clear();
        set.index.for_each_within(w.center(), 0.5 * w.cube.diameter() * (1.0 + 1e-12), [&](std::size_t i) {
          if (w.cube.intersects(set.index.balls()[i])) local.push_back(set.index.balls()[i]);
        });
        if (local.empty()) return;
        fn(w, cube_capacity(local, w.cube));
      });
}

double wiener_weight(const WhitneyCube& w, const BoundaryPoint& tau, int d) {
  const double rho = dist_cube_to_point(w, tau);
  const double l = w.sidelength();
  return l * l / checked_power(rho, d);
}

// Partial sums for every rung from a single traversal at the smallest truncation:
// a cube kept at eps_min is kept at eps_i exactly when its nearest point to the
// origin lies inside |x| < 1 - eps_i.
std::vector<double> wiener_partial_sums(const IndexedBalls& set, const BoundaryPoint& tau,
                                        std::span<const double> ladder) {
  std::vector<double> sums(ladder.size(), 0.0);
  const int d = tau.dim();
  visit_occupied_cubes(set, ladder.back(), 0.0, [&](const WhitneyCube& w, const CapacityEstimate& cap) {
    const double term = wiener_weight(w, tau, d) * cap.value;
    const double inner = w.cube.min_norm();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (inner < 1.0 - ladder[i]) sums[i] += term;
    }
  });
  return sums;
}

IndexedBalls make_index(std::span<const Ball> balls, int d) {
  return {balls, ObstacleIndex(d, std::vector<Ball>(balls.begin(), balls.end()))};
}

void check_ball_dimension(std::span<const Ball> balls, int d) {
  for (const auto& b : balls) {
    if (b.dim() != d) throw InvalidInput("ball dimension does not match");
  }
}

}  // namespace

CriterionReport wiener_series(std::span<const Ball> balls, const BoundaryPoint& tau, std::span<const double> ladder) {
  check_ladder(ladder, 0.5);
  const int d = tau.dim();
  check_dimension(d);
  check_ball_dimension(balls, d);
  const auto set = make_index(balls, d);
  const auto sums = wiener_partial_sums(set, tau, ladder);
  CriterionReport r;
  r.criterion = "wiener";
  for (std::size_t i = 0; i < ladder.size(); ++i) r.ladder.push_back({ladder[i], sums[i]});
  finish(r);
  return r;
}

std::vector<WienerTerm> wiener_terms(std::span<const Ball> balls, const BoundaryPoint& tau, double eps) {
  const int d = tau.dim();
  check_dimension(d);
  check_ball_dimension(balls, d);
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidParameter("Whitney truncation must lie in (0, 1/2)");
  const auto set = make_index(balls, d);
  std::vector<WienerTerm> terms;
  visit_occupied_cubes(set, eps, 0.0, [&](const WhitneyCube& w, const CapacityEstimate& cap) {
    terms.push_back({w, cap.value, wiener_weight(w, tau, d) * cap.value});
  });
  return terms;
}

CriterionReport wiener_series_infinity(std::span<const Ball> balls, int j_max) {
  if (j_max < 1) throw InvalidParameter("j_max must be at least 1");
  int d = 3;
  if (!balls.empty()) {
    d = balls.front().dim();
    check_ball_dimension(balls, d);
  }
  for (const auto& b : balls) {
    if (b.center().norm() - b.radius() <= 1.0) throw InvalidInput("obstacle meets the closed unit ball");
  }
  CriterionReport r;
  r.criterion = "wiener-infinity";
  std::vector<double> shell_sum(static_cast<std::size_t>(j_max), 0.0);
  if (!balls.empty()) {
    for (const auto& q : exterior_cubes(d, j_max)) {
      const auto cap = cube_capacity(balls, q.cube);
      shell_sum[static_cast<std::size_t>(q.shell - 1)] += cap.value / checked_power(q.sidelength(), d - 2);
    }
  }
  double total = 0.0;
  for (int j = 1; j <= j_max; ++j) {
    total += shell_sum[static_cast<std::size_t>(j - 1)];
    r.ladder.push_back({std::pow(3.0, -j), total});
  }
  finish(r);
  return r;
}

CriterionReport balayage(const RadiusProfile& phi, const IntensityProfile& nu, const BoundaryPoint& tau,
                         std::span<const double> ladder, int d) {
  check_dimension(d);
  if (tau.dim() != d) throw InvalidParameter("boundary point dimension does not match");
  const double sphere = unit_sphere_area(d - 1);
  // Profiles are radial, so the integrand depends on x only through |x| and the
  // angle theta between x and tau; |x - tau|^2 = u^2 + 4 t sin^2(theta/2).
  auto g = [&](double u) {
    // Below this the kernel's peak (about u^{2-d}) and the mass overflow for d up to 8;
    // the layer's share of a convergent integral is far below the tolerance.
    if (u < 1e-40) return 0.0;
    const double mass = checked_power(phi.at_boundary_distance(u), d - 2) * nu.at_boundary_distance(u);
    if (mass == 0.0) return 0.0;
    const double t = 1.0 - u;
    const double one_minus_t2 = u * (2.0 - u);
    auto angular = [&](double theta) {
      const double s = std::sin(0.5 * theta);
      const double dist2 = u * u + 4.0 * t * s * s;
      const double q = one_minus_t2 / dist2;
      return checked_power(std::sin(theta), d - 2) * q * q * std::pow(dist2, 0.5 * (4 - d));
    };
    const double kernel = sphere * integrate_graded(angular, 0.0, std::numbers::pi, 0.0, 1e-9, 1e-3 * u).value;
    if (!std::isfinite(kernel)) throw NumericalFailure("balayage kernel is not integrable");
    return checked_power(t, d - 1) * kernel * mass;
  };
  // The nested quadrature carries the inner tolerance as noise; the outer one must not chase it.
  return boundary_integral("balayage", g, ladder, 1e-7);
}

CriterionReport radial_criterion(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                 std::span<const double> ladder) {
  check_dimension(d);
  return boundary_integral(
      "radial",
      [&](double u) { return u * checked_power(phi.at_boundary_distance(u), d - 2) * nu.at_boundary_distance(u); },
      ladder);
}

CriterionReport lundh_criterion(const IntensityProfile& nu, int d, std::span<const double> ladder) {
  check_dimension(d);
  return boundary_integral(
      "lundh", [&](double u) { return checked_power(u, d - 1) * nu.at_boundary_distance(u); }, ladder);
}

CriterionReport deterministic_criterion(const RadiusProfile& phi, int d, std::span<const double> ladder) {
  if (d == 2) throw Unsupported("the planar deterministic criterion is not implemented");
  check_dimension(d);
  return boundary_integral(
      "deterministic",
      [&](double u) { return checked_power(phi.at_boundary_distance(u), d - 2) / checked_power(u, d - 1); }, ladder);
}

double expected_obstacle_count(const IntensityProfile& nu, double eps, int d) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidParameter("truncation must lie in [0, 1)");
  const auto mu = mean_measure(nu, 0.0, 1.0 - eps, d);
  return mu.divergent ? std::numeric_limits<double>::infinity() : mu.value;
}

CriterionReport expected_obstacle_count(const IntensityProfile& nu, int d, std::span<const double> ladder) {
  check_ladder(ladder, 1.0);
  CriterionReport r;
  r.criterion = "expected-count";
  for (double eps : ladder) r.ladder.push_back({eps, expected_obstacle_count(nu, eps, d)});
  finish(r);
  if (r.verdict == Verdict::converges) r.limit = expected_obstacle_count(nu, 0.0, d);
  return r;
}

CriterionReport exterior_criterion(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                   std::span<const double> radii) {
  check_dimension(d);
  require_exterior(phi.function(), "radius");
  require_exterior(nu.function(), "intensity");
  const double area = unit_sphere_area(d);
  return exterior_integral(
      "exterior",
      [&](double r) { return area * checked_power(r, d - 1) * checked_power(phi(r) / r, d - 2) * nu(r); }, radii);
}

CriterionReport exterior_deterministic_criterion(const RadiusProfile& phi, int d, std::span<const double> radii) {
  check_dimension(d);
  require_exterior(phi.function(), "radius");
  return exterior_integral(
      "exterior-deterministic", [&](double r) { return r * checked_power(phi(r), d - 2); }, radii);
}

std::vector<RungStatistics> expected_wiener(const RadiusProfile& phi, const IntensityProfile& nu,
                                            const BoundaryPoint& tau, std::span<const double> ladder, int d,
                                            int n_realizations, std::uint64_t seed, int threads) {
  check_ladder(ladder, 0.5);
  if (n_realizations < 1) throw InvalidParameter("need at least one realization");
  const auto n = static_cast<std::size_t>(n_realizations);
  std::vector<std::vector<double>> sums(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const auto real = sample_realization(nu, phi, ladder.back(), derive_seed(seed, Stream::wiener_realization, {k}), d);
    const auto balls = build_archipelago(real);
    sums[k] = wiener_partial_sums(make_index(balls, d), tau, ladder);
  });
  std::vector<RungStatistics> out;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double mean = 0.0;
    for (const auto& s : sums) mean += s[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& s : sums) var += (s[i] - mean) * (s[i] - mean);
    const double se = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    out.push_back({ladder[i], mean, se});
  }
  return out;
}

CapacityDensityRatio capacity_density_ratio(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                            double sidelength, double eps, int n_realizations, std::uint64_t seed,
                                            int threads) {
  check_dimension(d);
  if (n_realizations < 2) throw InvalidParameter("need at least two realizations");
  const double target = sidelength * (1.0 - 1e-9);
  auto same_size = [&](const WhitneyCube& w) { return std::abs(w.sidelength() - sidelength) <= 1e-9 * sidelength; };

  CapacityDensityRatio out;
  out.sidelength = sidelength;
  double mass = 0.0;
  visit_whitney_cubes(
      d, eps, [&](const Cube& q) { return q.side >= target; },
      [&](const WhitneyCube& w) {
        if (!same_size(w)) return;
        ++out.cubes;
        mass += checked_power(phi.at(w.center()), d - 2) * cube_mean_measure(nu, w.cube);
      });
  if (out.cubes == 0 || !(mass > 0.0)) throw InvalidParameter("no Whitney cubes carry mass at that sidelength");

  const auto n = static_cast<std::size_t>(n_realizations);
  std::vector<double> ratios(n, 0.0);
  parallel_for(n, threads, [&](std::size_t k) {
    const auto real = sample_realization(nu, phi, eps, derive_seed(seed, Stream::lemma3, {k}), d);
    const auto balls = build_archipelago(real);
    double cap = 0.0;
    visit_occupied_cubes(make_index(balls, d), eps, target, [&](const WhitneyCube& w, const CapacityEstimate& c) {
      if (same_size(w)) cap += c.value;
    });
    ratios[k] = cap / mass;
  });
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double x : ratios) var += (x - mean) * (x - mean);
  out.ratio = mean;
  out.std_error = std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

void write_criteria_csv(std::ostream& out, std::span<const CriterionReport> reports) {
  out << "# schema=1\n";
  out << "criterion,epsilon,value,verdict,model,params\n";
  for (const auto& r : reports) {
    for (const auto& e : r.ladder) {
      out << fmt::format("{},{},{},{},{},{}\n", r.criterion, e.epsilon, e.value, to_string(r.verdict),
                         r.model.name(), r.model.params());
    }
    if (r.limit) {
      out << fmt::format("{},0,{},{},limit,\n", r.criterion, *r.limit, to_string(r.verdict));
    }
  }
}

}  // namespace percodiff
