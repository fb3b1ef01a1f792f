#include "percodiff/point_process.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "percodiff/errors.hpp"
#include "percodiff/quadrature.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

namespace {

double checked(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidProfile(fmt::format("{} is not evaluable on the validation grid (value {})", name, v));
  }
  return v;
}

double ratio_spread(double fx, double fy) {
  if (fx == 0.0 && fy == 0.0) return 1.0;
  if (fx == 0.0 || fy == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(fx / fy, fy / fx);
}

}  // namespace

std::string ProfileValidation::summary() const {
  return fmt::format("quasi-constancy C_phi={:.6g} C_nu={:.6g} [{}]; sup phi/(1-t)={:.6g} [{}]; "
                     "sup (1-t)^2 phi^(d-2) nu={:.6g} growth={:.3g} [{}]",
                     quasi_constancy_phi, quasi_constancy_nu, quasi_constancy_ok ? "ok" : "FAIL", boundary_ratio,
                     boundary_ratio_ok ? "ok" : "FAIL", mass_bound, mass_growth, mass_bound_ok ? "ok" : "FAIL");
}

ProfileValidation validate_profiles(const RadiusProfile& phi, const IntensityProfile& nu, int d) {
  check_dimension(d);
  ProfileValidation v;
  constexpr int kSteps = 192;  // u = 10^{-k/16}, down to 1e-12
  constexpr double kOffsets[] = {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0};
  auto mass = [&](double u) {
    return u * u * std::pow(checked(phi.at_boundary_distance(u), "phi"), d - 2) *
           checked(nu.at_boundary_distance(u), "nu");
  };
  for (int k = 0; k <= kSteps; ++k) {
    const double u = std::pow(10.0, -k / 16.0);
    const double fx = checked(phi.at_boundary_distance(u), "phi");
    const double nx = checked(nu.at_boundary_distance(u), "nu");
    for (double s : kOffsets) {
      // |y| ranges over (max(0, t - u/2), t + u/2) for y in B(x, u/2).
      const double uy = std::min(u - 0.5 * s * u, 1.0);
      v.quasi_constancy_phi = std::max(v.quasi_constancy_phi, ratio_spread(fx, checked(phi.at_boundary_distance(uy), "phi")));
      v.quasi_constancy_nu = std::max(v.quasi_constancy_nu, ratio_spread(nx, checked(nu.at_boundary_distance(uy), "nu")));
    }
    v.boundary_ratio = std::max(v.boundary_ratio, fx / u);
    v.mass_bound = std::max(v.mass_bound, mass(u));
  }
  v.quasi_constancy_ok = std::isfinite(v.quasi_constancy_phi) && std::isfinite(v.quasi_constancy_nu);
  v.boundary_ratio_ok = v.boundary_ratio < 1.0;
  const double inner = mass(1e-12);
  const double outer = mass(1e-10);
  if (inner > 0.0 && outer > 0.0) v.mass_growth = std::log(inner / outer) / std::log(100.0);
  else if (inner > 0.0) v.mass_growth = std::numeric_limits<double>::infinity();
  v.mass_bound_ok = std::isfinite(v.mass_bound) && v.mass_growth <= 1e-6;
  return v;
}

MeanMeasure mean_measure(const IntensityProfile& nu, double a, double b, int d) {
  check_dimension(d);
  if (!(a >= 0.0 && a < b && b <= 1.0)) throw InvalidParameter("mean_measure needs 0 <= a < b <= 1");
  if (nu.function().is_zero()) return {};
  const double area = unit_sphere_area(d);
  auto g = [&](double u) { return area * std::pow(1.0 - u, d - 1) * nu.at_boundary_distance(u); };
  if (b >= 1.0) {
    if (nu.function().family() != ProfileFamily::radial_power && nu.function().tail_exponent() <= -1.0) {
      return {std::numeric_limits<double>::infinity(), true};
    }
    return {integrate_to_zero(g, 1.0 - a).value, false};
  }
  return {integrate_graded(g, 1.0 - b, 1.0 - a, 0.0).value, false};
}

double cube_mean_measure(const IntensityProfile& nu, const Cube& q) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> nodes;
  std::vector<double> weights;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    nodes.push_back(xs[i]);
    weights.push_back(ws[i]);
    if (xs[i] != 0.0) {
      nodes.push_back(-xs[i]);
      weights.push_back(ws[i]);
    }
  }
  const int d = q.center.dim();
  const std::size_t n = nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  const double h = 0.5 * q.side;
  double sum = 0.0;
  while (true) {
    Point x = q.center;
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      x[i] += h * nodes[idx[static_cast<std::size_t>(i)]];
      w *= weights[idx[static_cast<std::size_t>(i)]];
    }
    sum += w * nu.at(x);
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return sum * std::pow(h, d);
}

Realization Realization::restricted(double eps) const {
  Realization out;
  out.dimension = dimension;
  out.epsilon = std::max(epsilon, eps);
  out.seed = seed;
  out.phi = phi;
  out.nu = nu;
  const double limit = 1.0 - eps;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].norm() < limit) {
      out.centers.push_back(centers[i]);
      out.radii.push_back(radii[i]);
    }
  }
  return out;
}

Realization sample_realization(const IntensityProfile& nu, const RadiusProfile& phi, double epsilon,
                               std::uint64_t seed, int d) {
  check_dimension(d);
  if (!(epsilon > 0.0)) {
    if (mean_measure(nu, 0.0, 1.0, d).divergent) {
      throw DivergenceError("mean measure of the ball is infinite; increase the truncation epsilon");
    }
    throw InvalidParameter("truncation epsilon must be positive");
  }
  if (!(epsilon < 1.0)) throw InvalidParameter("truncation epsilon must be below 1");
  const auto validation = validate_profiles(phi, nu, d);
  if (!validation.passed()) throw InvalidProfile("profile assumptions fail: " + validation.summary());

  Realization r;
  r.dimension = d;
  r.epsilon = epsilon;
  r.seed = seed;
  r.phi = phi.describe();
  r.nu = nu.describe();
  if (nu.function().is_zero()) return r;

  const double limit = 1.0 - epsilon;
  for (int j = 0;; ++j) {
    const double a = 1.0 - std::ldexp(1.0, -j);
    if (a >= limit) break;
    const double b = std::min(1.0 - std::ldexp(1.0, -j - 1), limit);
    const MeanMeasure mu = mean_measure(nu, a, b, d);
    if (mu.divergent || !std::isfinite(mu.value)) {
      throw DivergenceError("infinite mean measure inside the truncated ball; increase epsilon");
    }
    if (mu.value <= 0.0) continue;

    auto density = [&](double t) { return std::pow(t, d - 1) * nu(t); };
    double envelope = 0.0;
    constexpr int kGrid = 512;
    for (int k = 0; k <= kGrid; ++k) envelope = std::max(envelope, density(a + (b - a) * k / kGrid));
    envelope *= 1.25;

    Engine rng = make_engine(derive_seed(seed, Stream::annulus, {static_cast<std::uint64_t>(j)}));
    std::poisson_distribution<long long> count_dist(mu.value);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const long long count = count_dist(rng);
    for (long long n = 0; n < count; ++n) {
      while (true) {
        const double t = a + (b - a) * uniform(rng);
        const double g = density(t);
        if (g > envelope) throw NumericalFailure("rejection envelope violated; profile is not quasi-constant");
        if (uniform(rng) * envelope >= g) continue;
        const Point c = random_direction(rng, d) * t;
        if (c.norm() >= limit) continue;
        r.centers.push_back(c);
        r.radii.push_back(phi.at(c));
        break;
      }
    }
  }
  return r;
}

std::vector<Ball> build_archipelago(const Realization& r) {
  std::vector<Ball> balls;
  balls.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.radii[i] > 0.0) balls.emplace_back(r.centers[i], r.radii[i]);
  }
  return balls;
}

void write_realization(std::ostream& out, const Realization& r) {
  out << "# percodiff realization\n";
  out << fmt::format("dimension {}\n", r.dimension);
  out << fmt::format("epsilon {:.17g}\n", r.epsilon);
  out << fmt::format("seed {}\n", r.seed);
  out << "phi " << r.phi << '\n';
  out << "nu " << r.nu << '\n';
  out << fmt::format("count {}\n", r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::string line;
    for (int k = 0; k < r.dimension; ++k) line += fmt::format("{:.17g} ", r.centers[i][k]);
    line += fmt::format("{:.17g}\n", r.radii[i]);
    out << line;
  }
}

Realization read_realization(std::istream& in) {
  Realization r;
  std::string line;
  long long count = -1;
  while (count < 0 && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    const std::string rest = space == std::string::npos ? std::string() : line.substr(space + 1);
    try {
      if (key == "dimension") r.dimension = std::stoi(rest);
      else if (key == "epsilon") r.epsilon = std::stod(rest);
      else if (key == "seed") r.seed = std::stoull(rest);
      else if (key == "phi") r.phi = rest;
      else if (key == "nu") r.nu = rest;
      else if (key == "count") count = std::stoll(rest);
      else throw InvalidInput("unknown realization header key '" + key + "'");
    } catch (const std::logic_error&) {
      throw InvalidInput("malformed realization header line: " + line);
    }
  }
  if (count < 0) throw InvalidInput("realization header lacks a count");
  check_dimension(r.dimension);
  for (long long n = 0; n < count; ++n) {
    if (!std::getline(in, line)) throw InvalidInput("realization truncated before all obstacles were read");
    std::istringstream row(line);
    Point c(r.dimension);
    double radius = 0.0;
    for (int k = 0; k < r.dimension; ++k) row >> c[k];
    row >> radius;
    if (!row) throw InvalidInput("malformed obstacle line: " + line);
    r.centers.push_back(c);
    r.radii.push_back(radius);
  }
  return r;
}

}  // namespace percodiff
