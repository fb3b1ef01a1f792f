#include "percodiff/capacity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "percodiff/errors.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

const char* to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::exact:
      return "exact";
    case CapacityMethod::subadditive:
      return "subadditive";
    case CapacityMethod::aikawa_borichev:
      return "aikawa-borichev";
    case CapacityMethod::oracle:
      return "oracle";
    case CapacityMethod::none:
      return "none";
  }
  return "none";
}

double ball_capacity(double radius, int d) {
  check_dimension(d);
  if (!(radius > 0.0)) throw InvalidParameter("ball radius must be positive");
  return std::pow(radius, d - 2);
}

double capacity_upper(std::span<const Ball> balls) {
  double s = 0.0;
  for (const auto& b : balls) s += std::pow(b.radius(), b.dim() - 2);
  return s;
}

double ab_enlarged_radius(double r, int d) {
  return std::pow(unit_ball_volume(d), -1.0 / d) * std::pow(r, 1.0 - 2.0 / d);
}

namespace {

double max_ab_radius(int d) { return 1.0 / std::sqrt(unit_ball_volume(d) * std::ldexp(1.0, d)); }

// Smallest enclosing radius among a few candidate centres (any witness will do).
std::pair<Point, double> bounding_sphere(std::span<const Ball> balls) {
  const int d = balls.front().dim();
  Point lo = balls.front().center();
  Point hi = lo;
  Point centroid(d);
  for (const auto& b : balls) {
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], b.center()[i] - b.radius());
      hi[i] = std::max(hi[i], b.center()[i] + b.radius());
    }
    centroid += b.center();
  }
  centroid *= 1.0 / static_cast<double>(balls.size());
  const Point candidates[] = {(lo + hi) * 0.5, centroid, Point(d)};
  std::pair<Point, double> best{Point(d), std::numeric_limits<double>::infinity()};
  for (const auto& c : candidates) {
    double r = 0.0;
    for (const auto& b : balls) r = std::max(r, distance(c, b.center()) + b.radius());
    if (r < best.second) best = {c, r};
  }
  return best;
}

bool enlarged_disjoint(std::span<const Ball> balls, const Ball& extra, int d) {
  const double re = ab_enlarged_radius(extra.radius(), d);
  for (const auto& b : balls) {
    if (distance(b.center(), extra.center()) < re + ab_enlarged_radius(b.radius(), d)) return false;
  }
  return true;
}

// Quasi-uniform unit vectors on S^{d-1}.
std::vector<Point> sphere_points(int d, int n) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  if (d == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / n;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden_angle * k;
      pts.push_back(Point{rho * std::cos(a), rho * std::sin(a), z});
    }
    return pts;
  }
  // Kronecker sequence with the generalized golden ratio (root of x^{m+1} = x + 1).
  const int m = d == 4 ? 3 : d;
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (m + 1));
  std::vector<double> alpha(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) alpha[static_cast<std::size_t>(i)] = std::fmod(std::pow(1.0 / g, i + 1), 1.0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> u(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = std::fmod(0.5 + alpha[static_cast<std::size_t>(i)] * k, 1.0);
    Point p(d);
    if (d == 4) {
      // Hopf coordinates; sin^2(eta) uniform makes the map area preserving.
      u[0] = (k + 0.5) / n;
      const double s = std::sqrt(u[0]);
      const double c = std::sqrt(1.0 - u[0]);
      const double a = 2.0 * std::numbers::pi * u[1];
      const double b = 2.0 * std::numbers::pi * u[2];
      p = Point{c * std::cos(a), c * std::sin(a), s * std::cos(b), s * std::sin(b)};
    } else {
      for (int i = 0; i < d; ++i) {
        const double v = std::clamp(2.0 * u[static_cast<std::size_t>(i)] - 1.0, -1.0 + 1e-15, 1.0 - 1e-15);
        p[i] = std::numbers::sqrt2 * boost::math::erf_inv(v);
      }
      p *= 1.0 / p.norm();
    }
    pts.push_back(p);
  }
  return pts;
}

struct Panels {
  std::vector<Point> x;
  std::vector<double> self;  // diagonal entry S_i / A_i
};

Panels build_panels(std::span<const Ball> balls, int n) {
  const int d = balls.front().dim();
  const auto dirs = sphere_points(d, n);
  const double self_factor = unit_sphere_area(d - 1);
  const double disk_volume = unit_ball_volume(d - 1);
  Panels panels;
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const Ball& ball = balls[b];
    const double area = unit_sphere_area(d) * std::pow(ball.radius(), d - 1) / n;
    const double rho = std::pow(area / disk_volume, 1.0 / (d - 1));
    const double diag = self_factor * rho / area;
    for (const auto& w : dirs) {
      const Point x = ball.center() + w * ball.radius();
      bool hidden = false;
      for (std::size_t j = 0; j < balls.size() && !hidden; ++j) {
        if (j == b) continue;
        const double dist = distance(x, balls[j].center());
        const double rj = balls[j].radius();
        const bool duplicate = distance(ball.center(), balls[j].center()) <= 1e-12 * rj &&
                               std::abs(ball.radius() - rj) <= 1e-12 * rj;
        // Panels hugging another sphere would nearly coincide with its panels across the seam.
        hidden = duplicate ? j < b : dist < rj + 0.5 * rho;
      }
      if (hidden) continue;
      panels.x.push_back(x);
      panels.self.push_back(diag);
    }
  }
  return panels;
}

double kernel(const Point& a, const Point& b, int d) {
  const double r2 = distance2(a, b);
  if (d == 3) return 1.0 / std::sqrt(r2);
  if (d == 4) return 1.0 / r2;
  return std::pow(r2, 0.5 * (2 - d));
}

double solve_dense(const Panels& p, int d) {
  const auto n = static_cast<Eigen::Index>(p.x.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = p.self[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = kernel(p.x[static_cast<std::size_t>(i)], p.x[static_cast<std::size_t>(j)], d);
      m(i, j) = k;
      m(j, i) = k;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("capacity oracle system is not positive definite; refine the panels");
  }
  const Eigen::VectorXd q = llt.solve(Eigen::VectorXd::Ones(n));
  return q.sum();
}

// Preconditioned conjugate gradients, matrix-free, with block-Jacobi blocks of
// consecutive panels (Fibonacci order keeps a block spatially compact).
double solve_iterative(const Panels& p, int d) {
  const std::size_t n = p.x.size();
  constexpr std::size_t kBlock = 400;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> blocks;
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t len = std::min(kBlock, n - start);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p.self[start + i];
      for (std::size_t j = 0; j < i; ++j) {
        const double k = kernel(p.x[start + i], p.x[start + j], d);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
      }
    }
    blocks.emplace_back(m);
    if (blocks.back().info() != Eigen::Success) throw NumericalFailure("capacity oracle block is singular");
  }
  // Up to 8192 panels the full matrix fits comfortably in memory and the
  // products vectorize; beyond that the kernel is recomputed on every product.
  Eigen::MatrixXd full;
  if (n <= 8192) {
    full.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p.self[i];
      for (std::size_t j = 0; j < i; ++j) {
        full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(p.x[i], p.x[j], d);
      }
    }
  }
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    if (full.size() > 0) {
      out.noalias() = full.selfadjointView<Eigen::Lower>() * v;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = p.self[i] * v[static_cast<Eigen::Index>(i)];
      const Point& xi = p.x[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) s += kernel(xi, p.x[j], d) * v[static_cast<Eigen::Index>(j)];
      }
      out[static_cast<Eigen::Index>(i)] = s;
    }
  };
  auto precondition = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    for (std::size_t b = 0, start = 0; b < blocks.size(); ++b, start += kBlock) {
      const auto len = static_cast<Eigen::Index>(std::min(kBlock, n - start));
      z.segment(static_cast<Eigen::Index>(start), len) = blocks[b].solve(r.segment(static_cast<Eigen::Index>(start), len));
    }
  };
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(en);
  Eigen::VectorXd r = Eigen::VectorXd::Ones(en);
  Eigen::VectorXd z(en);
  Eigen::VectorXd ap(en);
  precondition(r, z);
  Eigen::VectorXd dir = z;
  double rz = r.dot(z);
  const double target = 1e-10 * std::sqrt(static_cast<double>(n));
  for (int it = 0; it < 1000; ++it) {
    apply(dir, ap);
    const double alpha = rz / dir.dot(ap);
    x += alpha * dir;
    r -= alpha * ap;
    if (r.norm() < target) return x.sum();
    precondition(r, z);
    const double rz_next = r.dot(z);
    dir = z + (rz_next / rz) * dir;
    rz = rz_next;
  }
  throw NumericalFailure("capacity oracle iteration did not converge; reduce the panel count");
}

}  // namespace

LowerBound capacity_lower_ab(std::span<const Ball> balls, int d, double constant) {
  check_dimension(d);
  if (balls.empty()) return {0.0, {}};
  const auto [center, radius] = bounding_sphere(balls);
  if (radius > 1.0 + 1e-12) return {std::nullopt, "balls do not fit in a ball of unit radius"};
  const double rmax = max_ab_radius(d);
  for (const auto& b : balls) {
    if (b.radius() > rmax) return {std::nullopt, "radius exceeds (sigma_d 2^d)^{-1/2}"};
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (!enlarged_disjoint(balls.subspan(0, i), balls[i], d)) {
      return {std::nullopt, "enlarged balls B(y_k, sigma_d^{-1/d} r_k^{1-2/d}) overlap"};
    }
  }
  return {constant * capacity_upper(balls), {}};
}

double capacity_oracle_level(std::span<const Ball> balls, int n_panels) {
  if (balls.empty()) return 0.0;
  const int d = balls.front().dim();
  check_dimension(d);
  for (const auto& b : balls) {
    if (b.dim() != d) throw InvalidInput("balls of mixed dimension");
  }
  if (balls.size() > 64) throw InvalidParameter("capacity oracle handles at most 64 balls");
  if (n_panels < 100) throw InvalidParameter("capacity oracle needs at least 100 panels per ball");
  const Panels panels = build_panels(balls, n_panels);
  if (panels.x.empty()) throw NumericalFailure("no boundary panels survived");
  double min_radius = balls.front().radius();
  for (const auto& b : balls) min_radius = std::min(min_radius, b.radius());
  for (std::size_t i = 1; i < panels.x.size(); ++i) {
    // Cheap check on neighbours in emission order; exact duplicates sit next to each other.
    if (distance(panels.x[i], panels.x[i - 1]) < 1e-12 * min_radius) {
      throw NumericalFailure("coincident panels; refine the panelization or remove duplicate balls");
    }
  }
  return panels.x.size() <= 1500 ? solve_dense(panels, d) : solve_iterative(panels, d);
}

CapacityEstimate capacity_oracle(std::span<const Ball> balls, int n_panels) {
  CapacityEstimate e;
  e.method = e.lower_method = e.upper_method = CapacityMethod::oracle;
  if (balls.empty()) return e;
  const double coarse = capacity_oracle_level(balls, n_panels);
  const double fine = capacity_oracle_level(balls, 4 * n_panels);
  e.value = fine;
  e.lower = std::min(coarse, fine);
  e.upper = std::max(coarse, fine);
  return e;
}

std::vector<Ball> clip_to_cube(std::span<const Ball> balls, const Cube& q) {
  std::vector<Ball> out;
  const Cube outer = q.dilated(q.side);
  const double half = 0.5 * outer.side;
  for (const auto& b : balls) {
    if (!q.intersects(b)) continue;
    double room = std::numeric_limits<double>::infinity();
    for (int i = 0; i < b.dim(); ++i) room = std::min(room, half - std::abs(b.center()[i] - outer.center[i]));
    const double r = std::min(b.radius(), room);
    if (r > 0.0) out.emplace_back(b.center(), r);
  }
  return out;
}

CapacityEstimate cube_capacity(std::span<const Ball> balls, const Cube& q) {
  const auto clipped = clip_to_cube(balls, q);
  CapacityEstimate e;
  if (clipped.empty()) {
    e.method = e.lower_method = e.upper_method = CapacityMethod::exact;
    return e;
  }
  const int d = clipped.front().dim();
  e.value = e.upper = capacity_upper(clipped);
  if (clipped.size() == 1) {
    e.lower = e.value;
    e.method = e.lower_method = e.upper_method = CapacityMethod::exact;
    return e;
  }
  e.method = e.upper_method = CapacityMethod::subadditive;
  // Rescale so the clipped balls fit in a unit ball with admissible radii;
  // cap(F) = alpha^{2-d} cap(alpha F).
  const auto [center, radius] = bounding_sphere(clipped);
  double rmax = 0.0;
  for (const auto& b : clipped) rmax = std::max(rmax, b.radius());
  const double alpha = std::min(1.0 / radius, max_ab_radius(d) / rmax);
  std::vector<Ball> scaled;
  scaled.reserve(clipped.size());
  for (const auto& b : clipped) scaled.emplace_back((b.center() - center) * alpha, b.radius() * alpha);
  const auto lb = capacity_lower_ab(scaled, d);
  if (lb.applicable()) {
    e.lower = std::pow(alpha, 2 - d) * *lb.value;
    e.lower_method = CapacityMethod::aikawa_borichev;
  } else {
    e.lower = 0.0;
    e.lower_method = CapacityMethod::none;
  }
  return e;
}

std::vector<Ball> random_admissible_configuration(int d, int count, double r_min, double r_max, std::uint64_t seed) {
  check_dimension(d);
  if (!(r_min > 0.0 && r_min <= r_max && r_max <= max_ab_radius(d))) {
    throw InvalidParameter("radii must satisfy 0 < r_min <= r_max <= (sigma_d 2^d)^{-1/2}");
  }
  Engine rng = make_engine(seed);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  for (int restart = 0; restart < 1000; ++restart) {
    std::vector<Ball> balls;
    for (int attempt = 0; attempt < 20000 && static_cast<int>(balls.size()) < count; ++attempt) {
      const double r = radius(rng);
      const Ball b(random_in_ball(rng, d, 1.0 - r), r);
      if (enlarged_disjoint(balls, b, d)) balls.push_back(b);
    }
    if (static_cast<int>(balls.size()) == count) return balls;
  }
  throw InvalidParameter("could not place an admissible configuration; reduce the count or radii");
}

std::vector<Ball> packed_admissible_configuration(int d, int count, double r, std::uint64_t seed) {
  check_dimension(d);
  Engine rng = make_engine(seed);
  const double gap = 2.0 * ab_enlarged_radius(r, d) * (1.0 + 1e-9);
  std::vector<Ball> balls{Ball(Point(d), r)};
  while (static_cast<int>(balls.size()) < count) {
    std::optional<Ball> best;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 4000; ++attempt) {
      std::uniform_int_distribution<std::size_t> pick(0, balls.size() - 1);
      const Point c = balls[pick(rng)].center() + random_direction(rng, d) * gap;
      if (c.norm() + r > 1.0) continue;
      const Ball b(c, r);
      if (!enlarged_disjoint(balls, b, d)) continue;
      if (c.norm() < best_norm) {
        best_norm = c.norm();
        best = b;
      }
    }
    if (!best) throw InvalidParameter("packed configuration does not fit in the unit ball");
    balls.push_back(*best);
  }
  return balls;
}

Calibration calibrate_ab_constant(int d, int configurations, std::uint64_t seed, int n_panels) {
  Calibration cal;
  cal.infimum = std::numeric_limits<double>::infinity();
  const double rmax = std::min(0.02, max_ab_radius(d));
  for (int k = 0; k < configurations; ++k) {
    const std::uint64_t s = derive_seed(seed, Stream::capacity_battery, {static_cast<std::uint64_t>(k)});
    std::vector<Ball> balls;
    if (k % 2 == 0) {
      balls = random_admissible_configuration(d, 10, 0.25 * rmax, rmax, s);
    } else {
      const double radii[] = {0.25 * rmax, 0.5 * rmax, rmax};
      balls = packed_admissible_configuration(d, 10, radii[(k / 2) % 3], s);
    }
    const double ratio = capacity_oracle_level(balls, n_panels) / capacity_upper(balls);
    cal.infimum = std::min(cal.infimum, ratio);
    ++cal.configurations;
  }
  cal.constant = std::max(cal.infimum, 0.05);
  return cal;
}

}  // namespace percodiff
