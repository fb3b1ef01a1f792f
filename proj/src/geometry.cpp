#include "percodiff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "percodiff/errors.hpp"

namespace percodiff {

void check_dimension(int d) {
  if (d < kMinDimension || d > kMaxDimension) {
    throw InvalidParameter("dimension must lie in [" + std::to_string(kMinDimension) + ", " +
                           std::to_string(kMaxDimension) + "], got " + std::to_string(d));
  }
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDimension) throw InvalidParameter("point dimension out of range");
}

Point::Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : Point(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::axis(int dim, int k, double value) {
  Point p(dim);
  p[k] = value;
  return p;
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
  return s;
}

double Point::norm() const { return std::sqrt(norm2()); }

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.c_[i] != b.c_[i]) return false;
  }
  return true;
}

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double distance2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(distance2(a, b)); }

BoundaryPoint::BoundaryPoint(const Point& direction) : dir_(direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw InvalidParameter("boundary point must have unit norm");
  }
}

BoundaryPoint BoundaryPoint::from_direction(const Point& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidParameter("cannot normalize a zero direction");
  Point u = v * (1.0 / n);
  // One Newton correction keeps the norm within a couple of ulps of 1.
  u *= 1.0 / u.norm();
  return BoundaryPoint(u);
}

Ball::Ball(const Point& center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidParameter("ball radius must be positive");
}

double Cube::diameter() const { return side * std::sqrt(static_cast<double>(center.dim())); }

Point Cube::closest_point(const Point& x) const {
  Point p = x;
  const double h = 0.5 * side;
  for (int i = 0; i < x.dim(); ++i) p[i] = std::clamp(x[i], center[i] - h, center[i] + h);
  return p;
}

double Cube::max_norm() const {
  const double h = 0.5 * side;
  double s = 0.0;
  for (int i = 0; i < center.dim(); ++i) {
    const double m = std::abs(center[i]) + h;
    s += m * m;
  }
  return std::sqrt(s);
}

double Cube::min_norm() const {
  const double h = 0.5 * side;
  double s = 0.0;
  for (int i = 0; i < center.dim(); ++i) {
    const double m = std::max(0.0, std::abs(center[i]) - h);
    s += m * m;
  }
  return std::sqrt(s);
}

bool Cube::intersects(const Ball& b) const {
  return distance2(closest_point(b.center()), b.center()) <= b.radius() * b.radius();
}

bool Cube::contains(const Point& x) const {
  const double h = 0.5 * side;
  for (int i = 0; i < x.dim(); ++i) {
    if (std::abs(x[i] - center[i]) > h) return false;
  }
  return true;
}

double dist_cube_to_point(const Cube& q, const Point& x) { return distance(q.closest_point(x), x); }

namespace {

using Corner = std::array<std::int64_t, kMaxDimension>;

struct DyadicCube {
  Corner corner{};
  int generation = 0;
};

// Generation g has sidelength 2^{1-g}; corner k maps to [-1 + k l, -1 + (k+1) l].
Cube to_cube(const DyadicCube& c, int d) {
  const double side = std::ldexp(1.0, 1 - c.generation);
  Point center(d);
  for (int i = 0; i < d; ++i) center[i] = -1.0 + (static_cast<double>(c.corner[i]) + 0.5) * side;
  return {center, side};
}

enum class Fate { drop, keep, split };

Fate classify_cube(const Cube& q, double eps) {
  if (q.min_norm() >= 1.0 - eps) return Fate::drop;
  const double outer = q.max_norm();
  if (outer < 1.0 && q.diameter() <= 1.0 - outer) return Fate::keep;
  return Fate::split;
}

template <class Fn>
void for_each_child(const DyadicCube& c, int d, Fn&& fn) {
  const int n = 1 << d;
  for (int mask = 0; mask < n; ++mask) {
    DyadicCube child;
    child.generation = c.generation + 1;
    for (int i = 0; i < d; ++i) child.corner[i] = 2 * c.corner[i] + ((mask >> i) & 1);
    fn(child);
  }
}

void check_truncation(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidParameter("Whitney truncation must lie in (0, 1/2)");
}

}  // namespace

std::vector<WhitneyCube> whitney_decompose(int d, double eps) {
  check_dimension(d);
  check_truncation(eps);
  std::vector<WhitneyCube> kept;
  std::vector<DyadicCube> level{DyadicCube{}};
  std::vector<DyadicCube> next;
  while (!level.empty()) {
    next.clear();
    for (const auto& c : level) {
      const Cube q = to_cube(c, d);
      switch (classify_cube(q, eps)) {
        case Fate::drop:
          break;
        case Fate::keep:
          kept.push_back({q, c.generation, static_cast<std::int64_t>(kept.size())});
          break;
        case Fate::split:
          for_each_child(c, d, [&](const DyadicCube& child) { next.push_back(child); });
          break;
      }
    }
    level.swap(next);
  }
  return kept;
}

namespace {

void visit_recursive(const DyadicCube& c, int d, double eps, const std::function<bool(const Cube&)>& descend,
                     const std::function<void(const WhitneyCube&)>& visit) {
  const Cube q = to_cube(c, d);
  if (!descend(q)) return;
  switch (classify_cube(q, eps)) {
    case Fate::drop:
      return;
    case Fate::keep:
      visit({q, c.generation, -1});
      return;
    case Fate::split:
      for_each_child(c, d, [&](const DyadicCube& child) { visit_recursive(child, d, eps, descend, visit); });
      return;
  }
}

}  // namespace

void visit_whitney_cubes(int d, double eps, const std::function<bool(const Cube&)>& descend,
                         const std::function<void(const WhitneyCube&)>& visit) {
  check_dimension(d);
  check_truncation(eps);
  visit_recursive(DyadicCube{}, d, eps, descend, visit);
}

std::vector<ExteriorCube> exterior_cubes(int d, int j_max) {
  check_dimension(d);
  if (j_max < 1) throw InvalidParameter("j_max must be at least 1");
  std::vector<ExteriorCube> cubes;
  int per_shell = 1;
  for (int i = 0; i < d; ++i) per_shell *= 3;
  for (int j = 1; j <= j_max; ++j) {
    const double side = std::pow(3.0, j - 1);
    for (int code = 0; code < per_shell; ++code) {
      if (code == per_shell / 2) continue;  // the central cube
      Point center(d);
      int rest = code;
      for (int i = d - 1; i >= 0; --i) {
        center[i] = side * static_cast<double>(rest % 3 - 1);
        rest /= 3;
      }
      cubes.push_back({{center, side}, j});
    }
  }
  return cubes;
}

}  // namespace percodiff
