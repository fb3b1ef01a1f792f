#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace percodiff {

inline constexpr int kMinDimension = 3;
inline constexpr int kMaxDimension = 8;

/// Throws InvalidParameter unless kMinDimension <= d <= kMaxDimension.
void check_dimension(int d);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// Surface area of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

/// A point of R^d with fixed inline storage, so it never allocates.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  static Point axis(int dim, int k, double value = 1.0);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  double norm2() const;
  double norm() const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxDimension> c_{};
  int dim_ = 0;
};

double dot(const Point& a, const Point& b);
double distance2(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

/// A point of the unit sphere; |direction| = 1 within 1e-12.
class BoundaryPoint {
 public:
  /// Throws InvalidParameter when |direction| differs from 1 by more than 1e-12.
  explicit BoundaryPoint(const Point& direction);
  /// Normalizes a nonzero vector.
  static BoundaryPoint from_direction(const Point& v);

  const Point& direction() const { return dir_; }
  int dim() const { return dir_.dim(); }

 private:
  Point dir_;
};

/// Closed ball B(center, radius) with radius > 0.
class Ball {
 public:
  Ball(const Point& center, double radius);

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return center_.dim(); }

 private:
  Point center_;
  double radius_;
};

/// Closed axis-aligned cube.
struct Cube {
  Point center;
  double side = 0.0;

  double diameter() const;
  Point closest_point(const Point& x) const;
  /// max |x| over the cube.
  double max_norm() const;
  /// min |x| over the cube.
  double min_norm() const;
  bool intersects(const Ball& b) const;
  bool contains(const Point& x) const;
  Cube dilated(double margin) const { return {center, side + 2.0 * margin}; }
};

/// Cube of the dyadic Whitney decomposition of the unit ball.
struct WhitneyCube {
  Cube cube;
  int generation = 0;
  std::int64_t index = -1;

  double sidelength() const { return cube.side; }
  const Point& center() const { return cube.center; }
  /// dist(Q, S) = 1 - max_{x in Q} |x|.
  double boundary_distance() const { return 1.0 - cube.max_norm(); }
};

/// Cube of the shell partition of R^d minus the unit cube around the origin.
struct ExteriorCube {
  Cube cube;
  int shell = 0;

  double sidelength() const { return cube.side; }
  const Point& center() const { return cube.center; }
};

/// Whitney decomposition of the ball by dyadic subdivision of [-1,1]^d.
///
/// A cube is kept when it lies in the open unit ball and diam(Q) <= dist(Q, S),
/// dropped when it lies entirely in {|x| >= 1 - eps}, and subdivided otherwise.
/// The kept cubes tile {|x| <= 1 - eps} up to a null set and satisfy
/// diam(Q) <= dist(Q, S) <= 4 diam(Q). Indices follow breadth-first order.
std::vector<WhitneyCube> whitney_decompose(int d, double eps);

/// Depth-first traversal of the same decomposition without materializing it.
/// `descend` is asked about every visited dyadic cube (kept or not); returning
/// false prunes it together with its descendants. Visited cubes carry index -1.
void visit_whitney_cubes(int d, double eps, const std::function<bool(const Cube&)>& descend,
                         const std::function<void(const WhitneyCube&)>& visit);

/// For shells j = 1..j_max, the 3^d - 1 cubes of side 3^{j-1} that partition
/// the cube of side 3^j centred at the origin minus its central cube.
std::vector<ExteriorCube> exterior_cubes(int d, int j_max);

/// Exact Euclidean distance from the closed cube to a point.
double dist_cube_to_point(const Cube& q, const Point& x);
inline double dist_cube_to_point(const WhitneyCube& q, const BoundaryPoint& tau) {
  return dist_cube_to_point(q.cube, tau.direction());
}

}  // namespace percodiff
