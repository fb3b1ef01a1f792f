#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "percodiff/geometry.hpp"

namespace percodiff {

/// Signed-distance queries against a fixed union of balls.
///
/// Backed by a bounding-volume hierarchy over the balls' bounding boxes. Node
/// bounds are conservative: the box distance when the query lies outside the
/// box, minus the largest radius below the node otherwise. Queries return the
/// same value as the brute-force minimum of |x - p| - r.
class ObstacleIndex {
 public:
  struct Nearest {
    double distance = std::numeric_limits<double>::infinity();
    std::ptrdiff_t ball = -1;
  };

  ObstacleIndex() = default;
  ObstacleIndex(int dim, std::vector<Ball> balls);

  /// +infinity and ball = -1 when there are no obstacles.
  Nearest nearest(const Point& x) const;
  double distance(const Point& x) const { return nearest(x).distance; }

  /// Calls fn(i) for every ball i with |x - p_i| - r_i < reach.
  void for_each_within(const Point& x, double reach, const std::function<void(std::size_t)>& fn) const;

  std::span<const Ball> balls() const { return balls_; }
  int dim() const { return dim_; }
  bool empty() const { return balls_.empty(); }

 private:
  struct Node {
    std::array<double, kMaxDimension> lo{};
    std::array<double, kMaxDimension> hi{};
    double max_radius = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double lower_bound(const Node& n, const Point& x) const;

  int dim_ = 0;
  std::vector<Ball> balls_;
  std::vector<std::uint32_t> order_;
  // Coordinates of balls_[order_[k]] packed as [x_0..x_{d-1}, r].
  std::vector<double> packed_;
  std::vector<Node> nodes_;
};

}  // namespace percodiff
