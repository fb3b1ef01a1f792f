#include "percodiff/obstacle_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "percodiff/errors.hpp"

namespace percodiff {

namespace {
constexpr std::uint32_t kLeafSize = 4;
}

ObstacleIndex::ObstacleIndex(int dim, std::vector<Ball> balls) : dim_(dim), balls_(std::move(balls)) {
  check_dimension(dim);
  for (const auto& b : balls_) {
    if (b.dim() != dim) throw InvalidInput("ball dimension does not match the index dimension");
  }
  order_.resize(balls_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!balls_.empty()) {
    nodes_.reserve(2 * balls_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(balls_.size()));
  }
  const std::size_t stride = static_cast<std::size_t>(dim_) + 1;
  packed_.resize(balls_.size() * stride);
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const Ball& b = balls_[order_[k]];
    for (int i = 0; i < dim_; ++i) packed_[k * stride + static_cast<std::size_t>(i)] = b.center()[i];
    packed_[k * stride + static_cast<std::size_t>(dim_)] = b.radius();
  }
}

std::int32_t ObstacleIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.fill(std::numeric_limits<double>::infinity());
  node.hi.fill(-std::numeric_limits<double>::infinity());
  std::array<double, kMaxDimension> clo{};
  std::array<double, kMaxDimension> chi{};
  clo.fill(std::numeric_limits<double>::infinity());
  chi.fill(-std::numeric_limits<double>::infinity());
  for (std::uint32_t k = begin; k < end; ++k) {
    const Ball& b = balls_[order_[k]];
    node.max_radius = std::max(node.max_radius, b.radius());
    for (int i = 0; i < dim_; ++i) {
      const double c = b.center()[i];
      node.lo[i] = std::min(node.lo[i], c - b.radius());
      node.hi[i] = std::max(node.hi[i], c + b.radius());
      clo[i] = std::min(clo[i], c);
      chi[i] = std::max(chi[i], c);
    }
  }
  if (end - begin > kLeafSize) {
    int axis = 0;
    for (int i = 1; i < dim_; ++i) {
      if (chi[i] - clo[i] > chi[axis] - clo[axis]) axis = i;
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = balls_[a].center()[axis];
                       const double cb = balls_[b].center()[axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    node.left = build(begin, mid);
    node.right = build(mid, end);
  }
  nodes_[static_cast<std::size_t>(id)] = node;
  return id;
}

double ObstacleIndex::lower_bound(const Node& n, const Point& x) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double v = x[i];
    const double gap = v < n.lo[i] ? n.lo[i] - v : (v > n.hi[i] ? v - n.hi[i] : 0.0);
    s += gap * gap;
  }
  // Inside the box the query may sit inside a ball: only -max_radius is safe.
  return s > 0.0 ? std::sqrt(s) : -n.max_radius;
}

ObstacleIndex::Nearest ObstacleIndex::nearest(const Point& x) const {
  Nearest best;
  if (nodes_.empty()) return best;
  const std::size_t stride = static_cast<std::size_t>(dim_) + 1;
  std::array<std::pair<std::int32_t, double>, 128> stack;
  std::size_t top = 0;
  stack[top++] = {0, lower_bound(nodes_[0], x)};
  while (top > 0) {
    const auto [id, bound] = stack[--top];
    if (bound >= best.distance) continue;
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.left < 0) {
      for (std::uint32_t k = n.begin; k < n.end; ++k) {
        const double* p = &packed_[k * stride];
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
          const double t = x[i] - p[i];
          s += t * t;
        }
        const double dist = std::sqrt(s) - p[dim_];
        if (dist < best.distance) {
          best.distance = dist;
          best.ball = static_cast<std::ptrdiff_t>(order_[k]);
        }
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(n.left)];
    const Node& r = nodes_[static_cast<std::size_t>(n.right)];
    const double bl = lower_bound(l, x);
    const double br = lower_bound(r, x);
    // Push the farther child first so the nearer one is explored next.
    if (bl <= br) {
      if (br < best.distance) stack[top++] = {n.right, br};
      if (bl < best.distance) stack[top++] = {n.left, bl};
    } else {
      if (bl < best.distance) stack[top++] = {n.left, bl};
      if (br < best.distance) stack[top++] = {n.right, br};
    }
  }
  return best;
}

void ObstacleIndex::for_each_within(const Point& x, double reach, const std::function<void(std::size_t)>& fn) const {
  if (nodes_.empty()) return;
  const std::size_t stride = static_cast<std::size_t>(dim_) + 1;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (lower_bound(n, x) >= reach) continue;
    if (n.left >= 0) {
      stack.push_back(n.left);
      stack.push_back(n.right);
      continue;
    }
    for (std::uint32_t k = n.begin; k < n.end; ++k) {
      const double* p = &packed_[k * stride];
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double t = x[i] - p[i];
        s += t * t;
      }
      if (std::sqrt(s) - p[dim_] < reach) fn(order_[k]);
    }
  }
}

}  // namespace percodiff
