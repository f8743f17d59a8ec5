#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "isurf/types.h"

namespace isurf {

// Static median-split kd-tree over 3D points; radius and nearest queries.
class KdTree3 {
 public:
  explicit KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * points_.size() / kLeaf + 4);
    if (!points_.empty()) build(0, static_cast<std::int32_t>(points_.size()));
  }

  // Indices of all points with |p - x| <= radius, in unspecified order.
  void radius_query(const Vec3& p, Scalar radius, std::vector<std::int32_t>& out) const {
    out.clear();
    if (points_.empty()) return;
    const Scalar r2 = radius * radius;
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<size_t>(stack[--top])];
      if (box_sq(node, p) > r2) continue;
      if (node.count > 0) {
        for (std::int32_t i = node.left; i < node.left + node.count; ++i) {
          const std::int32_t idx = order_[static_cast<size_t>(i)];
          if ((points_[static_cast<size_t>(idx)] - p).squaredNorm() <= r2) out.push_back(idx);
        }
        continue;
      }
      stack[top++] = static_cast<std::int32_t>(&node - nodes_.data()) + 1;
      stack[top++] = node.left;
    }
  }

  std::int32_t nearest(const Vec3& p) const {
    std::int32_t best = -1;
    Scalar best_sq = std::numeric_limits<Scalar>::infinity();
    if (points_.empty()) return best;
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<size_t>(stack[--top])];
      if (box_sq(node, p) >= best_sq) continue;
      if (node.count > 0) {
        for (std::int32_t i = node.left; i < node.left + node.count; ++i) {
          const std::int32_t idx = order_[static_cast<size_t>(i)];
          const Scalar d2 = (points_[static_cast<size_t>(idx)] - p).squaredNorm();
          if (d2 < best_sq) {
            best_sq = d2;
            best = idx;
          }
        }
        continue;
      }
      const std::int32_t c0 = static_cast<std::int32_t>(&node - nodes_.data()) + 1;
      const std::int32_t c1 = node.left;
      const Scalar d0 = box_sq(nodes_[static_cast<size_t>(c0)], p);
      const Scalar d1 = box_sq(nodes_[static_cast<size_t>(c1)], p);
      if (d0 < d1) {
        stack[top++] = c1;
        stack[top++] = c0;
      } else {
        stack[top++] = c0;
        stack[top++] = c1;
      }
    }
    return best;
  }

  const std::vector<Vec3>& points() const { return points_; }

 private:
  static constexpr std::int32_t kLeaf = 8;
  struct Node {
    Vec3 lo, hi;
    std::int32_t left = -1;  // internal: right child index; leaf: first point
    std::int32_t count = 0;  // 0 for internal nodes
  };

  Scalar box_sq(const Node& n, const Vec3& p) const {
    Scalar d2 = 0;
    for (int a = 0; a < 3; ++a) {
      const Scalar d = std::max({n.lo[a] - p[a], 0.0, p[a] - n.hi[a]});
      d2 += d * d;
    }
    return d2;
  }

  std::int32_t build(std::int32_t begin, std::int32_t end) {
    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo = Vec3::Constant(std::numeric_limits<Scalar>::infinity());
    Vec3 hi = -lo;
    for (std::int32_t i = begin; i < end; ++i) {
      const Vec3& v = points_[static_cast<size_t>(order_[static_cast<size_t>(i)])];
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    nodes_[static_cast<size_t>(self)].lo = lo;
    nodes_[static_cast<size_t>(self)].hi = hi;
    if (end - begin <= kLeaf) {
      nodes_[static_cast<size_t>(self)].left = begin;
      nodes_[static_cast<size_t>(self)].count = end - begin;
      return self;
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::int32_t mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                       return points_[static_cast<size_t>(a)][axis] <
                              points_[static_cast<size_t>(b)][axis];
                     });
    build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[static_cast<size_t>(self)].left = right;
    nodes_[static_cast<size_t>(self)].count = 0;
    return self;
  }

  std::vector<Vec3> points_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace isurf
