#pragma once

#include "emdq/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emdq {

struct Neighbor {
  std::uint32_t index;
  double dist2;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
};

/// Static kd-tree over a point set. Query results are exact and ordered by
/// (squared distance, index), so they match a brute-force sort including
/// ties.
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::span<const Vec3> points, int dim);

  std::size_t size() const { return points_.size(); }

  /// k nearest points to q, written to out (cleared first).
  void knn(const Vec3& q, std::size_t k, std::vector<Neighbor>& out) const;
  std::vector<Neighbor> knn(const Vec3& q, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    int axis = -1;             // -1 for leaves
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  int dim_ = 3;
};

}  // namespace emdq
