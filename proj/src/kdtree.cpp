#include "emdq/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace emdq {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const Vec3> points, int dim)
    : points_(points.begin(), points.end()), order_(points.size()), dim_(dim) {
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  for (int d = 1; d < dim_; ++d)
    if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis] ||
                            (points_[a][axis] == points_[b][axis] && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::search(std::int32_t id, const Vec3& q, std::size_t k,
                    std::vector<Neighbor>& heap) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      const Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[n.axis] - n.split;
  const std::int32_t near = diff <= 0.0 ? n.left : n.right;
  const std::int32_t far = diff <= 0.0 ? n.right : n.left;
  search(near, q, k, heap);
  // Ties on the boundary may still win on index, so prune strictly.
  if (heap.size() < k || diff * diff <= heap.front().dist2) search(far, q, k, heap);
}

void KdTree::knn(const Vec3& q, std::size_t k, std::vector<Neighbor>& out) const {
  out.clear();
  k = std::min(k, points_.size());
  if (k == 0) return;
  out.reserve(k);
  search(0, q, k, out);
  std::sort_heap(out.begin(), out.end());
}

std::vector<Neighbor> KdTree::knn(const Vec3& q, std::size_t k) const {
  std::vector<Neighbor> out;
  knn(q, k, out);
  return out;
}

}  // namespace emdq
