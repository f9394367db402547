#pragma once

// Per-match data-parallel kernels used by the EM loop and the field
// queries. Every kernel exists twice: `serial` is the reference loop kept
// for testing, `parallel` is the OpenMP version. Both call the same
// per-index routine and only write slot i from iteration i, so their
// outputs are bitwise identical for any thread count. Reductions are left
// to the (serial) caller.

#include "emdq/core.hpp"
#include "emdq/dual_quat.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emdq {

enum class Exec { serial, parallel };

/// Fixed-stride neighbor lists. Row i starts with i itself (distance weight
/// 1) followed by its nearest other matches by x-distance.
struct NeighborGraph {
  std::size_t n = 0;
  std::size_t stride = 0;
  std::vector<std::uint32_t> index;   // n * stride
  std::vector<double> w_distance;     // n * stride, in (0, 1]

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {index.data() + i * stride, stride};
  }
  std::span<const double> weights(std::size_t i) const {
    return {w_distance.data() + i * stride, stride};
  }
};

/// max(exp(-|dy|^2 / 2r^2), exp(-|dx|^2 / 2r^2))
double distance_weight(const Vec3& xi, const Vec3& yi, const Vec3& xj, const Vec3& yj, double r);

/// Inputs of the blending step of one M-step (read-only, previous
/// iteration) and its per-match outputs (written).
struct BlendInputs {
  const MatchSet* matches;
  const NeighborGraph* graph;
  std::span<const double> edge_weight;
  std::span<const DualQuat> q;
  std::span<const double> mu;
};

struct BlendOutputs {
  std::span<DualQuat> q_bar;
  std::span<double> mu_bar;
  std::span<Vec3> field;
  std::span<double> residual;  // +inf for isolated matches
  std::span<DualQuat> q_new;
  std::span<double> mu_new;
  std::span<std::uint8_t> isolated;
};

namespace kernels {

namespace serial {

void knn_graph(const MatchSet& m, int n_neighbor, double r, NeighborGraph& g);
void posteriors(std::span<const double> residual, double sigma, double outlier_term,
                std::span<double> p);
void edge_weights(const NeighborGraph& g, std::span<const double> p, std::span<double> out);
void blend(const BlendInputs& in, const BlendOutputs& out);

}  // namespace serial

namespace parallel {

void knn_graph(const MatchSet& m, int n_neighbor, double r, NeighborGraph& g);
void posteriors(std::span<const double> residual, double sigma, double outlier_term,
                std::span<double> p);
void edge_weights(const NeighborGraph& g, std::span<const double> p, std::span<double> out);
void blend(const BlendInputs& in, const BlendOutputs& out);

}  // namespace parallel

inline void knn_graph(Exec e, const MatchSet& m, int k, double r, NeighborGraph& g) {
  e == Exec::serial ? serial::knn_graph(m, k, r, g) : parallel::knn_graph(m, k, r, g);
}
inline void posteriors(Exec e, std::span<const double> res, double sigma, double outlier_term,
                       std::span<double> p) {
  e == Exec::serial ? serial::posteriors(res, sigma, outlier_term, p)
                    : parallel::posteriors(res, sigma, outlier_term, p);
}
inline void edge_weights(Exec e, const NeighborGraph& g, std::span<const double> p,
                         std::span<double> out) {
  e == Exec::serial ? serial::edge_weights(g, p, out) : parallel::edge_weights(g, p, out);
}
inline void blend(Exec e, const BlendInputs& in, const BlendOutputs& out) {
  e == Exec::serial ? serial::blend(in, out) : parallel::blend(in, out);
}

}  // namespace kernels

}  // namespace emdq
