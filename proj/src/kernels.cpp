#include "emdq/kernels.hpp"

#include "emdq/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emdq {

double distance_weight(const Vec3& xi, const Vec3& yi, const Vec3& xj, const Vec3& yj, double r) {
  const double inv = 1.0 / (2.0 * r * r);
  return std::max(std::exp(-(yi - yj).squaredNorm() * inv),
                  std::exp(-(xi - xj).squaredNorm() * inv));
}

namespace {

struct Scratch {
  std::vector<Neighbor> found;
  std::vector<double> w;
  std::vector<DualQuat> dq;
};

std::size_t graph_stride(std::size_t n, int n_neighbor) {
  return std::min(static_cast<std::size_t>(n_neighbor), n - 1) + 1;
}

void prepare_graph(const MatchSet& m, int n_neighbor, NeighborGraph& g) {
  g.n = m.size();
  g.stride = graph_stride(g.n, n_neighbor);
  g.index.assign(g.n * g.stride, 0);
  g.w_distance.assign(g.n * g.stride, 0.0);
}

void knn_row(const MatchSet& m, const KdTree& tree, double r, std::size_t i, NeighborGraph& g,
             Scratch& s) {
  const std::size_t others = g.stride - 1;
  tree.knn(m.x[i], others + 1, s.found);
  std::uint32_t* idx = g.index.data() + i * g.stride;
  double* wd = g.w_distance.data() + i * g.stride;
  idx[0] = static_cast<std::uint32_t>(i);
  wd[0] = 1.0;
  std::size_t k = 1;
  for (const Neighbor& nb : s.found) {
    if (nb.index == i) continue;
    if (k > others) break;
    idx[k] = nb.index;
    wd[k] = distance_weight(m.x[i], m.y[i], m.x[nb.index], m.y[nb.index], r);
    ++k;
  }
}

inline double posterior_one(double residual, double inv_two_sigma2, double outlier_term) {
  const double g = std::exp(-residual * residual * inv_two_sigma2);
  return g / (g + outlier_term);
}

inline void edge_row(const NeighborGraph& g, std::span<const double> p, std::size_t i,
                     std::span<double> out) {
  const auto nb = g.neighbors(i);
  const auto wd = g.weights(i);
  for (std::size_t k = 0; k < g.stride; ++k) out[i * g.stride + k] = wd[k] * p[nb[k]];
}

void blend_one(const BlendInputs& in, const BlendOutputs& out, std::size_t i, Scratch& s) {
  const MatchSet& m = *in.matches;
  const NeighborGraph& g = *in.graph;
  const auto nb = g.neighbors(i);
  const double* ew = in.edge_weight.data() + i * g.stride;

  s.w.clear();
  s.dq.clear();
  double sum_w = 0.0, sum_mu = 0.0;
  for (std::size_t k = 0; k < g.stride; ++k) {
    if (ew[k] <= 0.0) continue;
    s.w.push_back(ew[k]);
    s.dq.push_back(in.q[nb[k]]);
    sum_w += ew[k];
    sum_mu += ew[k] * in.mu[nb[k]];
  }

  if (!(sum_w > 0.0)) {
    out.isolated[i] = 1;
    out.q_bar[i] = in.q[i];
    out.mu_bar[i] = in.mu[i];
    out.field[i] = dq_apply(m.dim, in.q[i], in.mu[i], m.x[i]);
    out.residual[i] = std::numeric_limits<double>::infinity();
    out.q_new[i] = in.q[i];
    out.mu_new[i] = in.mu[i];
    return;
  }

  const DualQuat qb = dq_blend(m.dim, s.w, s.dq);
  const double mb = sum_mu / sum_w;
  const Vec3 f = dq_apply(m.dim, qb, mb, m.x[i]);
  const Vec3 dr = m.y[i] - f;
  out.isolated[i] = 0;
  out.q_bar[i] = qb;
  out.mu_bar[i] = mb;
  out.field[i] = f;
  out.residual[i] = dr.norm();
  // Translate after the blended motion so that mu_bar * q_new(x_i) = y_i.
  out.q_new[i] = dq_multiply(m.dim, trans2dq(dr / mb), qb);
  out.mu_new[i] = mb;
}

}  // namespace

namespace kernels {

namespace serial {

void knn_graph(const MatchSet& m, int n_neighbor, double r, NeighborGraph& g) {
  prepare_graph(m, n_neighbor, g);
  const KdTree tree(m.x, m.dim);
  Scratch s;
  for (std::size_t i = 0; i < g.n; ++i) knn_row(m, tree, r, i, g, s);
}

void posteriors(std::span<const double> residual, double sigma, double outlier_term,
                std::span<double> p) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < residual.size(); ++i)
    p[i] = posterior_one(residual[i], inv, outlier_term);
}

void edge_weights(const NeighborGraph& g, std::span<const double> p, std::span<double> out) {
  for (std::size_t i = 0; i < g.n; ++i) edge_row(g, p, i, out);
}

void blend(const BlendInputs& in, const BlendOutputs& out) {
  Scratch s;
  for (std::size_t i = 0; i < in.matches->size(); ++i) blend_one(in, out, i, s);
}

}  // namespace serial

namespace parallel {

void knn_graph(const MatchSet& m, int n_neighbor, double r, NeighborGraph& g) {
  prepare_graph(m, n_neighbor, g);
  const KdTree tree(m.x, m.dim);
  const auto n = static_cast<std::int64_t>(g.n);
#pragma omp parallel
  {
    Scratch s;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) knn_row(m, tree, r, static_cast<std::size_t>(i), g, s);
  }
}

void posteriors(std::span<const double> residual, double sigma, double outlier_term,
                std::span<double> p) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const auto n = static_cast<std::int64_t>(residual.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    p[static_cast<std::size_t>(i)] =
        posterior_one(residual[static_cast<std::size_t>(i)], inv, outlier_term);
}

void edge_weights(const NeighborGraph& g, std::span<const double> p, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(g.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) edge_row(g, p, static_cast<std::size_t>(i), out);
}

void blend(const BlendInputs& in, const BlendOutputs& out) {
  const auto n = static_cast<std::int64_t>(in.matches->size());
#pragma omp parallel
  {
    Scratch s;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) blend_one(in, out, static_cast<std::size_t>(i), s);
  }
}

}  // namespace parallel

}  // namespace kernels

}  // namespace emdq
