#include "emdq/field.hpp"

#include <cmath>

namespace emdq {

DeformationField::DeformationField(const MatchSet& m, const EmState& state,
                                   const LabelResult& labels, const Config& cfg)
    : dim_(m.dim), r_(cfg.r), k_(static_cast<std::size_t>(cfg.n_neighbor)) {
  if (labels.size() != m.size() || state.size() != m.size())
    throw Error("field: labels/state do not match the match set");
  std::vector<Vec3> xs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!labels.inlier[i]) continue;
    ids_.push_back(i);
    xs.push_back(m.x[i]);
    q_.push_back(state.q[i]);
    mu_.push_back(state.mu[i]);
    p_.push_back(state.p[i]);
  }
  tree_ = KdTree(xs, dim_);
}

FieldSample DeformationField::sample(const Vec3& pt, Scratch& s) const {
  FieldSample out;
  out.query = pt;
  out.displaced = pt;
  if (ids_.empty()) return out;

  tree_.knn(pt, k_, s.found);
  const double inv = 1.0 / (2.0 * r_ * r_);
  s.w.clear();
  s.dq.clear();
  double sum_w = 0.0, sum_mu = 0.0;
  for (const Neighbor& nb : s.found) {
    const double w = std::exp(-nb.dist2 * inv) * p_[nb.index];
    if (!(w > 0.0)) continue;
    s.w.push_back(w);
    s.dq.push_back(q_[nb.index]);
    sum_w += w;
    sum_mu += w * mu_[nb.index];
  }
  out.support = sum_w;
  if (sum_w > 0.0) out.displaced = dq_apply(dim_, dq_blend(dim_, s.w, s.dq), sum_mu / sum_w, pt);
  out.valid = sum_w >= kSupportMin;
  return out;
}

FieldSample DeformationField::sample(const Vec3& pt) const {
  Scratch s;
  return sample(pt, s);
}

std::vector<FieldSample> DeformationField::query(std::span<const Vec3> pts, Exec exec) const {
  std::vector<FieldSample> out(pts.size());
  if (exec == Exec::serial) {
    Scratch s;
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = sample(pts[i], s);
    return out;
  }
  const auto n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel
  {
    Scratch s;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = sample(pts[static_cast<std::size_t>(i)], s);
  }
  return out;
}

std::vector<Vec3> lattice_points(const GridBounds& b, double step, int dim,
                                 std::array<std::size_t, 3>* shape) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error("grid: step must be > 0");
  std::array<std::size_t, 3> sh{1, 1, 1};
  for (int d = 0; d < dim; ++d) {
    if (!(b.hi[d] >= b.lo[d])) throw Error("grid: empty bounds");
    sh[static_cast<std::size_t>(d)] =
        static_cast<std::size_t>(std::floor((b.hi[d] - b.lo[d]) / step + 1e-9)) + 1;
  }
  std::vector<Vec3> pts;
  pts.reserve(sh[0] * sh[1] * sh[2]);
  for (std::size_t iz = 0; iz < sh[2]; ++iz)
    for (std::size_t iy = 0; iy < sh[1]; ++iy)
      for (std::size_t ix = 0; ix < sh[0]; ++ix) {
        Vec3 p(b.lo.x() + static_cast<double>(ix) * step, b.lo.y() + static_cast<double>(iy) * step,
               dim == 3 ? b.lo.z() + static_cast<double>(iz) * step : 0.0);
        pts.push_back(p);
      }
  if (shape) *shape = sh;
  return pts;
}

FieldGrid DeformationField::grid(const GridBounds& bounds, double step, Exec exec) const {
  FieldGrid g;
  const std::vector<Vec3> pts = lattice_points(bounds, step, dim_, &g.shape);
  g.samples = query(pts, exec);
  return g;
}

std::vector<FieldSample> query_field(const MatchSet& m, const EmState& state,
                                     const LabelResult& labels, std::span<const Vec3> pts,
                                     const Config& cfg, Exec exec) {
  return DeformationField(m, state, labels, cfg).query(pts, exec);
}

FieldGrid grid_field(const MatchSet& m, const EmState& state, const LabelResult& labels,
                     const GridBounds& bounds, double step, const Config& cfg, Exec exec) {
  return DeformationField(m, state, labels, cfg).grid(bounds, step, exec);
}

}  // namespace emdq
