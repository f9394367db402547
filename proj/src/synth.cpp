#include "emdq/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace emdq {

void SynthSpec::validate() const {
  if (n == 0) throw Error("synth: n must be >= 1");
  if (dim != 2 && dim != 3) throw Error("synth: dim must be 2 or 3");
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) throw Error("synth: outlier_ratio must be in [0, 1)");
  if (!(pattern_ratio >= 0.0) || outlier_ratio + pattern_ratio >= 1.0)
    throw Error("synth: outlier_ratio + pattern_ratio must be < 1");
  if (n_anchors < 1) throw Error("synth: n_anchors must be >= 1");
  if (noise_sigma < 0.0 || max_rotation < 0.0 || max_scale_jitter < 0.0 || max_scale_jitter >= 1.0)
    throw Error("synth: bad motion/noise parameters");
  for (int d = 0; d < dim; ++d)
    if (!(bounds.hi[d] > bounds.lo[d])) throw Error("synth: bounds must have positive extent");
}

Vec3 SynthScene::true_field(const Vec3& x) const {
  std::vector<double> w(anchor_centers.size());
  std::vector<DualQuat> dq(anchor_centers.size());
  double sum_w = 0.0, sum_mu = 0.0;
  const double inv = 1.0 / (2.0 * anchor_radius * anchor_radius);
  for (std::size_t k = 0; k < anchor_centers.size(); ++k) {
    // Floor keeps the blend defined far from every anchor.
    w[k] = std::exp(-(x - anchor_centers[k]).squaredNorm() * inv) + 1e-12;
    dq[k] = anchor_motions[k].dq;
    sum_w += w[k];
    sum_mu += w[k] * anchor_motions[k].mu;
  }
  return dq_apply(dq_blend(w, dq), sum_mu / sum_w, x);
}

SynthScene synth_generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = spec.dim;

  auto uniform_in = [&](const GridBounds& b) {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < dim; ++d) p[d] = b.lo[d] + unit(rng) * (b.hi[d] - b.lo[d]);
    return p;
  };
  auto noise = [&]() {
    Vec3 e = Vec3::Zero();
    for (int d = 0; d < dim; ++d) e[d] = spec.noise_sigma * gauss(rng);
    return e;
  };

  double extent = 0.0;
  for (int d = 0; d < dim; ++d) extent = std::max(extent, spec.bounds.hi[d] - spec.bounds.lo[d]);

  SynthScene scene;
  scene.anchor_radius = spec.anchor_radius > 0.0 ? spec.anchor_radius : 0.3 * extent;
  for (int k = 0; k < spec.n_anchors; ++k) {
    const Vec3 c = uniform_in(spec.bounds);
    const double angle = (2.0 * unit(rng) - 1.0) * spec.max_rotation;
    Vec3 axis = Vec3::UnitZ();
    if (dim == 3) {
      axis = Vec3(gauss(rng), gauss(rng), gauss(rng));
      if (axis.norm() < 1e-12) axis = Vec3::UnitZ();
      axis.normalize();
    }
    const Mat3 R = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const double mu = 1.0 + (2.0 * unit(rng) - 1.0) * spec.max_scale_jitter;
    Vec3 tau = Vec3::Zero();
    for (int d = 0; d < dim; ++d) tau[d] = (2.0 * unit(rng) - 1.0) * spec.max_translation * extent;
    // Motion about the anchor: y = mu (R (x - c) + c + tau).
    Vec3 t = c - R * c + tau;
    if (dim == 2) t.z() = 0.0;
    scene.anchor_centers.push_back(c);
    scene.anchor_motions.push_back({dq_from_transform(R, t), mu});
  }

  const std::size_t n = spec.n;
  const auto n_out = static_cast<std::size_t>(std::llround(spec.outlier_ratio * static_cast<double>(n)));
  const auto n_pat = static_cast<std::size_t>(std::llround(spec.pattern_ratio * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  // 0 inlier, 1 outlier, 2 pattern
  std::vector<int> kind(n, 0);
  for (std::size_t k = 0; k < std::min(n, n_out); ++k) kind[perm[k]] = 1;
  for (std::size_t k = n_out; k < std::min(n, n_out + n_pat); ++k) kind[perm[k]] = 2;

  scene.matches.dim = dim;
  scene.matches.x.resize(n);
  scene.matches.y.resize(n);
  scene.gt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 x, y;
    switch (kind[i]) {
      case 1:
        x = uniform_in(spec.bounds);
        y = uniform_in(spec.bounds);
        break;
      case 2:
        x = uniform_in(spec.pattern_bounds);
        y = scene.true_field(x) + spec.pattern_offset + noise();
        break;
      default:
        x = uniform_in(spec.bounds);
        y = scene.true_field(x) + noise();
        break;
    }
    if (dim == 2) {
      x.z() = 0.0;
      y.z() = 0.0;
    }
    scene.matches.x[i] = x;
    scene.matches.y[i] = y;
    scene.gt[i] = kind[i] == 0;
  }
  scene.matches.validate();
  return scene;
}

}  // namespace emdq
