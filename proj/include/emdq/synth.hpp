#pragma once

#include "emdq/core.hpp"
#include "emdq/dual_quat.hpp"
#include "emdq/field.hpp"

#include <vector>

namespace emdq {

/// Synthetic ground-truthed scene description.
///
/// Inliers follow a smooth non-rigid field obtained by blending
/// `n_anchors` scaled rigid motions, each centred at a random anchor point,
/// with Gaussian weights of radius `anchor_radius`. Outliers have y drawn
/// uniformly in `bounds`. Optional "pattern" matches model a repeating
/// texture: x inside `pattern_bounds`, y = true field + `pattern_offset`.
/// They are mutually consistent but wrong, so their gt flag is false.
struct SynthSpec {
  std::size_t n = 1000;
  int dim = 2;
  double outlier_ratio = 0.5;
  int n_anchors = 3;
  double max_rotation = 0.35;       // radians
  double max_scale_jitter = 0.1;    // anchor scales in [1 - j, 1 + j]
  double max_translation = 0.05;    // fraction of the largest extent
  double noise_sigma = 2.0;         // per component
  GridBounds bounds{Vec3(0.0, 0.0, 0.0), Vec3(800.0, 600.0, 0.0)};
  double anchor_radius = 0.0;       // 0: 0.3 * largest extent
  double pattern_ratio = 0.0;
  Vec3 pattern_offset = Vec3::Zero();
  GridBounds pattern_bounds{};
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthScene {
  MatchSet matches;
  std::vector<bool> gt;
  std::vector<Vec3> anchor_centers;
  std::vector<ScaledDq> anchor_motions;
  double anchor_radius = 0.0;

  /// Noise-free ground-truth field.
  Vec3 true_field(const Vec3& x) const;
};

SynthScene synth_generate(const SynthSpec& spec);

}  // namespace emdq
