#pragma once

// Ground-truthed scenes and timing loops shared by `emdq bench`, the
// acceptance run and the micro-benchmarks.

#include "emdq/kernels.hpp"
#include "emdq/metrics.hpp"
#include "emdq/synth.hpp"

#include <cstdint>
#include <vector>

namespace emdq {

/// 2D sweep scene: N matches in 800x600 px, 3 anchors, 2 px noise.
SynthSpec sweep_spec(double outlier_ratio, std::uint64_t seed, std::size_t n = 1000);

/// Repeating-pattern scene: 30% uniform outliers plus 15% matches in the
/// left half that follow the true field shifted by 80 px.
SynthSpec pattern_spec(std::uint64_t seed);

/// 3D scene in metre-like units (0.1 x 0.08 x 0.02, 1 mm noise per axis).
SynthSpec spec_3d(double inlier_ratio, std::size_t n, std::uint64_t seed);

struct SceneScore {
  Metrics emdq;
  Metrics r1p;
  double ms = 0.0;
  int em_iterations = 0;
};

/// Runs the full pipeline with default_config (seeded with spec.seed) and
/// scores both the final labels and the raw R1P-RNSC inlier union.
SceneScore score_scene(const SynthSpec& spec, Exec exec = Exec::parallel);

struct SweepRow {
  double outlier_ratio = 0.0;
  int seeds = 0;
  double f_emdq = 0.0, f_r1p = 0.0;
  double errors_emdq = 0.0, errors_r1p = 0.0;
  double precision_emdq = 0.0, precision_r1p = 0.0;
  double recall_emdq = 0.0, recall_r1p = 0.0;
  double ms = 0.0;
};

/// Mean scores over seeds first_seed .. first_seed + seeds - 1.
SweepRow sweep_row(double outlier_ratio, int seeds, std::uint64_t first_seed,
                   Exec exec = Exec::parallel);

struct Timing {
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

/// Wall time of filter_matches on a sweep scene, over `runs` repetitions.
Timing time_pipeline(std::size_t n, double outlier_ratio, int runs, std::uint64_t seed,
                     Exec exec = Exec::parallel);

/// Wall time of a 17x13 field grid (800x600, step 50) built from a filtered
/// N=1000, 50% outlier scene. Filtering is not timed.
Timing time_grid(int runs, std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace emdq
