#include "emdq/bench.hpp"

#include "emdq/field.hpp"
#include "emdq/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace emdq {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Timing summarize(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {median, v.front(), v.back()};
}

}  // namespace

SynthSpec sweep_spec(double outlier_ratio, std::uint64_t seed, std::size_t n) {
  SynthSpec s;
  s.n = n;
  s.outlier_ratio = outlier_ratio;
  s.seed = seed;
  return s;
}

SynthSpec pattern_spec(std::uint64_t seed) {
  SynthSpec s;
  s.outlier_ratio = 0.3;
  s.pattern_ratio = 0.15;
  s.pattern_bounds = {Vec3(0.0, 0.0, 0.0), Vec3(400.0, 600.0, 0.0)};
  s.pattern_offset = Vec3(80.0, 0.0, 0.0);
  s.seed = seed;
  return s;
}

SynthSpec spec_3d(double inlier_ratio, std::size_t n, std::uint64_t seed) {
  SynthSpec s;
  s.dim = 3;
  s.n = n;
  s.outlier_ratio = 1.0 - inlier_ratio;
  s.bounds = {Vec3(0.0, 0.0, 0.0), Vec3(0.1, 0.08, 0.02)};
  s.noise_sigma = 0.001;
  s.seed = seed;
  return s;
}

SceneScore score_scene(const SynthSpec& spec, Exec exec) {
  const SynthScene scene = synth_generate(spec);
  Config cfg = default_config(scene.matches);
  cfg.seed = spec.seed;
  const auto t0 = Clock::now();
  const FilterResult res = filter_matches(scene.matches, cfg, exec);
  SceneScore out;
  out.ms = ms_since(t0);
  out.emdq = compute_metrics(res.labels(), scene.gt);
  out.r1p = compute_metrics(ransac_labels(res.ransac, scene.matches.size()), scene.gt);
  out.em_iterations = res.em.report.iterations;
  return out;
}

SweepRow sweep_row(double outlier_ratio, int seeds, std::uint64_t first_seed, Exec exec) {
  SweepRow row;
  row.outlier_ratio = outlier_ratio;
  row.seeds = seeds;
  for (int k = 0; k < seeds; ++k) {
    const SceneScore s = score_scene(sweep_spec(outlier_ratio, first_seed + static_cast<std::uint64_t>(k)), exec);
    row.f_emdq += s.emdq.fscore;
    row.f_r1p += s.r1p.fscore;
    row.errors_emdq += static_cast<double>(s.emdq.n_errors);
    row.errors_r1p += static_cast<double>(s.r1p.n_errors);
    row.precision_emdq += s.emdq.precision;
    row.precision_r1p += s.r1p.precision;
    row.recall_emdq += s.emdq.recall;
    row.recall_r1p += s.r1p.recall;
    row.ms += s.ms;
  }
  if (seeds > 0) {
    const double inv = 1.0 / seeds;
    for (double* v : {&row.f_emdq, &row.f_r1p, &row.errors_emdq, &row.errors_r1p,
                      &row.precision_emdq, &row.precision_r1p, &row.recall_emdq,
                      &row.recall_r1p, &row.ms})
      *v *= inv;
  }
  return row;
}

Timing time_pipeline(std::size_t n, double outlier_ratio, int runs, std::uint64_t seed,
                     Exec exec) {
  if (runs < 1) throw Error("time_pipeline: runs must be >= 1");
  const SynthScene scene = synth_generate(sweep_spec(outlier_ratio, seed, n));
  Config cfg = default_config(scene.matches);
  cfg.seed = seed;
  std::vector<double> ms;
  for (int k = 0; k < runs; ++k) {
    const auto t0 = Clock::now();
    const FilterResult res = filter_matches(scene.matches, cfg, exec);
    ms.push_back(ms_since(t0));
    if (res.labels().size() != n) throw Error("time_pipeline: bad label count");
  }
  return summarize(std::move(ms));
}

Timing time_grid(int runs, std::uint64_t seed, Exec exec) {
  if (runs < 1) throw Error("time_grid: runs must be >= 1");
  const SynthScene scene = synth_generate(sweep_spec(0.5, seed));
  Config cfg = default_config(scene.matches);
  cfg.seed = seed;
  const FilterResult res = filter_matches(scene.matches, cfg, exec);
  const GridBounds bounds{Vec3(0.0, 0.0, 0.0), Vec3(800.0, 600.0, 0.0)};
  std::vector<double> ms;
  for (int k = 0; k < runs; ++k) {
    const auto t0 = Clock::now();
    const FieldGrid g = grid_field(scene.matches, res.em.state, res.labels(), bounds, 50.0, cfg, exec);
    ms.push_back(ms_since(t0));
    if (g.samples.size() != 17 * 13) throw Error("time_grid: unexpected lattice size");
  }
  return summarize(std::move(ms));
}

}  // namespace emdq
