// Serial reference vs OpenMP kernels on a 50% outlier scene.

#include "emdq/bench.hpp"
#include "emdq/field.hpp"
#include "emdq/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace emdq;

namespace {

struct Scene {
  explicit Scene(std::size_t n)
      : matches(synth_generate(sweep_spec(0.5, 1, n)).matches),
        cfg(default_config(matches)),
        result(filter_matches(matches, cfg)) {}
  MatchSet matches;
  Config cfg;
  FilterResult result;
};

const Scene& scene(std::size_t n) {
  static std::map<std::size_t, Scene> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Scene(n)).first;
  return it->second;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_KnnGraph(benchmark::State& st) {
  const Scene& s = scene(static_cast<std::size_t>(st.range(0)));
  NeighborGraph g;
  for (auto _ : st) {
    kernels::knn_graph(exec_of(st), s.matches, s.cfg.n_neighbor, s.cfg.r, g);
    benchmark::DoNotOptimize(g.index.data());
  }
}

void BM_EStep(benchmark::State& st) {
  const Scene& s = scene(static_cast<std::size_t>(st.range(0)));
  EmState state = s.result.em.state;
  for (auto _ : st) benchmark::DoNotOptimize(e_step(state, s.matches, s.cfg, exec_of(st)));
}

void BM_MStep(benchmark::State& st) {
  const Scene& s = scene(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    st.PauseTiming();
    EmState state = s.result.em.state;
    st.ResumeTiming();
    m_step(state, s.matches, s.cfg, exec_of(st));
    benchmark::DoNotOptimize(state.q.data());
  }
}

void BM_FieldGrid(benchmark::State& st) {
  const Scene& s = scene(static_cast<std::size_t>(st.range(0)));
  const DeformationField f(s.matches, s.result.em.state, s.result.labels(), s.cfg);
  for (auto _ : st) {
    FieldGrid g = f.grid({Vec3(0, 0, 0), Vec3(800, 600, 0)}, 10.0, exec_of(st));
    benchmark::DoNotOptimize(g.samples.data());
  }
}

void BM_Pipeline(benchmark::State& st) {
  const Scene& s = scene(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    FilterResult r = filter_matches(s.matches, s.cfg, exec_of(st));
    benchmark::DoNotOptimize(r.em.labels.inlier.size());
  }
}

// Second argument: 0 serial reference, 1 OpenMP.
#define EMDQ_KERNEL_BENCH(fn) \
  BENCHMARK(fn)->ArgsProduct({{1000, 4000}, {0, 1}})->Unit(benchmark::kMicrosecond)

EMDQ_KERNEL_BENCH(BM_KnnGraph);
EMDQ_KERNEL_BENCH(BM_EStep);
EMDQ_KERNEL_BENCH(BM_MStep);
EMDQ_KERNEL_BENCH(BM_FieldGrid);
EMDQ_KERNEL_BENCH(BM_Pipeline);

}  // namespace

BENCHMARK_MAIN();
