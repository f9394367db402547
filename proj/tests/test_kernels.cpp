#include "emdq/kernels.hpp"

#include "emdq/bench.hpp"
#include "emdq/field.hpp"
#include "emdq/pipeline.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <cstring>

using namespace emdq;

namespace {

// Bitwise comparison, so -0.0 vs 0.0 or NaN payloads also count.
template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

struct Fixture {
  SynthScene scene = synth_generate(sweep_spec(0.5, 11));
  Config cfg = default_config(scene.matches);
  RansacOutcome out = ransac_run(scene.matches, cfg);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

class Threads : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = omp_get_max_threads(); omp_set_num_threads(4); }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

}  // namespace

TEST_F(Threads, KnnGraph) {
  const auto& f = fixture();
  NeighborGraph a, b;
  kernels::serial::knn_graph(f.scene.matches, f.cfg.n_neighbor, f.cfg.r, a);
  kernels::parallel::knn_graph(f.scene.matches, f.cfg.n_neighbor, f.cfg.r, b);
  EXPECT_EQ(a.stride, b.stride);
  EXPECT_EQ(a.index, b.index);
  EXPECT_TRUE(same_bits(a.w_distance, b.w_distance));
}

TEST_F(Threads, PosteriorsAndEdgeWeights) {
  const auto& f = fixture();
  EmState s = init_from_hypotheses(f.scene.matches, f.out, f.cfg, Exec::serial);
  m_step(s, f.scene.matches, f.cfg, Exec::serial);
  const double ot = outlier_term(s.sigma, s.gamma, f.cfg.a);
  std::vector<double> pa(s.size()), pb(s.size());
  kernels::serial::posteriors(s.residual, s.sigma, ot, pa);
  kernels::parallel::posteriors(s.residual, s.sigma, ot, pb);
  EXPECT_TRUE(same_bits(pa, pb));
  std::vector<double> ea(s.edge_weight.size()), eb(s.edge_weight.size());
  kernels::serial::edge_weights(s.graph, pa, ea);
  kernels::parallel::edge_weights(s.graph, pa, eb);
  EXPECT_TRUE(same_bits(ea, eb));
}

TEST_F(Threads, MStep) {
  const auto& f = fixture();
  EmState a = init_from_hypotheses(f.scene.matches, f.out, f.cfg, Exec::serial);
  EmState b = a;
  for (int it = 0; it < 3; ++it) {
    m_step(a, f.scene.matches, f.cfg, Exec::serial);
    m_step(b, f.scene.matches, f.cfg, Exec::parallel);
    e_step(a, f.scene.matches, f.cfg, Exec::serial);
    e_step(b, f.scene.matches, f.cfg, Exec::parallel);
  }
  EXPECT_EQ(a.q, b.q);
  EXPECT_TRUE(same_bits(a.mu, b.mu));
  EXPECT_TRUE(same_bits(a.p, b.p));
  EXPECT_TRUE(same_bits(a.residual, b.residual));
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST_F(Threads, FullPipelineAndField) {
  const auto& f = fixture();
  const FilterResult a = filter_matches(f.scene.matches, f.cfg, Exec::serial);
  const FilterResult b = filter_matches(f.scene.matches, f.cfg, Exec::parallel);
  EXPECT_EQ(a.labels().inlier, b.labels().inlier);
  EXPECT_TRUE(same_bits(a.labels().posterior, b.labels().posterior));
  EXPECT_TRUE(same_bits(a.labels().residual, b.labels().residual));
  EXPECT_EQ(a.em.report.iterations, b.em.report.iterations);

  const GridBounds box{Vec3(0, 0, 0), Vec3(800, 600, 0)};
  const FieldGrid ga = grid_field(f.scene.matches, a.em.state, a.labels(), box, 25.0, f.cfg, Exec::serial);
  const FieldGrid gb = grid_field(f.scene.matches, a.em.state, a.labels(), box, 25.0, f.cfg, Exec::parallel);
  ASSERT_EQ(ga.samples.size(), gb.samples.size());
  for (std::size_t i = 0; i < ga.samples.size(); ++i) {
    EXPECT_EQ(ga.samples[i].displaced, gb.samples[i].displaced);
    EXPECT_EQ(ga.samples[i].support, gb.samples[i].support);
    EXPECT_EQ(ga.samples[i].valid, gb.samples[i].valid);
  }
}

TEST(ThreadCount, OneVersusFourThreads) {
  const auto& f = fixture();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const FilterResult a = filter_matches(f.scene.matches, f.cfg);
  omp_set_num_threads(4);
  const FilterResult b = filter_matches(f.scene.matches, f.cfg);
  omp_set_num_threads(saved);
  EXPECT_EQ(a.labels().inlier, b.labels().inlier);
  EXPECT_TRUE(same_bits(a.labels().posterior, b.labels().posterior));
}
