#include "emdq/core.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

using namespace emdq;
using namespace emdq::testing;

TEST(MatchSet, MakeAcceptsValidInput) {
  const MatchSet m = MatchSet::make(2, {Vec3(1, 2, 0), Vec3(3, 4, 0)}, {Vec3(0, 0, 0), Vec3(5, 6, 0)});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.dim, 2);
}

TEST(MatchSet, RejectsMalformedInput) {
  EXPECT_THROW(MatchSet::make(2, {Vec3(1, 2, 0)}, {}), Error);
  EXPECT_THROW(MatchSet::make(4, {Vec3(1, 2, 0)}, {Vec3(1, 2, 0)}), Error);
  EXPECT_THROW(MatchSet::make(2, {}, {}), Error);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(MatchSet::make(3, {Vec3(nan, 0, 0)}, {Vec3(0, 0, 0)}), Error);
  EXPECT_THROW(MatchSet::make(2, {Vec3(0, 0, 1)}, {Vec3(0, 0, 0)}), Error);
  EXPECT_NO_THROW(MatchSet::make(3, {Vec3(0, 0, 1)}, {Vec3(0, 0, 0)}));
}

TEST(RigidTransform, ApplyAndValidity) {
  RigidTransform t;
  t.R = rot_z(M_PI / 2);
  t.t = Vec3(1, 0, 0);
  t.mu = 2.0;
  const Vec3 y = t.apply(Vec3(1, 0, 0));
  EXPECT_NEAR(y.x(), 2.0, 1e-12);
  EXPECT_NEAR(y.y(), 2.0, 1e-12);
  EXPECT_TRUE(t.is_valid());
  t.R.col(0) = -t.R.col(0);  // det -1
  EXPECT_FALSE(t.is_valid());
  RigidTransform bad_scale;
  bad_scale.mu = 0.0;
  EXPECT_FALSE(bad_scale.is_valid());
}

TEST(LabelResult, CountInliers) {
  LabelResult l;
  l.inlier = {true, false, true, true};
  EXPECT_EQ(l.count_inliers(), 3u);
}

TEST(Config, DefaultsAreValid) {
  const Config c = Config::defaults_2d();
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.H, 20.0);
  EXPECT_EQ(c.t_min, 5);
  EXPECT_DOUBLE_EQ(c.ransac_p, 0.95);
  EXPECT_EQ(c.n_reweight_iters, 3);
  EXPECT_DOUBLE_EQ(c.r, 50.0);
  EXPECT_DOUBLE_EQ(c.a, 1e-5);
  EXPECT_DOUBLE_EQ(c.p_min, 0.5);
  EXPECT_DOUBLE_EQ(c.theta, 0.005);
  EXPECT_EQ(c.n_neighbor, 16);
  EXPECT_DOUBLE_EQ(c.sigma_floor(), 0.02);
}

TEST(Config, Defaults3dScaleWithS) {
  const Config c = Config::defaults_3d(2.0);
  EXPECT_DOUBLE_EQ(c.H, 0.2);
  EXPECT_DOUBLE_EQ(c.r, 0.6);
  EXPECT_DOUBLE_EQ(c.a, 10.0);
  EXPECT_EQ(c.n_neighbor, 50);
  EXPECT_THROW(Config::defaults_3d(0.0), DegenerateScaleError);
  EXPECT_THROW(Config::defaults_3d(std::numeric_limits<double>::infinity()), DegenerateScaleError);
}

TEST(Config, ValidateRejectsOutOfRange) {
  auto bad = [](auto mutate) {
    Config c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](Config& c) { c.H = 0.0; });
  bad([](Config& c) { c.r = -1.0; });
  bad([](Config& c) { c.a = 0.0; });
  bad([](Config& c) { c.theta = 0.0; });
  bad([](Config& c) { c.ransac_p = 1.0; });
  bad([](Config& c) { c.p_min = 0.0; });
  bad([](Config& c) { c.t_min = 0; });
  bad([](Config& c) { c.n_neighbor = 0; });
  bad([](Config& c) { c.n_reweight_iters = 0; });
  bad([](Config& c) { c.max_em_iters = 0; });
}

TEST(Config, SparseCount) {
  Config c;
  EXPECT_EQ(c.sparse_count(1000), 200u);
  EXPECT_EQ(c.sparse_count(50), 50u);
  c.n_sparse = 300;
  EXPECT_EQ(c.sparse_count(1000), 300u);
}

TEST(ScaleEstimate, HandEvaluated) {
  // means (1,0) and (0,1); squared spreads 2 + 2 over 2N = 4 -> s = 1
  const MatchSet m = MatchSet::make(2, {Vec3(0, 0, 0), Vec3(2, 0, 0)}, {Vec3(0, 0, 0), Vec3(0, 2, 0)});
  EXPECT_DOUBLE_EQ(scale_estimate(m), 1.0);
}

TEST(ScaleEstimate, DegenerateClouds) {
  const MatchSet one = MatchSet::make(3, {Vec3(1, 1, 1)}, {Vec3(1, 1, 1)});
  EXPECT_THROW(scale_estimate(one), DegenerateScaleError);
  const MatchSet same = MatchSet::make(3, {Vec3(1, 1, 1), Vec3(1, 1, 1)}, {Vec3(2, 2, 2), Vec3(2, 2, 2)});
  EXPECT_THROW(default_config(same), DegenerateScaleError);
}

TEST(ScaleEstimate, DefaultConfigFollowsDimension) {
  const MatchSet m2 = MatchSet::make(2, {Vec3(0, 0, 0), Vec3(2, 0, 0)}, {Vec3(0, 0, 0), Vec3(0, 2, 0)});
  EXPECT_DOUBLE_EQ(default_config(m2).H, 20.0);
  const MatchSet m3 = MatchSet::make(3, {Vec3(0, 0, 0), Vec3(2, 0, 0)}, {Vec3(0, 0, 0), Vec3(0, 2, 0)});
  EXPECT_DOUBLE_EQ(default_config(m3).H, 0.1);
}

TEST(ConfigKeys, SetAndReject) {
  Config c;
  set_config_value(c, "H", " 12.5 ");
  set_config_value(c, "t_min", "7");
  set_config_value(c, "sparse", "true");
  set_config_value(c, "seed", "42");
  set_config_value(c, "n_sparse", "150");
  EXPECT_DOUBLE_EQ(c.H, 12.5);
  EXPECT_EQ(c.t_min, 7);
  EXPECT_TRUE(c.sparse);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.n_sparse, 150u);
  EXPECT_THROW(set_config_value(c, "nope", "1"), ConfigError);
  EXPECT_THROW(set_config_value(c, "H", "1.5x"), ConfigError);
  EXPECT_THROW(set_config_value(c, "t_min", "2.5"), ConfigError);
  EXPECT_THROW(set_config_value(c, "sparse", "maybe"), ConfigError);
}

TEST(ConfigKeys, LoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "emdq_test_core.cfg";
  {
    std::ofstream out(path);
    out << "# thresholds\n\nH = 8   # px\nr=30\n  p_min = 0.6\n";
  }
  Config c;
  load_config_file(c, path);
  EXPECT_DOUBLE_EQ(c.H, 8.0);
  EXPECT_DOUBLE_EQ(c.r, 30.0);
  EXPECT_DOUBLE_EQ(c.p_min, 0.6);
  {
    std::ofstream out(path);
    out << "H 8\n";
  }
  EXPECT_THROW(load_config_file(c, path), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config_file(c, path), ConfigError);
}

TEST(Rng, UniformIndexInRangeAndDeterministic) {
  Rng a(9), b(9);
  std::set<std::size_t> seen;
  for (int k = 0; k < 2000; ++k) {
    const std::size_t v = uniform_index(a, 7);
    EXPECT_LT(v, 7u);
    EXPECT_EQ(v, uniform_index(b, 7));
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_THROW(uniform_index(a, 0), Error);
}
