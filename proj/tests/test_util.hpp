#pragma once

// Small scene builders and independent oracles shared by the unit tests.

#include "emdq/core.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <vector>

namespace emdq::testing {

inline Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

inline Mat3 rot_axis(double angle, Vec3 axis) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

/// n points uniform in [0, w] x [0, h] (x [0, d] in 3D).
inline std::vector<Vec3> random_points(std::size_t n, int dim, std::uint64_t seed, double w = 800.0,
                                       double h = 600.0, double d = 200.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> out(n, Vec3::Zero());
  for (auto& p : out) {
    p.x() = w * u(rng);
    p.y() = h * u(rng);
    if (dim == 3) p.z() = d * u(rng);
  }
  return out;
}

/// Every match follows y = mu (R x + t) exactly.
inline MatchSet rigid_scene(std::size_t n, int dim, const Mat3& R, const Vec3& t, double mu,
                            std::uint64_t seed) {
  MatchSet m;
  m.dim = dim;
  m.x = random_points(n, dim, seed);
  for (const Vec3& x : m.x) {
    Vec3 y = mu * (R * x + t);
    if (dim == 2) y.z() = 0.0;
    m.y.push_back(y);
  }
  return m;
}

/// Closed-form least-squares similarity (Umeyama) over all matches; used as
/// an independent check that a scene is not globally rigid.
inline double umeyama_rms(const MatchSet& m) {
  const int d = m.dim;
  Eigen::MatrixXd X(d, static_cast<Eigen::Index>(m.size())), Y(d, static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    X.col(static_cast<Eigen::Index>(i)) = m.x[i].head(d);
    Y.col(static_cast<Eigen::Index>(i)) = m.y[i].head(d);
  }
  const Eigen::MatrixXd T = Eigen::umeyama(X, Y, true);
  const Eigen::MatrixXd A = T.topLeftCorner(d, d);
  const Eigen::VectorXd b = T.topRightCorner(d, 1);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) sq += (A * X.col(i) + b - Y.col(i)).squaredNorm();
  return std::sqrt(sq / static_cast<double>(X.cols()));
}

/// 50 exact rigid matches (rotation 0.2 rad about z, t = (15, -10),
/// mu = 1.1), then 50 whose y is pushed 150-400 px in a random direction.
inline MatchSet cluster_plus_far_outliers(std::uint64_t seed) {
  const Mat3 R = rot_z(0.2);
  const Vec3 t(15, -10, 0);
  MatchSet m = rigid_scene(50, 2, R, t, 1.1, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vec3 x(800 * u(rng), 600 * u(rng), 0.0);
    const double ang = 2 * M_PI * u(rng), len = 150 + 250 * u(rng);
    m.x.push_back(x);
    m.y.push_back(1.1 * (R * x + t) + len * Vec3(std::cos(ang), std::sin(ang), 0.0));
  }
  return m;
}

/// RANSAC seed for which only the true cluster of cluster_plus_far_outliers(8)
/// reaches t_min = 5.
inline constexpr std::uint64_t kHalfInlierSeed = 2;

}  // namespace emdq::testing
