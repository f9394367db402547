#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emdq {

// Points are always stored as 3-vectors; 2D data lives in the z = 0 plane.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Base for inputs the algorithms cannot work with (CLI exit code 3).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class DegenerateScaleError : public DegenerateInputError {
 public:
  using DegenerateInputError::DegenerateInputError;
};

class DegenerateGeometryError : public DegenerateInputError {
 public:
  using DegenerateInputError::DegenerateInputError;
};

/// Paired point clouds: match i links x[i] to y[i].
struct MatchSet {
  int dim = 2;
  std::vector<Vec3> x;
  std::vector<Vec3> y;

  std::size_t size() const { return x.size(); }

  /// Validating constructor. Throws Error on size mismatch, a bad dim,
  /// non-finite coordinates or a non-zero z component in 2D.
  static MatchSet make(int dim, std::vector<Vec3> x, std::vector<Vec3> y);
  void validate() const;
};

/// y = mu * (R x + t)
struct RigidTransform {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  double mu = 1.0;

  Vec3 apply(const Vec3& p) const { return mu * (R * p + t); }
  bool is_valid(double tol = 1e-9) const;
};

struct LabelResult {
  std::vector<bool> inlier;
  std::vector<double> posterior;
  std::vector<double> residual;

  std::size_t size() const { return inlier.size(); }
  std::size_t count_inliers() const;
};

struct Config {
  double H = 20.0;
  int t_min = 5;
  double ransac_p = 0.95;
  int n_reweight_iters = 3;
  double r = 50.0;
  double a = 1e-5;
  double p_min = 0.5;
  double theta = 0.005;
  int n_neighbor = 16;
  bool sparse = false;
  std::size_t n_sparse = 0;  // 0: min(N, 200)
  int max_em_iters = 50;
  std::uint64_t seed = 0;

  void validate() const;

  std::size_t sparse_count(std::size_t n) const;
  double sigma_floor() const { return 1e-3 * H; }

  static Config defaults_2d() { return {}; }
  /// 2D defaults with H, r, a and the neighbor count adapted to the
  /// cloud scale s.
  static Config defaults_3d(double scale);
};

/// RMS spread of both clouds about their means.
double scale_estimate(const MatchSet& m);

/// Default configuration for m: 2D defaults, or scale-adapted 3D defaults.
Config default_config(const MatchSet& m);

/// Set one parameter by its file/CLI key (H, t_min, ransac_p, r, a, p_min,
/// theta, n_neighbor, n_sparse, sparse, n_reweight_iters, max_em_iters,
/// seed). Throws ConfigError on unknown keys or unparsable values.
void set_config_value(Config& cfg, std::string_view key, std::string_view value);

/// Applies a key=value file on top of cfg. Blank lines and '#' comments are
/// ignored.
void load_config_file(Config& cfg, const std::filesystem::path& path);

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; independent of the standard
/// library's distribution implementation.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace emdq
