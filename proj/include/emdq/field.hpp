#pragma once

#include "emdq/core.hpp"
#include "emdq/em.hpp"
#include "emdq/kdtree.hpp"

#include <array>
#include <span>
#include <vector>

namespace emdq {

/// Minimum blend support for a sample to count as valid.
inline constexpr double kSupportMin = 0.01;

struct FieldSample {
  Vec3 query = Vec3::Zero();
  Vec3 displaced = Vec3::Zero();
  double support = 0.0;
  bool valid = false;
};

struct GridBounds {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

/// Regular lattice, x varying fastest, then y, then z.
struct FieldGrid {
  std::array<std::size_t, 3> shape{1, 1, 1};
  std::vector<FieldSample> samples;
};

/// Dense evaluation of the converged deformation field. Off-match points
/// blend the transforms of their nearest labeled inliers with weights
/// exp(-|p - x_j|^2 / 2r^2) * p_j.
class DeformationField {
 public:
  DeformationField(const MatchSet& m, const EmState& state, const LabelResult& labels,
                   const Config& cfg);

  int dim() const { return dim_; }
  std::size_t inlier_count() const { return ids_.size(); }

  FieldSample sample(const Vec3& pt) const;
  std::vector<FieldSample> query(std::span<const Vec3> pts, Exec exec = Exec::parallel) const;
  FieldGrid grid(const GridBounds& bounds, double step, Exec exec = Exec::parallel) const;

 private:
  struct Scratch {
    std::vector<Neighbor> found;
    std::vector<double> w;
    std::vector<DualQuat> dq;
  };
  FieldSample sample(const Vec3& pt, Scratch& s) const;

  int dim_;
  double r_;
  std::size_t k_;
  std::vector<std::size_t> ids_;  // inlier match indices
  std::vector<DualQuat> q_;
  std::vector<double> mu_, p_;
  KdTree tree_;
};

/// Lattice points lo + k * step along every axis up to hi. Throws Error
/// when step <= 0 or hi < lo on any used axis.
std::vector<Vec3> lattice_points(const GridBounds& bounds, double step, int dim,
                                 std::array<std::size_t, 3>* shape = nullptr);

std::vector<FieldSample> query_field(const MatchSet& m, const EmState& state,
                                     const LabelResult& labels, std::span<const Vec3> pts,
                                     const Config& cfg, Exec exec = Exec::parallel);

FieldGrid grid_field(const MatchSet& m, const EmState& state, const LabelResult& labels,
                     const GridBounds& bounds, double step, const Config& cfg,
                     Exec exec = Exec::parallel);

}  // namespace emdq
