#pragma once

#include "emdq/core.hpp"

#include <span>
#include <vector>

namespace emdq {

struct ScaledRotation {
  Mat3 R = Mat3::Identity();
  double mu = 1.0;
};

/// Rotation and scale about control match o from weighted relative
/// coordinates: each column (x_i - x_o), (y_i - y_o) is multiplied by w_i,
/// R comes from the SVD of Y X^T (reflection corrected) and mu is the
/// ratio of the Frobenius norms of Y and X.
///
/// Throws DegenerateGeometryError when Y X^T has rank < 2 (weighted points
/// collinear through o, or all weight on o itself).
ScaledRotation weighted_rigid_fit(const MatchSet& m, std::size_t o, std::span<const double> w);

/// As above, restricted to the matches listed in `subset`; w is indexed in
/// parallel with subset.
ScaledRotation weighted_rigid_fit(const MatchSet& m, std::size_t o, std::span<const double> w,
                                  std::span<const std::size_t> subset);

/// min(H / d, 1), with d = 0 mapping to 1.
inline double reweight(double d, double H) { return d <= H ? 1.0 : H / d; }

/// |y_i - y_o - mu R (x_i - x_o)|
double control_residual(const MatchSet& m, std::size_t o, const ScaledRotation& fit,
                        std::size_t i);

struct ReweightResult {
  RigidTransform transform;
  std::vector<double> residuals;  // d_i for every match
  std::vector<double> weights;    // w_i from the final residuals
};

/// Alternates weighted_rigid_fit and re-weighting cfg.n_reweight_iters times
/// starting from unit weights, then recovers t = y_o / mu - R x_o.
ReweightResult reweight_fit(const MatchSet& m, std::size_t o, const Config& cfg);

/// Re-weighting over `subset` only; residuals and weights are still
/// reported for all matches.
ReweightResult reweight_fit(const MatchSet& m, std::size_t o, const Config& cfg,
                            std::span<const std::size_t> subset);

/// log(1 - p) / log(1 - t_min / (n - gamma n)). Returns 0 when
/// n - gamma n <= t_min (nothing left to find).
double termination_threshold(double n, double gamma, double t_min, double p);

struct TransformHypothesis {
  std::size_t control = 0;
  RigidTransform transform;
  std::vector<std::size_t> inliers;  // ascending
  std::size_t support = 0;           // inliers.size()
};

struct RansacOutcome {
  std::vector<TransformHypothesis> hypotheses;
  std::vector<std::size_t> inlier_union;  // ascending
  double gamma = 0.0;
  std::size_t trials = 0;
  std::vector<double> gamma_history;  // gamma after each trial

  bool empty() const { return hypotheses.empty(); }
  std::vector<bool> inlier_mask(std::size_t n) const;
};

/// Re-weighted 1-point RANSAC over all matches. Returns an empty outcome
/// (no hypotheses, gamma 0) when no trial reaches cfg.t_min support.
RansacOutcome ransac_run(const MatchSet& m, const Config& cfg);

/// Sparse variant: re-weighting uses a fixed random subset of
/// cfg.sparse_count(N) matches, inlier tests still run on all matches.
RansacOutcome ransac_run_sparse(const MatchSet& m, const Config& cfg);

}  // namespace emdq
