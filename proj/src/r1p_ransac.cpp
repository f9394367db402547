#include "emdq/r1p_ransac.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emdq {

namespace {

// Smallest singular value that still counts as rank, relative to the largest.
constexpr double kRankTol = 1e-12;

template <int D>
Mat3 rotation_from_cross_covariance(const Mat3& M3) {
  using MatD = Eigen::Matrix<double, D, D>;
  const MatD M = M3.template topLeftCorner<D, D>();
  Eigen::JacobiSVD<MatD> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= kRankTol * s(0))
    throw DegenerateGeometryError("weighted_rigid_fit: rank-deficient cross-covariance");
  MatD V = svd.matrixV();
  MatD R = svd.matrixU() * V.transpose();
  if (R.determinant() < 0.0) {
    V.col(D - 1) *= -1.0;
    R = svd.matrixU() * V.transpose();
  }
  Mat3 out = Mat3::Identity();
  out.template topLeftCorner<D, D>() = R;
  return out;
}

template <typename IndexOf>
ScaledRotation fit_impl(const MatchSet& m, std::size_t o, std::span<const double> w,
                        IndexOf index_of) {
  const Vec3& xo = m.x[o];
  const Vec3& yo = m.y[o];
  Mat3 M = Mat3::Zero();
  double nx2 = 0.0, ny2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double wk = w[k];
    if (wk == 0.0) continue;
    const std::size_t i = index_of(k);
    const Vec3 X = wk * (m.x[i] - xo);
    const Vec3 Y = wk * (m.y[i] - yo);
    M.noalias() += Y * X.transpose();
    nx2 += X.squaredNorm();
    ny2 += Y.squaredNorm();
  }
  if (!(nx2 > 0.0) || !(ny2 > 0.0))
    throw DegenerateGeometryError("weighted_rigid_fit: no weighted spread about control point");
  ScaledRotation fit;
  fit.R = m.dim == 2 ? rotation_from_cross_covariance<2>(M) : rotation_from_cross_covariance<3>(M);
  fit.mu = std::sqrt(ny2 / nx2);
  return fit;
}

}  // namespace

ScaledRotation weighted_rigid_fit(const MatchSet& m, std::size_t o, std::span<const double> w) {
  if (w.size() != m.size()) throw Error("weighted_rigid_fit: weight count mismatch");
  if (o >= m.size()) throw Error("weighted_rigid_fit: control index out of range");
  return fit_impl(m, o, w, [](std::size_t k) { return k; });
}

ScaledRotation weighted_rigid_fit(const MatchSet& m, std::size_t o, std::span<const double> w,
                                  std::span<const std::size_t> subset) {
  if (w.size() != subset.size()) throw Error("weighted_rigid_fit: weight count mismatch");
  if (o >= m.size()) throw Error("weighted_rigid_fit: control index out of range");
  return fit_impl(m, o, w, [subset](std::size_t k) { return subset[k]; });
}

double control_residual(const MatchSet& m, std::size_t o, const ScaledRotation& fit,
                        std::size_t i) {
  return (m.y[i] - m.y[o] - fit.mu * (fit.R * (m.x[i] - m.x[o]))).norm();
}

ReweightResult reweight_fit(const MatchSet& m, std::size_t o, const Config& cfg,
                            std::span<const std::size_t> subset) {
  if (o >= m.size()) throw Error("reweight_fit: control index out of range");
  std::vector<double> w(subset.size(), 1.0);
  ScaledRotation fit;
  for (int it = 0; it < cfg.n_reweight_iters; ++it) {
    fit = weighted_rigid_fit(m, o, w, subset);
    if (it + 1 < cfg.n_reweight_iters)
      for (std::size_t k = 0; k < subset.size(); ++k)
        w[k] = reweight(control_residual(m, o, fit, subset[k]), cfg.H);
  }

  ReweightResult out;
  out.transform.R = fit.R;
  out.transform.mu = fit.mu;
  out.transform.t = m.y[o] / fit.mu - fit.R * m.x[o];
  out.residuals.resize(m.size());
  out.weights.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.residuals[i] = control_residual(m, o, fit, i);
    out.weights[i] = reweight(out.residuals[i], cfg.H);
  }
  return out;
}

ReweightResult reweight_fit(const MatchSet& m, std::size_t o, const Config& cfg) {
  std::vector<std::size_t> all(m.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return reweight_fit(m, o, cfg, all);
}

double termination_threshold(double n, double gamma, double t_min, double p) {
  const double remaining = n - gamma * n;
  if (remaining <= t_min) return 0.0;
  return std::log(1.0 - p) / std::log(1.0 - t_min / remaining);
}

std::vector<bool> RansacOutcome::inlier_mask(std::size_t n) const {
  std::vector<bool> mask(n, false);
  for (std::size_t i : inlier_union) mask[i] = true;
  return mask;
}

namespace {

RansacOutcome run_impl(const MatchSet& m, const Config& cfg, std::span<const std::size_t> subset,
                       Rng& rng) {
  const std::size_t n = m.size();
  const std::size_t ns = subset.size();
  const std::size_t max_trials = 10 * n;

  RansacOutcome out;
  std::vector<bool> in_union(n, false);
  std::size_t union_count = 0;
  std::size_t subset_inliers = 0;
  std::vector<std::size_t> candidates;
  candidates.reserve(ns);

  while (out.trials < max_trials) {
    candidates.clear();
    for (std::size_t s : subset)
      if (!in_union[s]) candidates.push_back(s);
    if (candidates.empty()) break;
    if (static_cast<double>(ns - subset_inliers) <= static_cast<double>(cfg.t_min)) break;

    const std::size_t o = candidates[uniform_index(rng, candidates.size())];
    ++out.trials;

    try {
      ReweightResult rw = reweight_fit(m, o, cfg, subset);
      TransformHypothesis h;
      h.control = o;
      h.transform = rw.transform;
      for (std::size_t i = 0; i < n; ++i)
        if (rw.residuals[i] < cfg.H) h.inliers.push_back(i);
      h.support = h.inliers.size();
      if (h.support >= static_cast<std::size_t>(cfg.t_min)) {
        for (std::size_t i : h.inliers) {
          if (!in_union[i]) {
            in_union[i] = true;
            ++union_count;
          }
        }
        out.hypotheses.push_back(std::move(h));
        subset_inliers = 0;
        for (std::size_t s : subset) subset_inliers += in_union[s] ? 1 : 0;
      }
    } catch (const DegenerateGeometryError&) {
      // Failed trial; the control point stays a candidate.
    }

    out.gamma = static_cast<double>(union_count) / static_cast<double>(n);
    out.gamma_history.push_back(out.gamma);
    const double gamma_eff = static_cast<double>(subset_inliers) / static_cast<double>(ns);
    const double k_max = termination_threshold(static_cast<double>(ns), gamma_eff,
                                               static_cast<double>(cfg.t_min), cfg.ransac_p);
    if (static_cast<double>(out.trials) > k_max) break;
  }

  for (std::size_t i = 0; i < n; ++i)
    if (in_union[i]) out.inlier_union.push_back(i);
  return out;
}

}  // namespace

RansacOutcome ransac_run(const MatchSet& m, const Config& cfg) {
  cfg.validate();
  std::vector<std::size_t> all(m.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(cfg.seed);
  return run_impl(m, cfg, all, rng);
}

RansacOutcome ransac_run_sparse(const MatchSet& m, const Config& cfg) {
  cfg.validate();
  const std::size_t n = m.size();
  const std::size_t ns = cfg.sparse_count(n);
  Rng rng(cfg.seed);
  std::vector<std::size_t> subset(n);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  if (ns < n) {
    // Partial Fisher-Yates; sorted so candidate order is by match index.
    for (std::size_t i = 0; i < ns; ++i)
      std::swap(subset[i], subset[i + uniform_index(rng, n - i)]);
    subset.resize(ns);
    std::sort(subset.begin(), subset.end());
  }
  return run_impl(m, cfg, subset, rng);
}

}  // namespace emdq
