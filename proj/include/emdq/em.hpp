#pragma once

#include "emdq/core.hpp"
#include "emdq/dual_quat.hpp"
#include "emdq/kernels.hpp"
#include "emdq/r1p_ransac.hpp"

#include <cstdint>
#include <vector>

namespace emdq {

/// Per-match EM state. q[i], mu[i] realize the discrete transform g_i;
/// the field at x_i is the blend of neighboring g_j weighted by
/// edge_weight = w_distance * p_j.
struct EmState {
  int dim = 2;
  std::vector<DualQuat> q;
  std::vector<double> mu;
  std::vector<double> p;  // holds the seeding support T_o until the first E-step
  double sigma = 1.0;
  double gamma = 0.5;
  double sigma_floor = 0.0;
  bool seeded = true;  // p still holds T_o seeds; cleared by the first E-step
  NeighborGraph graph;
  std::vector<double> edge_weight;

  // Results of the latest M-step.
  std::vector<DualQuat> q_bar;
  std::vector<double> mu_bar;
  std::vector<Vec3> field_at_x;
  std::vector<double> residual;
  std::vector<std::uint8_t> isolated;

  std::size_t size() const { return q.size(); }
};

NeighborGraph build_neighbors(const MatchSet& m, const Config& cfg, Exec exec = Exec::parallel);

/// Seeds q_i, mu_i from the largest-support hypothesis containing i and
/// sets p_i = T_o (0 and identity for uncovered matches).
EmState init_from_hypotheses(const MatchSet& m, const RansacOutcome& out, const Config& cfg,
                             Exec exec = Exec::parallel);

/// 2 pi sigma^2 (1 - gamma) / gamma * a
double outlier_term(double sigma, double gamma, double a);

/// Posterior update followed by the edge-weight refresh. Returns the mean
/// absolute change of p.
double e_step(EmState& s, const MatchSet& m, const Config& cfg, Exec exec = Exec::parallel);

/// Re-blends the field at every match, updates sigma, and resets each g_i
/// to the blended motion plus the translation that lands exactly on y_i.
/// While p still holds the T_o seeds, sigma keeps its initial value.
void m_step(EmState& s, const MatchSet& m, const Config& cfg, Exec exec = Exec::parallel);

struct EmReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> delta_history;  // mean |dp| from the 2nd iteration on
  std::vector<double> sigma_history;
};

struct EmResult {
  LabelResult labels;
  EmState state;
  EmReport report;
};

/// Alternates M- and E-steps until mean |dp| < theta or max_em_iters, then
/// labels i inlier iff p_i > p_min and |y_i - f(x_i)| < H.
EmResult run_em(const MatchSet& m, const RansacOutcome& out, const Config& cfg,
                Exec exec = Exec::parallel);

LabelResult make_labels(const EmState& s, const Config& cfg);

}  // namespace emdq
