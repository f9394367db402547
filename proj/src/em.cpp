#include "emdq/em.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emdq {

namespace {

constexpr double kGammaLo = 0.05;
constexpr double kGammaHi = 0.95;

}  // namespace

NeighborGraph build_neighbors(const MatchSet& m, const Config& cfg, Exec exec) {
  NeighborGraph g;
  kernels::knn_graph(exec, m, cfg.n_neighbor, cfg.r, g);
  return g;
}

EmState init_from_hypotheses(const MatchSet& m, const RansacOutcome& out, const Config& cfg,
                             Exec exec) {
  cfg.validate();
  const std::size_t n = m.size();
  EmState s;
  s.dim = m.dim;
  s.q.assign(n, DualQuat::identity());
  s.mu.assign(n, 1.0);
  s.p.assign(n, 0.0);
  s.sigma_floor = cfg.sigma_floor();
  s.gamma = out.empty() ? kGammaLo : std::clamp(out.gamma, kGammaLo, kGammaHi);

  // Largest support wins; ties keep the earlier hypothesis.
  std::vector<const TransformHypothesis*> seed(n, nullptr);
  for (const TransformHypothesis& h : out.hypotheses)
    for (std::size_t i : h.inliers)
      if (seed[i] == nullptr || h.support > seed[i]->support) seed[i] = &h;

  double sq = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seed[i] == nullptr) continue;
    const RigidTransform& t = seed[i]->transform;
    s.q[i] = dq_from_transform(t.R, t.t);
    s.mu[i] = t.mu;
    s.p[i] = static_cast<double>(seed[i]->support);
    sq += (m.y[i] - t.apply(m.x[i])).squaredNorm();
    ++covered;
  }
  const double rms = covered > 0 ? std::sqrt(sq / static_cast<double>(covered)) : 0.0;
  s.sigma = std::max(rms, cfg.H / 10.0);

  s.graph = build_neighbors(m, cfg, exec);
  s.edge_weight.assign(s.graph.index.size(), 0.0);
  kernels::edge_weights(exec, s.graph, s.p, s.edge_weight);

  s.q_bar = s.q;
  s.mu_bar = s.mu;
  s.field_at_x.resize(n);
  s.residual.resize(n);
  s.isolated.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    s.field_at_x[i] = dq_apply(m.dim, s.q[i], s.mu[i], m.x[i]);
    s.residual[i] = (m.y[i] - s.field_at_x[i]).norm();
  }
  return s;
}

double outlier_term(double sigma, double gamma, double a) {
  return 2.0 * std::numbers::pi * sigma * sigma * ((1.0 - gamma) / gamma) * a;
}

double e_step(EmState& s, const MatchSet& m, const Config& cfg, Exec exec) {
  const std::size_t n = m.size();
  std::vector<double> p_new(n);
  kernels::posteriors(exec, s.residual, s.sigma, outlier_term(s.sigma, s.gamma, cfg.a), p_new);
  double delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) delta += std::abs(p_new[i] - s.p[i]);
  s.p = std::move(p_new);
  s.seeded = false;
  kernels::edge_weights(exec, s.graph, s.p, s.edge_weight);
  return delta / static_cast<double>(n);
}

void m_step(EmState& s, const MatchSet& m, const Config& /*cfg*/, Exec exec) {
  const std::size_t n = m.size();
  std::vector<DualQuat> q_new(n);
  std::vector<double> mu_new(n);
  const BlendInputs in{&m, &s.graph, s.edge_weight, s.q, s.mu};
  const BlendOutputs outp{s.q_bar, s.mu_bar, s.field_at_x, s.residual, q_new, mu_new, s.isolated};
  kernels::blend(exec, in, outp);
  s.q = std::move(q_new);
  s.mu = std::move(mu_new);

  if (s.seeded) return;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.isolated[i] || !(s.p[i] > 0.0)) continue;
    num += s.p[i] * s.residual[i] * s.residual[i];
    den += s.p[i];
  }
  if (den > 0.0) s.sigma = std::sqrt(num / den);
  s.sigma = std::max(s.sigma, s.sigma_floor);
}

LabelResult make_labels(const EmState& s, const Config& cfg) {
  const std::size_t n = s.size();
  LabelResult out;
  out.inlier.resize(n);
  out.posterior = s.p;
  out.residual = s.residual;
  for (std::size_t i = 0; i < n; ++i)
    out.inlier[i] = s.p[i] > cfg.p_min && s.residual[i] < cfg.H;
  return out;
}

EmResult run_em(const MatchSet& m, const RansacOutcome& out, const Config& cfg, Exec exec) {
  EmResult r;
  r.state = init_from_hypotheses(m, out, cfg, exec);
  for (int it = 1; it <= cfg.max_em_iters; ++it) {
    m_step(r.state, m, cfg, exec);
    const double delta = e_step(r.state, m, cfg, exec);
    r.report.iterations = it;
    r.report.sigma_history.push_back(r.state.sigma);
    // The first E-step replaces the unnormalized T_o seeds; skip that change.
    if (it == 1) continue;
    r.report.delta_history.push_back(delta);
    if (delta < cfg.theta) {
      r.report.converged = true;
      break;
    }
  }
  r.labels = make_labels(r.state, cfg);
  return r;
}

}  // namespace emdq
