#include "emdq/pipeline.hpp"

#include <chrono>

namespace emdq {

namespace {
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

FilterResult filter_matches(const MatchSet& m, const Config& cfg, Exec exec) {
  m.validate();
  cfg.validate();
  FilterResult r;
  auto t0 = Clock::now();
  r.ransac = cfg.sparse ? ransac_run_sparse(m, cfg) : ransac_run(m, cfg);
  r.ransac_ms = ms_since(t0);
  t0 = Clock::now();
  r.em = run_em(m, r.ransac, cfg, exec);
  r.em_ms = ms_since(t0);
  return r;
}

LabelResult ransac_labels(const RansacOutcome& out, std::size_t n) {
  LabelResult l;
  l.inlier = out.inlier_mask(n);
  l.posterior.resize(n);
  l.residual.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) l.posterior[i] = l.inlier[i] ? 1.0 : 0.0;
  return l;
}

}  // namespace emdq
