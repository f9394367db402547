#pragma once

#include "emdq/em.hpp"
#include "emdq/r1p_ransac.hpp"

namespace emdq {

struct FilterResult {
  RansacOutcome ransac;
  EmResult em;
  double ransac_ms = 0.0;
  double em_ms = 0.0;

  const LabelResult& labels() const { return em.labels; }
};

/// R1P-RNSC (sparse when cfg.sparse) followed by EMDQ.
FilterResult filter_matches(const MatchSet& m, const Config& cfg, Exec exec = Exec::parallel);

/// Labels taken straight from the R1P-RNSC inlier union (posterior 1/0,
/// residual 0).
LabelResult ransac_labels(const RansacOutcome& out, std::size_t n);

}  // namespace emdq
