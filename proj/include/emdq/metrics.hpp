#pragma once

#include "emdq/core.hpp"

#include <vector>

namespace emdq {

struct Metrics {
  std::size_t n_errors = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double recall = 0.0;
  double precision = 0.0;
  double fscore = 0.0;
  bool recall_undefined = false;     // no ground-truth inliers
  bool precision_undefined = false;  // no predicted inliers
};

double fscore(double recall, double precision);

/// Inlier is the positive class. Throws Error on length mismatch.
Metrics compute_metrics(const std::vector<bool>& pred, const std::vector<bool>& gt);
inline Metrics compute_metrics(const LabelResult& pred, const std::vector<bool>& gt) {
  return compute_metrics(pred.inlier, gt);
}

}  // namespace emdq
