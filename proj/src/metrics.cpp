#include "emdq/metrics.hpp"

namespace emdq {

double fscore(double recall, double precision) {
  const double den = recall + precision;
  return den > 0.0 ? 2.0 * recall * precision / den : 0.0;
}

Metrics compute_metrics(const std::vector<bool>& pred, const std::vector<bool>& gt) {
  if (pred.size() != gt.size()) throw Error("metrics: prediction and ground truth differ in length");
  Metrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && gt[i]) ++m.tp;
    else if (pred[i]) ++m.fp;
    else if (gt[i]) ++m.fn;
    else ++m.tn;
  }
  m.n_errors = m.fp + m.fn;
  m.recall_undefined = m.tp + m.fn == 0;
  m.precision_undefined = m.tp + m.fp == 0;
  m.recall = m.recall_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.precision =
      m.precision_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.fscore = fscore(m.recall, m.precision);
  return m;
}

}  // namespace emdq
