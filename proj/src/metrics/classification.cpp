#include "rfanogan/error.hpp"
#include "rfanogan/metrics.hpp"

namespace rfanogan::metrics {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationMetrics classification_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                                             std::uint64_t fn) {
  const std::uint64_t total = tp + fp + tn + fn;
  if (total == 0) throw Error("classification_metrics: all-zero confusion matrix");
  ClassificationMetrics m;
  m.accuracy = ratio(tp + tn, total);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  const double sum = m.precision + m.recall;
  m.f1 = sum == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / sum;
  return m;
}

}  // namespace rfanogan::metrics
