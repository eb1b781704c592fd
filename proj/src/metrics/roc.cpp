#include <algorithm>
#include <limits>
#include <numeric>

#include "rfanogan/error.hpp"
#include "rfanogan/metrics.hpp"

namespace rfanogan::metrics {

RocResult auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("auroc: scores and labels differ in length");
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("auroc: labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw Error("auroc: single-class label set");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult roc;
  roc.thresholds.push_back(scores[order.front()]);
  roc.tpr.push_back(0.0);
  roc.fpr.push_back(0.0);

  // Walk tie groups from the highest score down. Each group contributes its
  // positive x negative pairs against all lower negatives fully and among
  // itself by one half.
  double won = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin;
    std::size_t group_pos = 0;
    while (end < order.size() && scores[order[end]] == scores[order[begin]]) {
      group_pos += static_cast<std::size_t>(labels[order[end]]);
      ++end;
    }
    const std::size_t group_neg = (end - begin) - group_pos;
    won += static_cast<double>(group_pos) * static_cast<double>(negatives - fp - group_neg) +
           0.5 * static_cast<double>(group_pos) * static_cast<double>(group_neg);
    tp += group_pos;
    fp += group_neg;
    roc.thresholds.push_back(end < order.size() ? scores[order[end]] : -std::numeric_limits<double>::infinity());
    roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(positives));
    roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(negatives));
    begin = end;
  }
  roc.auroc = won / (static_cast<double>(positives) * static_cast<double>(negatives));
  return roc;
}

}  // namespace rfanogan::metrics
