// Test-only reference implementations, kept independent of the library's
// computation paths: direct per-class scans for F1 and the midrank formula
// for AUC.
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracles {

inline double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                       int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    int tp = 0, pred_c = 0, true_c = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c) pred_c++;
      if (truth[i] == c) true_c++;
      if (pred[i] == c && truth[i] == c) tp++;
    }
    const double p = pred_c ? static_cast<double>(tp) / pred_c : 0.0;
    const double r = true_c ? static_cast<double>(tp) / true_c : 0.0;
    total += (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return total / k;
}

inline double micro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  int hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / pred.size();
}

inline double auc_midrank(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) j++;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (labels[t] == 1) {
      pos_rank_sum += rank[t];
      pos++;
    }
  const std::size_t neg = n - pos;
  return (pos_rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace oracles
