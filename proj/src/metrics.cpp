#include "soga/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "soga/error.hpp"

namespace soga {

MetricReport classification_report(const std::vector<int>& pred_labels,
                                   const std::vector<int>& true_labels, std::size_t k) {
  if (pred_labels.size() != true_labels.size())
    throw ShapeError("classification_report: " + std::to_string(pred_labels.size()) +
                     " predictions vs " + std::to_string(true_labels.size()) + " labels");
  if (pred_labels.empty()) throw DataError("classification_report: empty input");

  MetricReport r;
  r.confusion.assign(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < pred_labels.size(); ++i) {
    const int t = true_labels[i], p = pred_labels[i];
    if (t < 0 || static_cast<std::size_t>(t) >= k || p < 0 ||
        static_cast<std::size_t>(p) >= k)
      throw DataError("classification_report: label outside [0, " + std::to_string(k) + ")");
    r.confusion[t][p]++;
  }

  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  r.f1.assign(k, 0.0);
  long correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const long tp = r.confusion[c][c];
    long fp = 0, fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += r.confusion[o][c];
      fn += r.confusion[c][o];
    }
    correct += tp;
    r.precision[c] = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    r.recall[c] = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    r.f1[c] = r.precision[c] + r.recall[c] > 0.0
                  ? 2.0 * r.precision[c] * r.recall[c] / (r.precision[c] + r.recall[c])
                  : 0.0;
    r.macro_f1 += r.f1[c];
  }
  r.macro_f1 /= static_cast<double>(k);
  r.micro_f1 = static_cast<double>(correct) / static_cast<double>(pred_labels.size());
  return r;
}

double macro_f1(const std::vector<int>& pred_labels, const std::vector<int>& true_labels,
                std::size_t k) {
  return classification_report(pred_labels, true_labels, k).macro_f1;
}

double micro_f1(const std::vector<int>& pred_labels, const std::vector<int>& true_labels,
                std::size_t k) {
  return classification_report(pred_labels, true_labels, k).micro_f1;
}

double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw ShapeError("auc_binary: " + std::to_string(scores.size()) + " scores vs " +
                     std::to_string(labels.size()) + " labels");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1)
      pos.push_back(scores[i]);
    else if (labels[i] == 0)
      neg.push_back(scores[i]);
    else
      throw DataError("auc_binary: labels must be 0 or 1");
  }
  if (pos.empty() || neg.empty())
    throw DataError("auc_binary: both classes must be present");

  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) {
      if (p > n)
        wins += 1.0;
      else if (p == n)
        wins += 0.5;
    }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

std::vector<int> argmax_rows(const Tensor& pred) {
  std::vector<int> out(pred.rows);
  for (std::size_t r = 0; r < pred.rows; ++r) {
    int best = 0;
    for (std::size_t c = 1; c < pred.cols; ++c)
      if (pred.at(r, c) > pred.at(r, best)) best = static_cast<int>(c);
    out[r] = best;
  }
  return out;
}

StabilityStats stability_stats(const std::vector<double>& trace, std::size_t skip_n) {
  if (trace.size() < skip_n + 2)
    throw DataError("stability_stats: trace of length " + std::to_string(trace.size()) +
                    " too short for skip_n=" + std::to_string(skip_n));
  StabilityStats s;
  s.skip_n = skip_n;
  s.trace = trace;
  const std::size_t kept = trace.size() - skip_n;
  for (std::size_t i = skip_n; i < trace.size(); ++i) s.mean += trace[i];
  s.mean /= static_cast<double>(kept);
  double var = 0.0;
  for (std::size_t i = skip_n; i < trace.size(); ++i) {
    const double d = trace[i] - s.mean;
    var += d * d;
  }
  s.stddev = std::sqrt(var / static_cast<double>(kept));
  return s;
}

}  // namespace soga
