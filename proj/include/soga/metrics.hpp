#pragma once

#include <cstddef>
#include <vector>

#include "soga/tensor.hpp"

namespace soga {

struct MetricReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::vector<long>> confusion;  // confusion[truth][pred]
};

MetricReport classification_report(const std::vector<int>& pred_labels,
                                   const std::vector<int>& true_labels, std::size_t k);

// Unweighted mean of per-class F1; a class absent from both predictions and
// truth contributes F1 = 0.
double macro_f1(const std::vector<int>& pred_labels,
                const std::vector<int>& true_labels, std::size_t k);
// Equals plain accuracy for single-label multiclass.
double micro_f1(const std::vector<int>& pred_labels,
                const std::vector<int>& true_labels, std::size_t k);

// Pairwise-probability AUC with ties counted 1/2, by explicit pair counting.
double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels);

std::vector<int> argmax_rows(const Tensor& pred);

struct StabilityStats {
  std::size_t skip_n = 20;
  double mean = 0.0;
  double stddev = 0.0;  // population std over the kept epochs
  std::vector<double> trace;
};

StabilityStats stability_stats(const std::vector<double>& trace, std::size_t skip_n = 20);

}  // namespace soga
