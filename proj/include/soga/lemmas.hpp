#pragma once

#include <cstdint>
#include <vector>

#include "soga/tensor.hpp"

namespace soga {

// Entropy descent over free per-node logits (the sufficient-capacity
// regime): every row should converge to mass 1/eta on its initial argmax
// set, where eta counts the tied maxima.
struct Lemma1Report {
  int n_nodes = 0;
  int n_classes = 0;
  int steps = 0;
  double max_linf_deviation = 0.0;       // vs the 1/eta-on-argmax target
  std::vector<double> per_node_deviation;
  std::vector<int> eta;                  // tie multiplicity per node
  Tensor final_probs;
};

// Runs Adam on the conditional-entropy objective from random logits plus
// constructed exact-tie rows (eta = 1, 2, 3).
Lemma1Report verify_lemma1(int n_classes, int n_nodes, int steps, double lr,
                           std::uint64_t seed);

struct LemmaTwoSetup {
  double r_p = 0.7;           // accuracy on positive samples
  double r_n = 0.7;           // accuracy on negative samples
  int n_pos = 100;
  int n_neg = 100;
  std::uint64_t seed = 1;
};

struct Lemma2Report {
  double auc_before = 0.0;      // adversarial soft scores: meets the r_p * r_n bound
  double auc_after = 0.0;       // hardened scores: (r_p + r_n) / 2 by tie counting
  double improvement = 0.0;
  double expected_before = 0.0;  // r_p * r_n
  double expected_after = 0.0;   // (r_p + r_n) / 2
  double max_hardening_gap = 0.0;  // distance of descent iterate from its limit
};

// Builds soft scores realizing (r_p, r_n) exactly with the worst-case
// within-class ordering, hardens them by entropy descent, and reports AUC
// before and after.
Lemma2Report verify_lemma2(const LemmaTwoSetup& setup);

}  // namespace soga
