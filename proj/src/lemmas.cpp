#include "soga/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "soga/adam.hpp"
#include "soga/error.hpp"
#include "soga/metrics.hpp"
#include "soga/objectives.hpp"
#include "soga/tape.hpp"

namespace soga {

namespace {

// Adam descent on the mean per-row entropy of softmax(logits); the rows are
// independent free parameters, i.e. the sufficient-capacity regime.
Tensor entropy_descent_probs(Tensor logits, int steps, double lr) {
  std::vector<Tensor> params;
  params.push_back(std::move(logits));
  AdamState adam;
  adam.lr = lr;
  for (int s = 0; s < steps; ++s) {
    Tape tape;
    Var z = tape.leaf(params[0], true);
    Var loss = conditional_entropy(row_softmax(z));
    tape.backward(loss);
    std::vector<Tensor> grads;
    grads.push_back(tape.grad(z));
    adam_step(params, grads, adam);
  }
  Tape tape;
  return tape.value(row_softmax(tape.constant(params[0])));
}

std::vector<int> argmax_set(const Tensor& probs, std::size_t row) {
  double mx = probs.at(row, 0);
  for (std::size_t c = 1; c < probs.cols; ++c) mx = std::max(mx, probs.at(row, c));
  std::vector<int> out;
  for (std::size_t c = 0; c < probs.cols; ++c)
    if (probs.at(row, c) == mx) out.push_back(static_cast<int>(c));
  return out;
}

}  // namespace

Lemma1Report verify_lemma1(int n_classes, int n_nodes, int steps, double lr,
                           std::uint64_t seed) {
  if (n_classes < 2 || n_nodes < 3)
    throw ConfigError("verify_lemma1: need n_classes >= 2 and n_nodes >= 3");
  std::mt19937_64 rng(seed);
  Tensor logits = gaussian(n_nodes, n_classes, 0.0, 1.0, rng);

  // Constructed exact-tie rows: eta = 1, 2, 3 (3 needs k >= 3... clamp to k).
  for (int eta = 1; eta <= 3 && eta <= n_classes && eta <= n_nodes; ++eta) {
    const std::size_t row = eta - 1;
    for (int c = 0; c < n_classes; ++c) logits.at(row, c) = 0.0;
    for (int c = 0; c < eta; ++c) logits.at(row, c) = 1.5;
  }

  Tensor init_probs;
  {
    Tape tape;
    init_probs = tape.value(row_softmax(tape.constant(logits)));
  }

  Lemma1Report report;
  report.n_nodes = n_nodes;
  report.n_classes = n_classes;
  report.steps = steps;
  report.final_probs = entropy_descent_probs(std::move(logits), steps, lr);
  report.per_node_deviation.resize(n_nodes);
  report.eta.resize(n_nodes);

  for (int i = 0; i < n_nodes; ++i) {
    const std::vector<int> top = argmax_set(init_probs, i);
    report.eta[i] = static_cast<int>(top.size());
    const double target_mass = 1.0 / static_cast<double>(top.size());
    double dev = 0.0;
    std::size_t t = 0;
    for (int c = 0; c < n_classes; ++c) {
      const bool in_top = t < top.size() && top[t] == c;
      if (in_top) t++;
      const double want = in_top ? target_mass : 0.0;
      dev = std::max(dev, std::abs(report.final_probs.at(i, c) - want));
    }
    report.per_node_deviation[i] = dev;
    report.max_linf_deviation = std::max(report.max_linf_deviation, dev);
  }
  return report;
}

Lemma2Report verify_lemma2(const LemmaTwoSetup& setup) {
  if (setup.n_pos <= 0 || setup.n_neg <= 0)
    throw DataError("verify_lemma2: degenerate sample counts");
  if (setup.r_p <= 0.0 || setup.r_p > 1.0 || setup.r_n <= 0.0 || setup.r_n > 1.0)
    throw DataError("verify_lemma2: accuracies must lie in (0, 1]");
  auto exact_count = [](double r, int n, const char* who) {
    const double raw = r * n;
    const long rounded = std::lround(raw);
    if (std::abs(raw - static_cast<double>(rounded)) > 1e-9)
      throw DataError(std::string("verify_lemma2: ") + who +
                      " * count is not an integer; pick divisible counts");
    return static_cast<int>(rounded);
  };
  const int n_cp = exact_count(setup.r_p, setup.n_pos, "r_p");
  const int n_cn = exact_count(setup.r_n, setup.n_neg, "r_n");

  // Adversarial within-class ordering: every wrongly-ranked pair family is
  // fully wrong, so soft AUC hits the r_p * r_n lower bound exactly.
  //   wrong negatives  (predicted positive): (0.90, 0.99)  -- top of the ranking
  //   correct positives:                     (0.51, 0.60)
  //   correct negatives:                     (0.40, 0.49)
  //   wrong positives  (predicted negative): (0.01, 0.10)  -- bottom
  std::mt19937_64 rng(setup.seed);
  auto band = [&rng](double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
  };
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < setup.n_pos; ++i) {
    scores.push_back(i < n_cp ? band(0.51, 0.60) : band(0.01, 0.10));
    labels.push_back(1);
  }
  for (int i = 0; i < setup.n_neg; ++i) {
    scores.push_back(i < n_cn ? band(0.40, 0.49) : band(0.90, 0.99));
    labels.push_back(0);
  }

  Lemma2Report report;
  report.expected_before = setup.r_p * setup.r_n;
  report.expected_after = 0.5 * (setup.r_p + setup.r_n);
  report.auc_before = auc_binary(scores, labels);

  // Harden by entropy descent over per-sample binary distributions, then
  // evaluate AUC at the descent's limit (the exact one-hot on the preserved
  // argmax; the iterate's remaining gap is reported).
  const std::size_t n = scores.size();
  Tensor logits(n, 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    logits.at(i, 1) = std::log(scores[i] / (1.0 - scores[i]));
  Tensor hard = entropy_descent_probs(std::move(logits), 400, 0.1);

  std::vector<double> hardened(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double limit = scores[i] > 0.5 ? 1.0 : 0.0;
    report.max_hardening_gap =
        std::max(report.max_hardening_gap, std::abs(hard.at(i, 1) - limit));
    hardened[i] = limit;
  }
  report.auc_after = auc_binary(hardened, labels);
  report.improvement = report.auc_after - report.auc_before;
  return report;
}

}  // namespace soga
