#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "soga/struct_proximity.hpp"
#include "soga/tape.hpp"

namespace soga {

struct SogaConfig {
  double lambda1 = 1.0;  // local-proximity weight
  double lambda2 = 1.0;  // structural-role weight
  int negatives = 5;     // negative samples per positive pair
  double lr = 1e-3;
  int epochs = 100;
  std::uint64_t seed = 1;

  enum class MarginalMode { kEntropy, kKlToPrior };
  MarginalMode marginal_mode = MarginalMode::kEntropy;
  std::vector<double> label_prior;  // required iff kKlToPrior

  // Ablation knobs: im_weight 0 disables the information-maximization term,
  // marginal_weight 0 leaves conditional-entropy-only training.
  double im_weight = 1.0;
  double marginal_weight = 1.0;
  // Keep the literal unnormalized pair sums instead of dividing by set size.
  bool raw_sums = false;
};

// Mean over nodes of the per-row entropy -sum_y q log q (guarded log).
Var conditional_entropy(Var pred);
// Entropy of the column-mean distribution.
Var marginal_entropy(Var pred);
// KL(prior || column means); the prior must be strictly positive.
Var kl_marginal(Var pred, const std::vector<double>& prior);
// Mutual-information objective (to maximize).
Var im_objective(Var pred, const SogaConfig& cfg);

// Negatives drawn per positive pair, flattened (cfg.negatives per pair).
struct NegativeDraw {
  std::vector<int> local;
  std::vector<int> structural;
};

// Uniform node sampler excluding both endpoints of the anchor pair.
class NegativeSampler {
 public:
  explicit NegativeSampler(std::uint64_t seed, std::size_t n_nodes);
  NegativeDraw draw(const PairSet& pairs, int negatives);

 private:
  std::mt19937_64 rng_;
  std::size_t n_;
};

// Structure-consistency objective (to maximize): for each positive pair
// (i, j), log sigma(<y_i, y_j>) minus the summed log-scores of its sampled
// negatives, weighted by lambda1 / lambda2 per pair family.
Var sc_objective(Var pred, const PairSet& pairs, const NegativeDraw& negs,
                 const SogaConfig& cfg);

}  // namespace soga
