#include "soga/objectives.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "soga/error.hpp"

namespace soga {

Var conditional_entropy(Var pred) {
  Tape& t = *pred.tape;
  const double n = static_cast<double>(t.value(pred).rows);
  Var plogp = mul(pred, log_guarded(pred));
  return scale(sum(plogp), -1.0 / n);
}

namespace {

Var column_means(Var pred) {
  Tape& t = *pred.tape;
  const std::size_t n = t.value(pred).rows;
  Tensor ones(1, n, 1.0 / static_cast<double>(n));
  return matmul(t.constant(std::move(ones)), pred);  // 1 x k
}

}  // namespace

Var marginal_entropy(Var pred) {
  Var q = column_means(pred);
  return scale(sum(mul(q, log_guarded(q))), -1.0);
}

Var kl_marginal(Var pred, const std::vector<double>& prior) {
  Tape& t = *pred.tape;
  const std::size_t k = t.value(pred).cols;
  if (prior.size() != k)
    throw ShapeError("kl_marginal: prior has " + std::to_string(prior.size()) +
                     " entries for " + std::to_string(k) + " classes");
  double plogp = 0.0;
  double mass = 0.0;
  for (double p : prior) {
    if (p <= 0.0) throw ConfigError("kl_marginal: prior entries must be strictly positive");
    plogp += p * std::log(p);
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw ConfigError("kl_marginal: prior sums to " + std::to_string(mass) + ", expected 1");

  Var q = column_means(pred);
  Tensor pt(1, k);
  for (std::size_t c = 0; c < k; ++c) pt.data[c] = prior[c];
  Var cross = sum(mul(t.constant(std::move(pt)), log_guarded(q)));  // sum_y p log q
  return add(scale(cross, -1.0), t.constant(Tensor::scalar(plogp)));
}

Var im_objective(Var pred, const SogaConfig& cfg) {
  Var neg_cond = scale(conditional_entropy(pred), -1.0);
  if (cfg.marginal_weight == 0.0) return scale(neg_cond, cfg.im_weight);
  Var marginal_term =
      cfg.marginal_mode == SogaConfig::MarginalMode::kEntropy
          ? marginal_entropy(pred)
          : scale(kl_marginal(pred, cfg.label_prior), -1.0);
  return scale(add(neg_cond, scale(marginal_term, cfg.marginal_weight)), cfg.im_weight);
}

NegativeSampler::NegativeSampler(std::uint64_t seed, std::size_t n_nodes)
    : rng_(seed), n_(n_nodes) {}

NegativeDraw NegativeSampler::draw(const PairSet& pairs, int negatives) {
  if (negatives < 1) throw ConfigError("negative sample count must be >= 1");
  if (n_ < 3 && (!pairs.local.empty() || !pairs.structural.empty()))
    throw DataError("negative sampling needs at least 3 nodes");
  std::uniform_int_distribution<std::size_t> uniform(0, n_ - 1);
  auto sample_for = [&](const std::vector<std::pair<int, int>>& ps, std::vector<int>& out) {
    out.reserve(ps.size() * negatives);
    for (const auto& [i, j] : ps)
      for (int s = 0; s < negatives; ++s) {
        int cand;
        do {
          cand = static_cast<int>(uniform(rng_));
        } while (cand == i || cand == j);
        out.push_back(cand);
      }
  };
  NegativeDraw d;
  sample_for(pairs.local, d.local);
  sample_for(pairs.structural, d.structural);
  return d;
}

namespace {

// lambda * (sum over pairs of log J_ij - sum over drawn negatives of log J_in),
// optionally normalized by the pair count.
Var pair_family_term(Var pred, const std::vector<std::pair<int, int>>& ps,
                     const std::vector<int>& negs, int negatives, double lambda,
                     bool raw_sums) {
  Tape& t = *pred.tape;
  std::vector<int> anchor_pos, partner, anchor_neg;
  anchor_pos.reserve(ps.size());
  partner.reserve(ps.size());
  anchor_neg.reserve(negs.size());
  for (std::size_t p = 0; p < ps.size(); ++p) {
    anchor_pos.push_back(ps[p].first);
    partner.push_back(ps[p].second);
    for (int s = 0; s < negatives; ++s) anchor_neg.push_back(ps[p].first);
  }
  if (negs.size() != anchor_neg.size())
    throw ShapeError("sc_objective: negative draw size " + std::to_string(negs.size()) +
                     " != pairs * negatives " + std::to_string(anchor_neg.size()));

  Var pos_scores = row_inner_product(gather_rows(pred, std::move(anchor_pos)),
                                     gather_rows(pred, std::move(partner)));
  Var pos_term = sum(log_guarded(sigmoid(pos_scores)));

  Var neg_scores = row_inner_product(gather_rows(pred, std::move(anchor_neg)),
                                     gather_rows(pred, std::vector<int>(negs)));
  Var neg_term = sum(log_guarded(sigmoid(neg_scores)));

  Var term = sub(pos_term, neg_term);
  (void)t;
  const double norm = raw_sums ? 1.0 : 1.0 / static_cast<double>(ps.size());
  return scale(term, lambda * norm);
}

std::atomic<bool> warned_empty{false};

}  // namespace

Var sc_objective(Var pred, const PairSet& pairs, const NegativeDraw& negs,
                 const SogaConfig& cfg) {
  Tape& t = *pred.tape;
  Var total = t.constant(Tensor::scalar(0.0));
  if (cfg.lambda1 != 0.0 && !pairs.local.empty())
    total = add(total, pair_family_term(pred, pairs.local, negs.local, cfg.negatives,
                                        cfg.lambda1, cfg.raw_sums));
  if (cfg.lambda2 != 0.0 && !pairs.structural.empty())
    total = add(total, pair_family_term(pred, pairs.structural, negs.structural,
                                        cfg.negatives, cfg.lambda2, cfg.raw_sums));
  if (pairs.local.empty() && pairs.structural.empty() &&
      (cfg.lambda1 != 0.0 || cfg.lambda2 != 0.0) && !warned_empty.exchange(true)) {
    std::fprintf(stderr, "warning: sc_objective called with empty pair sets\n");
  }
  return total;
}

}  // namespace soga
