#include "soga/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "soga/error.hpp"

namespace soga {

namespace {

// Expected norm of a class mean; fixed so that feature_noise and
// feature_shift are interpretable against a stable class geometry.
constexpr double kClassMeanScale = 2.0;

void validate(const DomainPairConfig& cfg) {
  if (cfg.n_classes < 2 || cfg.n_nodes < 2 * cfg.n_classes)
    throw ConfigError("gen_pair: need >= 2 classes and a few nodes per class");
  if (!(cfg.p_out >= 0.0 && cfg.p_out < cfg.p_in && cfg.p_in <= 1.0))
    throw ConfigError("gen_pair: require 0 <= p_out < p_in <= 1");
  if (cfg.density_ratio <= 0.0) throw ConfigError("gen_pair: density_ratio must be > 0");
  if (cfg.feature_shift < 0.0 || cfg.feature_noise < 0.0)
    throw ConfigError("gen_pair: feature_shift and feature_noise must be >= 0");
}

std::vector<std::pair<int, int>> sample_edges(const std::vector<int>& labels,
                                              double p_in, double p_out,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(labels.size());
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? p_in : p_out;
      if (unit(rng) < p) edges.emplace_back(u, v);
    }
  return edges;
}

Tensor sample_features(const std::vector<int>& labels, const std::vector<Tensor>& means,
                       double noise, std::mt19937_64& rng) {
  const std::size_t n = labels.size();
  const std::size_t d = means[0].cols;
  std::normal_distribution<double> gauss(0.0, noise);
  Tensor x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor& mu = means[labels[i]];
    for (std::size_t c = 0; c < d; ++c) x.at(i, c) = mu.data[c] + gauss(rng);
  }
  return x;
}

}  // namespace

std::pair<Graph, Graph> gen_pair(const DomainPairConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);

  std::vector<int> labels(cfg.n_nodes);
  for (std::size_t i = 0; i < cfg.n_nodes; ++i)
    labels[i] = static_cast<int>(i % cfg.n_classes);

  // Source class means with expected norm kClassMeanScale; target means are
  // the source means translated by feature_shift along a random unit vector.
  std::vector<Tensor> src_means, tgt_means;
  const double coord_std = kClassMeanScale / std::sqrt(static_cast<double>(cfg.feature_dim));
  for (std::size_t c = 0; c < cfg.n_classes; ++c)
    src_means.push_back(gaussian(1, cfg.feature_dim, 0.0, coord_std, rng));
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    Tensor dir = gaussian(1, cfg.feature_dim, 0.0, 1.0, rng);
    double norm = 0.0;
    for (double v : dir.data) norm += v * v;
    norm = std::sqrt(norm);
    Tensor mu = src_means[c];
    for (std::size_t j = 0; j < mu.size(); ++j)
      mu.data[j] += cfg.feature_shift * dir.data[j] / norm;
    tgt_means.push_back(std::move(mu));
  }

  const auto src_edges = sample_edges(labels, cfg.p_in, cfg.p_out, rng);
  const double tp_in = std::min(1.0, cfg.p_in * cfg.density_ratio);
  const double tp_out = std::min(1.0, cfg.p_out * cfg.density_ratio);
  const auto tgt_edges = sample_edges(labels, tp_in, tp_out, rng);

  Tensor src_x = sample_features(labels, src_means, cfg.feature_noise, rng);
  Tensor tgt_x = sample_features(labels, tgt_means, cfg.feature_noise, rng);

  Graph source = build_graph(cfg.n_nodes, src_edges, std::move(src_x), labels,
                             cfg.n_classes);
  Graph target = build_graph(cfg.n_nodes, tgt_edges, std::move(tgt_x), labels,
                             cfg.n_classes);
  return {std::move(source), std::move(target)};
}

}  // namespace soga
