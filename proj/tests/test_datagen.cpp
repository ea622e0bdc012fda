#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <queue>

#include "soga/datagen.hpp"
#include "soga/error.hpp"
#include "soga/gnn.hpp"
#include "soga/metrics.hpp"

using namespace soga;

TEST_CASE("generation is deterministic per seed") {
  DomainPairConfig cfg;
  cfg.n_nodes = 120;
  cfg.feature_dim = 8;
  cfg.seed = 5;
  auto [s1, t1] = gen_pair(cfg);
  auto [s2, t2] = gen_pair(cfg);
  CHECK(s1.edge_list() == s2.edge_list());
  CHECK(t1.edge_list() == t2.edge_list());
  CHECK(s1.features.data == s2.features.data);
  CHECK(t1.features.data == t2.features.data);

  cfg.seed = 6;
  auto [s3, t3] = gen_pair(cfg);
  CHECK(s1.features.data != s3.features.data);
}

TEST_CASE("class sizes are balanced and labels present on both sides") {
  DomainPairConfig cfg;
  cfg.n_nodes = 200;
  cfg.n_classes = 4;
  cfg.feature_dim = 8;
  cfg.seed = 2;
  auto [source, target] = gen_pair(cfg);
  for (const Graph* g : {&source, &target}) {
    REQUIRE(g->has_labels());
    std::vector<int> counts(4, 0);
    for (int y : g->labels) counts[y]++;
    for (int c : counts) CHECK(c == 50);
  }
}

TEST_CASE("density ratio of 6.5 lands in the expected band") {
  DomainPairConfig cfg;
  cfg.n_nodes = 600;
  cfg.n_classes = 4;
  cfg.feature_dim = 8;
  cfg.p_in = 0.03;
  cfg.p_out = 0.003;
  cfg.density_ratio = 6.5;
  cfg.seed = 11;
  auto [source, target] = gen_pair(cfg);
  const double ratio =
      static_cast<double>(target.n_edges) / static_cast<double>(source.n_edges);
  CHECK(ratio >= 5.5);
  CHECK(ratio <= 7.5);
}

TEST_CASE("pure within-class connectivity gives label-pure components") {
  DomainPairConfig cfg;
  cfg.n_nodes = 100;
  cfg.n_classes = 2;
  cfg.feature_dim = 4;
  cfg.p_in = 0.2;
  cfg.p_out = 0.0;
  cfg.seed = 3;
  auto [source, target] = gen_pair(cfg);
  for (const Graph* g : {&source, &target}) {
    std::vector<int> comp(g->n_nodes, -1);
    int n_comp = 0;
    for (std::size_t s = 0; s < g->n_nodes; ++s) {
      if (comp[s] >= 0) continue;
      std::queue<int> q;
      q.push(static_cast<int>(s));
      comp[s] = n_comp;
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        CHECK(g->labels[u] == g->labels[s]);
        for (int v : g->neighbors(u))
          if (comp[v] < 0) {
            comp[v] = n_comp;
            q.push(v);
          }
      }
      n_comp++;
    }
  }
}

TEST_CASE("label-conditional target means sit delta away from source means") {
  DomainPairConfig cfg;
  cfg.n_nodes = 1000;
  cfg.n_classes = 4;
  cfg.feature_dim = 16;
  cfg.feature_shift = 1.0;
  cfg.feature_noise = 0.1;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    cfg.seed = seed;
    auto [source, target] = gen_pair(cfg);
    const std::size_t class_size = cfg.n_nodes / cfg.n_classes;
    const double tol = 3.0 * cfg.feature_noise / std::sqrt(static_cast<double>(class_size));
    for (std::size_t c = 0; c < cfg.n_classes; ++c) {
      std::vector<double> mean_s(cfg.feature_dim, 0.0), mean_t(cfg.feature_dim, 0.0);
      for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
        if (source.labels[i] != static_cast<int>(c)) continue;
        for (std::size_t d = 0; d < cfg.feature_dim; ++d) {
          mean_s[d] += source.features.at(i, d) / class_size;
          mean_t[d] += target.features.at(i, d) / class_size;
        }
      }
      double norm = 0.0;
      for (std::size_t d = 0; d < cfg.feature_dim; ++d) {
        const double diff = mean_t[d] - mean_s[d];
        norm += diff * diff;
      }
      norm = std::sqrt(norm);
      CAPTURE(seed);
      CAPTURE(c);
      CHECK(std::abs(norm - cfg.feature_shift) <= tol);
    }
  }
}

TEST_CASE("identical distributions transfer without degradation") {
  // delta = 0, rho = 1: source and target are draws from the same law, so a
  // source-trained model scores about its own validation F1 on the target.
  DomainPairConfig cfg;
  cfg.n_nodes = 300;
  cfg.n_classes = 3;
  cfg.feature_dim = 12;
  cfg.p_in = 0.05;
  cfg.p_out = 0.005;
  cfg.feature_shift = 0.0;
  cfg.density_ratio = 1.0;
  cfg.feature_noise = 1.0;

  double gap_sum = 0.0;
  const std::vector<std::uint64_t> seeds = {1, 3, 5, 7, 9};
  for (std::uint64_t seed : seeds) {
    cfg.seed = seed;
    auto [source, target] = gen_pair(cfg);
    SourceTrainConfig tc;
    tc.hidden_dim = 32;
    tc.max_epochs = 80;
    tc.patience = 15;
    tc.seed = seed;
    const SplitAssignment split = split_train_val(source, 0.8, seed);
    const ModelCheckpoint ckpt = train_source(source, split, tc);
    const double val_f1 = ckpt.metadata.at("best_val_macro_f1").get<double>();
    const Tensor pred = predict(ckpt, UnlabeledGraph(target));
    const double target_f1 = macro_f1(argmax_rows(pred), target.labels, 3);
    gap_sum += std::abs(val_f1 - target_f1);
  }
  CHECK(gap_sum / seeds.size() <= 0.1);
}

TEST_CASE("invalid configurations are rejected") {
  DomainPairConfig cfg;
  cfg.p_in = 0.01;
  cfg.p_out = 0.02;  // out > in
  CHECK_THROWS_AS(gen_pair(cfg), ConfigError);
  cfg.p_out = 0.001;
  cfg.density_ratio = 0.0;
  CHECK_THROWS_AS(gen_pair(cfg), ConfigError);
  cfg.density_ratio = 1.0;
  cfg.feature_shift = -1.0;
  CHECK_THROWS_AS(gen_pair(cfg), ConfigError);
}
