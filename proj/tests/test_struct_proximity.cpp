#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "soga/error.hpp"
#include "soga/struct_proximity.hpp"

using namespace soga;

namespace {

Graph make_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  return build_graph(n, edges, Tensor(n, 1, 0.0), {}, 2);
}

Graph er_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (unit(rng) < p) edges.emplace_back(u, v);
  return make_graph(n, edges);
}

}  // namespace

TEST_CASE("ring sequences pin the small cases") {
  SUBCASE("middle of a path") {
    const Graph g = make_graph(3, {{0, 1}, {1, 2}});
    const RingSequences rs = ring_sequences(UnlabeledGraph(g), 1);
    CHECK(rs.per_node[1][0] == std::vector<int>{2});
    CHECK(rs.per_node[1][1] == std::vector<int>{1, 1});
  }
  SUBCASE("isolated node has empty rings") {
    const Graph g = make_graph(1, {});
    const RingSequences rs = ring_sequences(UnlabeledGraph(g), 2);
    CHECK(rs.per_node[0][0] == std::vector<int>{0});
    CHECK(rs.per_node[0][1].empty());
    CHECK(rs.per_node[0][2].empty());
  }
  SUBCASE("four-cycle") {
    const Graph g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    const RingSequences rs = ring_sequences(UnlabeledGraph(g), 2);
    for (int node = 0; node < 4; ++node) {
      CHECK(rs.per_node[node][0] == std::vector<int>{2});
      CHECK(rs.per_node[node][1] == std::vector<int>{2, 2});
      CHECK(rs.per_node[node][2] == std::vector<int>{2});
    }
  }
}

TEST_CASE("dtw cost pins the worked alignments") {
  // hop-0 singletons [2] vs [4] with the +1 shift: 5/3 - 1 = 2/3
  CHECK(dtw_degree_distance({2}, {4}) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  // [1,3] vs [3]: both elements pair against 3 -> c(2,4) + c(4,4) = 1
  CHECK(dtw_degree_distance({1, 3}, {3}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dtw_degree_distance({}, {}) == 0.0);
  CHECK(dtw_degree_distance({5, 5}, {5, 5, 5}) == 0.0);
}

TEST_CASE("struct distance: identical role nodes are at distance zero") {
  // Two leaves of the same star see identical rings at every hop.
  const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const RingSequences rs = ring_sequences(UnlabeledGraph(star), 2);
  CHECK(struct_distance(rs.per_node[1], rs.per_node[2]) == 0.0);
  CHECK(struct_distance(rs.per_node[1], rs.per_node[1]) == 0.0);
}

TEST_CASE("struct distance is symmetric and hop-monotone") {
  const Graph g = er_graph(30, 0.15, 5);
  const UnlabeledGraph view(g);
  const RingSequences r0 = ring_sequences(view, 0);
  const RingSequences r1 = ring_sequences(view, 1);
  const RingSequences r2 = ring_sequences(view, 2);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> pick(0, 29);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = pick(rng), b = pick(rng);
    const double d2 = struct_distance(r2.per_node[a], r2.per_node[b]);
    const double d2r = struct_distance(r2.per_node[b], r2.per_node[a]);
    CHECK(d2 == d2r);
    const double d0 = struct_distance(r0.per_node[a], r0.per_node[b]);
    const double d1 = struct_distance(r1.per_node[a], r1.per_node[b]);
    CHECK(d0 <= d1 + 1e-15);
    CHECK(d1 <= d2 + 1e-15);
    if (a == b) CHECK(d2 == 0.0);
  }
}

TEST_CASE("truncation when exactly one ring is empty") {
  // Path of 3 vs isolated node: hop 0 compares fine, hop 1 has one empty
  // ring, so the sum stops there.
  const Graph g = make_graph(4, {{0, 1}, {1, 2}});  // node 3 isolated
  const RingSequences rs = ring_sequences(UnlabeledGraph(g), 2);
  const double d = struct_distance(rs.per_node[0], rs.per_node[3]);
  CHECK(d == doctest::Approx(dtw_degree_distance({1}, {0})).epsilon(1e-12));
}

TEST_CASE("star mining selects the lexicographically first zero-distance pairs") {
  const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  StructPairConfig cfg;
  cfg.kappa = 4;
  cfg.use_binning = false;
  const PairSet mined = mine_pairs(UnlabeledGraph(star), cfg);
  REQUIRE(mined.structural.size() == 4);
  const std::vector<std::pair<int, int>> expect = {{1, 2}, {1, 3}, {1, 4}, {2, 3}};
  CHECK(mined.structural == expect);
  for (double d : mined.distances) CHECK(d == 0.0);
  CHECK(mined.local == star.edge_list());

  const PairSet brute = brute_force_pairs(UnlabeledGraph(star), cfg);
  CHECK(brute.structural == mined.structural);
}

TEST_CASE("two disjoint triangles are all mutually at distance zero") {
  const Graph g = make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  StructPairConfig cfg;
  cfg.kappa = 15;
  cfg.use_binning = false;
  const PairSet p = brute_force_pairs(UnlabeledGraph(g), cfg);
  REQUIRE(p.structural.size() == 15);
  for (double d : p.distances) CHECK(d == 0.0);
}

TEST_CASE("two-node path returns its only candidate") {
  const Graph g = make_graph(2, {{0, 1}});
  StructPairConfig cfg;
  cfg.kappa = 1;
  const PairSet p = mine_pairs(UnlabeledGraph(g), cfg);
  REQUIRE(p.structural.size() == 1);
  CHECK(p.structural[0] == std::pair<int, int>{0, 1});  // overlaps the edge set
}

TEST_CASE("edgeless graph yields an empty structural set at default kappa") {
  const Graph g = make_graph(3, {});
  StructPairConfig cfg;  // kappa 0 -> edge count -> 0
  const PairSet p = mine_pairs(UnlabeledGraph(g), cfg);
  CHECK(p.structural.empty());
  CHECK(p.local.empty());
}

TEST_CASE("kappa beyond the candidate count returns everything available") {
  const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  StructPairConfig cfg;
  cfg.kappa = 100;
  cfg.use_binning = false;
  const PairSet p = mine_pairs(UnlabeledGraph(star), cfg);  // warns on stderr
  CHECK(p.structural.size() == 10);                          // all C(5,2) pairs
}

TEST_CASE("ring sequences are deterministic") {
  const Graph g = er_graph(40, 0.15, 21);
  const RingSequences a = ring_sequences(UnlabeledGraph(g), 2);
  const RingSequences b = ring_sequences(UnlabeledGraph(g), 2);
  CHECK(a.per_node == b.per_node);
}

TEST_CASE("exclude_edges removes edge-overlapping pairs") {
  const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  StructPairConfig cfg;
  cfg.kappa = 10;
  cfg.use_binning = false;
  cfg.exclude_edges = true;
  const PairSet p = mine_pairs(UnlabeledGraph(star), cfg);
  for (auto [u, v] : p.structural) CHECK_FALSE(star.has_edge(u, v));
  CHECK(p.structural.size() == 6);  // the leaf-leaf pairs only
}

TEST_CASE("mining equals the oracle with binning disabled on random graphs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_int_distribution<int> n_dist(5, 60);
    const Graph g = er_graph(n_dist(rng), 0.12, seed * 31 + 1);
    if (g.n_edges == 0) continue;
    StructPairConfig cfg;
    cfg.use_binning = false;
    cfg.jobs = 2;
    const PairSet mined = mine_pairs(UnlabeledGraph(g), cfg);
    const PairSet brute = brute_force_pairs(UnlabeledGraph(g), cfg);
    CAPTURE(seed);
    CHECK(mined.structural == brute.structural);
    CHECK(mined.distances == brute.distances);  // bit-identical
  }
}

TEST_CASE("mining output is deterministic and thread-count independent") {
  const Graph g = er_graph(80, 0.08, 44);
  StructPairConfig cfg;
  cfg.jobs = 1;
  const PairSet a = mine_pairs(UnlabeledGraph(g), cfg);
  cfg.jobs = 4;
  const PairSet b = mine_pairs(UnlabeledGraph(g), cfg);
  CHECK(a.structural == b.structural);
  CHECK(a.distances == b.distances);
}

TEST_CASE("binning only prunes: mined pairs are a subset of all pairs ranked") {
  const Graph g = er_graph(50, 0.1, 7);
  StructPairConfig cfg;
  cfg.kappa = 30;
  const PairSet binned = mine_pairs(UnlabeledGraph(g), cfg);
  cfg.use_binning = false;
  const PairSet exact = brute_force_pairs(UnlabeledGraph(g), cfg);
  // Every binned distance is at least the exact kth distance ordering allows.
  REQUIRE(!exact.distances.empty());
  for (std::size_t i = 0; i < binned.distances.size() && i < exact.distances.size(); ++i)
    CHECK(binned.distances[i] >= exact.distances[i] - 1e-15);
}

TEST_CASE("oracle size guard") {
  const Graph g = er_graph(10, 0.2, 3);
  StructPairConfig cfg;
  CHECK_NOTHROW(brute_force_pairs(UnlabeledGraph(g), cfg));
  const Graph big = er_graph(2001, 0.0005, 4);
  CHECK_THROWS_AS(brute_force_pairs(UnlabeledGraph(big), cfg), ConfigError);
}

TEST_CASE("pair files round-trip") {
  const Graph g = er_graph(25, 0.2, 9);
  StructPairConfig cfg;
  const PairSet mined = mine_pairs(UnlabeledGraph(g), cfg);
  const std::string path = "/tmp/soga_pairs_test.tsv";
  write_pairs_tsv(mined, path);
  const PairSet back = load_pairs_tsv(path, UnlabeledGraph(g));
  CHECK(back.structural == mined.structural);
  CHECK(back.distances == mined.distances);
  CHECK(back.local == mined.local);
  std::remove(path.c_str());
}
