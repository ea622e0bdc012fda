#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "soga/graph.hpp"

namespace soga {

// Per node, for each hop h = 0..max_hop, the ascending degree sequence of
// nodes exactly h hops away. Hop 0 is the node's own degree.
struct RingSequences {
  int max_hop = 0;
  std::vector<std::vector<std::vector<int>>> per_node;  // [node][hop] -> sorted degrees
};

struct StructPairConfig {
  std::size_t kappa = 0;     // 0 means "use the edge count"
  int max_hop = 2;
  double bin_base = 2.0;     // log-degree binning base for candidate pruning
  bool use_binning = true;
  bool exclude_edges = false;
  int jobs = 1;
};

// Positive-pair collections: graph edges (local proximity) and the top-kappa
// structurally similar pairs with their distances.
struct PairSet {
  std::vector<std::pair<int, int>> local;
  std::vector<std::pair<int, int>> structural;
  std::vector<double> distances;  // parallel to structural
};

RingSequences ring_sequences(const UnlabeledGraph& g, int max_hop);

// Dynamic-time-warping alignment cost with elementwise cost
// max(x+1, y+1) / min(x+1, y+1) - 1 over two ascending degree sequences.
double dtw_degree_distance(const std::vector<int>& a, const std::vector<int>& b);

// Sum of per-hop DTW costs. Hops where both rings are empty contribute 0;
// the sum stops at the first hop where exactly one ring is empty.
double struct_distance(const std::vector<std::vector<int>>& a,
                       const std::vector<std::vector<int>>& b);

struct MiningStats {
  std::size_t candidates = 0;
  double wall_seconds = 0.0;
};

// Top-kappa structurally similar pairs among same/adjacent log-degree-bin
// candidates; ties broken by (min id, max id). local is copied from the
// edge set. Deterministic for fixed input and config, independent of jobs.
PairSet mine_pairs(const UnlabeledGraph& g, const StructPairConfig& cfg,
                   MiningStats* stats = nullptr);

// Exact all-pairs search, no binning; test oracle. Guarded to n <= 2000.
PairSet brute_force_pairs(const UnlabeledGraph& g, const StructPairConfig& cfg);

void write_pairs_tsv(const PairSet& pairs, const std::string& path);
PairSet load_pairs_tsv(const std::string& path, const UnlabeledGraph& g);

}  // namespace soga
