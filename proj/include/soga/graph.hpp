#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "soga/tensor.hpp"

namespace soga {

// Immutable undirected graph: symmetric CSR adjacency (both directions
// stored, sorted neighbor lists, no self-loops), dense features, optional
// labels. Safe to share across threads once built.
struct Graph {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;     // undirected edge count
  std::size_t n_classes = 0;
  std::vector<std::size_t> adj_ptr;  // n_nodes + 1
  std::vector<int> adj;              // 2 * n_edges entries
  Tensor features;                   // n_nodes x feature_dim
  std::vector<int> labels;           // empty when unlabeled
  std::vector<std::string> node_ids;  // optional external ids

  std::size_t feature_dim() const { return features.cols; }
  bool has_labels() const { return !labels.empty(); }
  int degree(int i) const {
    return static_cast<int>(adj_ptr[i + 1] - adj_ptr[i]);
  }
  std::span<const int> neighbors(int i) const {
    return {adj.data() + adj_ptr[i], adj_ptr[i + 1] - adj_ptr[i]};
  }
  bool has_edge(int u, int v) const;
  // Unordered edge list with u < v, sorted.
  std::vector<std::pair<int, int>> edge_list() const;
};

// Label-free view handed to the adaptation path. Exposes everything about
// the target graph except its labels, so no code reachable from adapt() can
// read supervision.
class UnlabeledGraph {
 public:
  explicit UnlabeledGraph(const Graph& g) : g_(&g) {}

  std::size_t n_nodes() const { return g_->n_nodes; }
  std::size_t n_edges() const { return g_->n_edges; }
  std::size_t n_classes() const { return g_->n_classes; }
  std::size_t feature_dim() const { return g_->feature_dim(); }
  const Tensor& features() const { return g_->features; }
  int degree(int i) const { return g_->degree(i); }
  std::span<const int> neighbors(int i) const { return g_->neighbors(i); }
  bool has_edge(int u, int v) const { return g_->has_edge(u, v); }
  std::vector<std::pair<int, int>> edge_list() const { return g_->edge_list(); }

 private:
  const Graph* g_;
};

// Construction from raw ingredients; validates, symmetrizes, deduplicates,
// and drops self-loops (count reported via dropped_self_loops).
Graph build_graph(std::size_t n_nodes, const std::vector<std::pair<int, int>>& edges,
                  Tensor features, std::vector<int> labels, std::size_t n_classes,
                  std::size_t* dropped_self_loops = nullptr);

// Manifest-driven IO. The manifest is a JSON object
//   {"edges": path, "features": path, "labels": path|null, "n_classes": int}
// with paths resolved relative to the manifest file.
Graph load_graph(const std::string& manifest_path);
// Writes edges.tsv / features.csv / labels.txt / manifest.json into dir and
// returns the manifest path. Features round-trip bit-exactly.
std::string write_graph(const Graph& g, const std::string& dir);

struct SplitAssignment {
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  std::uint64_t seed = 0;
};

// Random (unstratified) split of the labeled nodes; |train|:|val| rounds
// toward train. Deterministic per seed.
SplitAssignment split_train_val(const Graph& g, double ratio, std::uint64_t seed);

std::vector<int> degrees(const Graph& g);

// Symmetric degree-normalized adjacency with self-loops,
// D^{-1/2} (A+I) D^{-1/2}, as used by graph-convolution layers.
SparseMatrix normalized_adjacency(const UnlabeledGraph& g);
// Row-normalized adjacency D^{-1} A without self-loops; zero rows for
// isolated nodes.
SparseMatrix mean_aggregation_matrix(const UnlabeledGraph& g);

}  // namespace soga
