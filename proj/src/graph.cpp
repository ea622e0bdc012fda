#include "soga/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "soga/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace soga {

bool Graph::has_edge(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(n_edges);
  for (std::size_t u = 0; u < n_nodes; ++u)
    for (std::size_t k = adj_ptr[u]; k < adj_ptr[u + 1]; ++k)
      if (static_cast<int>(u) < adj[k]) out.emplace_back(static_cast<int>(u), adj[k]);
  return out;
}

Graph build_graph(std::size_t n_nodes, const std::vector<std::pair<int, int>>& edges,
                  Tensor features, std::vector<int> labels, std::size_t n_classes,
                  std::size_t* dropped_self_loops) {
  if (features.rows != n_nodes)
    throw DataError("feature-row count " + std::to_string(features.rows) +
                    " != node count " + std::to_string(n_nodes));
  if (!all_finite(features)) throw DataError("features contain NaN or Inf");
  if (!labels.empty()) {
    if (labels.size() != n_nodes)
      throw DataError("label count " + std::to_string(labels.size()) +
                      " != node count " + std::to_string(n_nodes));
    for (int y : labels)
      if (y < 0 || static_cast<std::size_t>(y) >= n_classes)
        throw DataError("label " + std::to_string(y) + " outside [0, " +
                        std::to_string(n_classes) + ")");
  }

  std::size_t self_loops = 0;
  std::vector<std::pair<int, int>> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n_nodes ||
        static_cast<std::size_t>(v) >= n_nodes)
      throw DataError("node index out of range: edge (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") with n=" + std::to_string(n_nodes));
    if (u == v) {
      self_loops++;
      continue;
    }
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  if (dropped_self_loops) *dropped_self_loops = self_loops;

  Graph g;
  g.n_nodes = n_nodes;
  g.n_edges = canon.size();
  g.n_classes = n_classes;
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.adj_ptr.assign(n_nodes + 1, 0);
  for (auto [u, v] : canon) {
    g.adj_ptr[u + 1]++;
    g.adj_ptr[v + 1]++;
  }
  for (std::size_t i = 0; i < n_nodes; ++i) g.adj_ptr[i + 1] += g.adj_ptr[i];
  g.adj.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.adj_ptr.begin(), g.adj_ptr.end() - 1);
  for (auto [u, v] : canon) {
    g.adj[cursor[u]++] = v;
    g.adj[cursor[v]++] = u;
  }
  // canon is sorted, so each neighbor list comes out strictly increasing.
  return g;
}

namespace {

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("missing file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text,
                                                 const std::string& origin) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long u, v;
    if (!(ls >> u)) continue;  // blank or comment-only line
    if (!(ls >> v))
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected 'u<TAB>v'");
    std::string extra;
    if (ls >> extra)
      throw DataError(origin + ":" + std::to_string(lineno) + ": trailing token '" +
                      extra + "'");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return edges;
}

Tensor parse_feature_csv(const std::string& text, const std::string& origin) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          used++;
        if (used != cell.size()) throw std::invalid_argument(cell);
        values.push_back(v);
      } catch (const std::exception&) {
        throw DataError(origin + ":" + std::to_string(lineno) +
                        ": non-numeric feature token '" + cell + "'");
      }
      row_cols++;
    }
    if (rows == 0)
      cols = row_cols;
    else if (row_cols != cols)
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(cols) + " columns, got " + std::to_string(row_cols));
    rows++;
  }
  Tensor t(rows, cols);
  t.data = std::move(values);
  return t;
}

std::vector<int> parse_label_file(const std::string& text, const std::string& origin) {
  std::vector<int> labels;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(line, &used));
      while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used])))
        used++;
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": bad label '" + line + "'");
    }
  }
  return labels;
}

}  // namespace

Graph load_graph(const std::string& manifest_path) {
  const fs::path mpath(manifest_path);
  json manifest;
  try {
    manifest = json::parse(read_text_file(mpath));
  } catch (const json::parse_error& e) {
    throw DataError("bad manifest " + manifest_path + ": " + e.what());
  }
  for (const char* key : {"edges", "features", "n_classes"})
    if (!manifest.contains(key))
      throw DataError("manifest missing key '" + std::string(key) + "'");

  const fs::path base = mpath.parent_path();
  const fs::path epath = base / manifest.at("edges").get<std::string>();
  const fs::path fpath = base / manifest.at("features").get<std::string>();

  Tensor features = parse_feature_csv(read_text_file(fpath), fpath.string());
  auto edges = parse_edge_list(read_text_file(epath), epath.string());

  std::vector<int> labels;
  if (manifest.contains("labels") && !manifest.at("labels").is_null()) {
    const fs::path lpath = base / manifest.at("labels").get<std::string>();
    labels = parse_label_file(read_text_file(lpath), lpath.string());
  }

  const auto n_classes = manifest.at("n_classes").get<std::size_t>();
  std::size_t dropped = 0;
  Graph g = build_graph(features.rows, edges, std::move(features), std::move(labels),
                        n_classes, &dropped);
  if (dropped > 0)
    std::fprintf(stderr, "warning: dropped %zu self-loop(s) from %s\n", dropped,
                 epath.string().c_str());
  return g;
}

std::string write_graph(const Graph& g, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    std::ofstream out(base / "edges.tsv");
    out << "# u\tv\n";
    for (auto [u, v] : g.edge_list()) out << u << '\t' << v << '\n';
  }
  {
    std::ofstream out(base / "features.csv");
    char buf[32];
    for (std::size_t r = 0; r < g.features.rows; ++r) {
      for (std::size_t c = 0; c < g.features.cols; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", g.features.at(r, c));
        out << (c ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  if (g.has_labels()) {
    std::ofstream out(base / "labels.txt");
    for (int y : g.labels) out << y << '\n';
  }

  json manifest = {
      {"edges", "edges.tsv"},
      {"features", "features.csv"},
      {"labels", g.has_labels() ? json("labels.txt") : json(nullptr)},
      {"n_classes", g.n_classes},
  };
  const fs::path mpath = base / "manifest.json";
  std::ofstream out(mpath);
  out << manifest.dump(2) << '\n';
  return mpath.string();
}

SplitAssignment split_train_val(const Graph& g, double ratio, std::uint64_t seed) {
  if (!g.has_labels()) throw DataError("split_train_val: graph has no labels");
  if (ratio <= 0.0 || ratio >= 1.0)
    throw ConfigError("split ratio must be in (0, 1), got " + std::to_string(ratio));

  std::vector<int> idx(g.n_nodes);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  // Round toward train: the validation side gets the floor. Snap values that
  // are an ulp away from an integer so ratios like 0.8 behave exactly.
  const double raw = (1.0 - ratio) * static_cast<double>(idx.size());
  const double snapped =
      std::abs(raw - std::round(raw)) < 1e-9 * std::max(1.0, raw) ? std::round(raw) : raw;
  const auto n_val = static_cast<std::size_t>(std::floor(snapped));
  SplitAssignment split;
  split.seed = seed;
  split.val_idx.assign(idx.begin(), idx.begin() + n_val);
  split.train_idx.assign(idx.begin() + n_val, idx.end());
  std::sort(split.val_idx.begin(), split.val_idx.end());
  std::sort(split.train_idx.begin(), split.train_idx.end());
  return split;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> d(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) d[i] = g.degree(static_cast<int>(i));
  return d;
}

SparseMatrix normalized_adjacency(const UnlabeledGraph& g) {
  const std::size_t n = g.n_nodes();
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.assign(n + 1, 0);
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.row_ptr[i + 1] = s.row_ptr[i] + g.degree(static_cast<int>(i)) + 1;  // +1 self-loop
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(static_cast<int>(i)) + 1));
  }
  s.col.resize(s.row_ptr[n]);
  s.val.resize(s.row_ptr[n]);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = s.row_ptr[i];
    bool self_written = false;
    for (int j : g.neighbors(static_cast<int>(i))) {
      if (!self_written && j > static_cast<int>(i)) {
        s.col[k] = static_cast<int>(i);
        s.val[k] = inv_sqrt[i] * inv_sqrt[i];
        self_written = true;
        k++;
      }
      s.col[k] = j;
      s.val[k] = inv_sqrt[i] * inv_sqrt[j];
      k++;
    }
    if (!self_written) {
      s.col[k] = static_cast<int>(i);
      s.val[k] = inv_sqrt[i] * inv_sqrt[i];
    }
  }
  return s;
}

SparseMatrix mean_aggregation_matrix(const UnlabeledGraph& g) {
  const std::size_t n = g.n_nodes();
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    s.row_ptr[i + 1] = s.row_ptr[i] + g.degree(static_cast<int>(i));
  s.col.resize(s.row_ptr[n]);
  s.val.resize(s.row_ptr[n]);
  for (std::size_t i = 0; i < n; ++i) {
    const int d = g.degree(static_cast<int>(i));
    std::size_t k = s.row_ptr[i];
    for (int j : g.neighbors(static_cast<int>(i))) {
      s.col[k] = j;
      s.val[k] = 1.0 / d;
      k++;
    }
  }
  return s;
}

}  // namespace soga
