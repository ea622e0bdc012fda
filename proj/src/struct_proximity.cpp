#include "soga/struct_proximity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "soga/error.hpp"

namespace soga {

RingSequences ring_sequences(const UnlabeledGraph& g, int max_hop) {
  if (max_hop < 0) throw ConfigError("ring_sequences: max_hop must be >= 0");
  const std::size_t n = g.n_nodes();
  RingSequences rs;
  rs.max_hop = max_hop;
  rs.per_node.assign(n, {});

  std::vector<int> hop_of(n);
  std::vector<int> frontier, next;
  for (std::size_t s = 0; s < n; ++s) {
    auto& rings = rs.per_node[s];
    rings.assign(max_hop + 1, {});
    std::fill(hop_of.begin(), hop_of.end(), -1);
    hop_of[s] = 0;
    rings[0].push_back(g.degree(static_cast<int>(s)));
    frontier.assign(1, static_cast<int>(s));
    for (int h = 1; h <= max_hop && !frontier.empty(); ++h) {
      next.clear();
      for (int u : frontier)
        for (int v : g.neighbors(u))
          if (hop_of[v] < 0) {
            hop_of[v] = h;
            next.push_back(v);
            rings[h].push_back(g.degree(v));
          }
      std::sort(rings[h].begin(), rings[h].end());
      frontier.swap(next);
    }
  }
  return rs;
}

double dtw_degree_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty())
    throw ShapeError("dtw_degree_distance: one sequence is empty");
  const std::size_t m = a.size(), n = b.size();
  auto cost = [&](std::size_t i, std::size_t j) {
    const double x = a[i] + 1.0, y = b[j] + 1.0;
    return std::max(x, y) / std::min(x, y) - 1.0;
  };
  // Rolling-row DP over monotone alignments.
  std::vector<double> prev(n), cur(n);
  prev[0] = cost(0, 0);
  for (std::size_t j = 1; j < n; ++j) prev[j] = prev[j - 1] + cost(0, j);
  for (std::size_t i = 1; i < m; ++i) {
    cur[0] = prev[0] + cost(i, 0);
    for (std::size_t j = 1; j < n; ++j)
      cur[j] = cost(i, j) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    prev.swap(cur);
  }
  return prev[n - 1];
}

double struct_distance(const std::vector<std::vector<int>>& a,
                       const std::vector<std::vector<int>>& b) {
  if (a.size() != b.size())
    throw ShapeError("struct_distance: ring sets have different hop counts");
  double total = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) {
    const bool ea = a[h].empty(), eb = b[h].empty();
    if (ea && eb) continue;
    if (ea != eb) break;  // truncate at the previous hop
    total += dtw_degree_distance(a[h], b[h]);
  }
  return total;
}

namespace {

struct ScoredPair {
  double dist;
  int u, v;
  bool operator<(const ScoredPair& o) const {
    if (dist != o.dist) return dist < o.dist;
    if (u != o.u) return u < o.u;
    return v < o.v;
  }
};

int log_bin(int degree, double base) {
  return static_cast<int>(std::floor(std::log(degree + 1.0) / std::log(base)));
}

PairSet select_top(const UnlabeledGraph& g, const StructPairConfig& cfg,
                   std::vector<ScoredPair>& scored, const char* who) {
  const std::size_t kappa = cfg.kappa == 0 ? g.n_edges() : cfg.kappa;
  std::sort(scored.begin(), scored.end());
  if (scored.size() > kappa) scored.resize(kappa);
  if (scored.size() < kappa)
    std::fprintf(stderr, "warning: %s found %zu candidate pairs, fewer than kappa=%zu\n",
                 who, scored.size(), kappa);
  PairSet out;
  out.local = g.edge_list();
  out.structural.reserve(scored.size());
  out.distances.reserve(scored.size());
  for (const ScoredPair& p : scored) {
    out.structural.emplace_back(p.u, p.v);
    out.distances.push_back(p.dist);
  }
  return out;
}

std::vector<std::pair<int, int>> candidate_pairs(const UnlabeledGraph& g,
                                                 const StructPairConfig& cfg) {
  const int n = static_cast<int>(g.n_nodes());
  std::vector<std::pair<int, int>> cands;
  if (cfg.use_binning) {
    std::vector<int> bin(n);
    for (int i = 0; i < n; ++i) bin[i] = log_bin(g.degree(i), cfg.bin_base);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (std::abs(bin[u] - bin[v]) <= 1) cands.emplace_back(u, v);
  } else {
    cands.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) cands.emplace_back(u, v);
  }
  if (cfg.exclude_edges) {
    std::erase_if(cands, [&](const std::pair<int, int>& p) {
      return g.has_edge(p.first, p.second);
    });
  }
  return cands;
}

std::vector<ScoredPair> score_pairs(const RingSequences& rings,
                                    const std::vector<std::pair<int, int>>& cands,
                                    int jobs) {
  std::vector<ScoredPair> scored(cands.size());
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto [u, v] = cands[i];
      scored[i] = {struct_distance(rings.per_node[u], rings.per_node[v]), u, v};
    }
  };
  if (jobs <= 1 || cands.size() < 1024) {
    worker(0, cands.size());
  } else {
    // Fixed slot per pair keeps the result independent of thread count.
    std::vector<std::thread> pool;
    const std::size_t chunk = (cands.size() + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      const std::size_t lo = std::min(cands.size(), t * chunk);
      const std::size_t hi = std::min(cands.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return scored;
}

}  // namespace

PairSet mine_pairs(const UnlabeledGraph& g, const StructPairConfig& cfg,
                   MiningStats* stats) {
  if (g.n_nodes() < 2) throw DataError("mine_pairs: need at least 2 nodes");
  const auto t0 = std::chrono::steady_clock::now();
  const RingSequences rings = ring_sequences(g, cfg.max_hop);
  auto cands = candidate_pairs(g, cfg);
  auto scored = score_pairs(rings, cands, cfg.jobs);
  PairSet out = select_top(g, cfg, scored, "mine_pairs");
  if (stats) {
    stats->candidates = cands.size();
    stats->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

PairSet brute_force_pairs(const UnlabeledGraph& g, const StructPairConfig& cfg) {
  if (g.n_nodes() > 2000)
    throw ConfigError("brute_force_pairs: guarded to n <= 2000, got " +
                      std::to_string(g.n_nodes()));
  const int n = static_cast<int>(g.n_nodes());
  const RingSequences rings = ring_sequences(g, cfg.max_hop);
  std::vector<ScoredPair> scored;
  scored.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (cfg.exclude_edges && g.has_edge(u, v)) continue;
      scored.push_back({struct_distance(rings.per_node[u], rings.per_node[v]), u, v});
    }
  return select_top(g, cfg, scored, "brute_force_pairs");
}

void write_pairs_tsv(const PairSet& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open pair file for writing: " + path);
  char buf[32];
  for (std::size_t i = 0; i < pairs.structural.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", pairs.distances[i]);
    out << pairs.structural[i].first << '\t' << pairs.structural[i].second << '\t' << buf
        << '\n';
  }
}

PairSet load_pairs_tsv(const std::string& path, const UnlabeledGraph& g) {
  std::ifstream in(path);
  if (!in) throw DataError("missing pair file: " + path);
  PairSet out;
  out.local = g.edge_list();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long u, v;
    double d;
    if (!(ls >> u >> v >> d))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 'u<TAB>v<TAB>distance'");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= g.n_nodes() ||
        static_cast<std::size_t>(v) >= g.n_nodes())
      throw DataError(path + ":" + std::to_string(lineno) + ": node index out of range");
    out.structural.emplace_back(static_cast<int>(u), static_cast<int>(v));
    out.distances.push_back(d);
  }
  return out;
}

}  // namespace soga
