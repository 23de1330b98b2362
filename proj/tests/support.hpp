#pragma once

// Test fixtures and brute-force oracles. Oracles here deliberately avoid the
// library's algorithms (no Kruskal, no Dijkstra) so they can check them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "umstnet/umstnet.hpp"

namespace testing_support {

using namespace umstnet;

inline std::vector<Hotspot> grid_hotspots(std::uint32_t n) {
  std::vector<Hotspot> hs;
  for (std::uint32_t i = 0; i < n; ++i)
    hs.push_back({i, 40.0 + 0.01 * static_cast<double>(i / 4), -83.0 + 0.01 * static_cast<double>(i % 4),
                  "h" + std::to_string(i)});
  return hs;
}

inline HotspotGraph city_graph(std::uint32_t n, std::uint64_t seed) {
  SyntheticCityConfig cfg;
  cfg.n_hotspots = n;
  cfg.rng_seed = seed;
  return build_complete_graph(generate_synthetic_city(cfg), haversine_provider());
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability p; integer-valued weights so ties occur.
inline HotspotGraph random_connected_graph(std::uint32_t n, double p, std::mt19937_64& gen, int max_w = 9) {
  std::uniform_int_distribution<int> w(1, max_w);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::set<std::pair<NodeId, NodeId>> keys;
  std::vector<Edge> edges;
  auto add = [&](NodeId a, NodeId b) {
    if (a == b) return;
    const auto k = std::minmax(a, b);
    if (!keys.insert({k.first, k.second}).second) return;
    const double d = w(gen);
    edges.push_back({k.first, k.second, d, d * 120.0});
  };
  for (NodeId v = 1; v < n; ++v) add(v, std::uniform_int_distribution<NodeId>(0, v - 1)(gen));
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (coin(gen) < p) add(a, b);
  return HotspotGraph(grid_hotspots(n), edges);
}

/// Connected components by breadth-first search.
inline bool bfs_connected(std::uint32_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (n == 0) return true;
  std::vector<std::vector<NodeId>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == n;
}

inline bool bfs_connected(const HotspotGraph& g, const std::vector<char>& removed = {}) {
  std::vector<std::pair<NodeId, NodeId>> es;
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (removed.empty() || !removed[i]) es.emplace_back(edges[i].u, edges[i].v);
  return bfs_connected(static_cast<std::uint32_t>(g.node_count()), es);
}

/// Minimum spanning-tree weight by enumerating every acyclic (n-1)-edge
/// subset. `skip` marks edges that may not be used. Returns the set of
/// all minimum trees (as edge-index lists) through `trees` when non-null.
inline double brute_mst(const HotspotGraph& g, WeightKind kind, const std::vector<char>& skip = {},
                        std::vector<std::vector<std::size_t>>* trees = nullptr) {
  const auto n = g.node_count();
  const auto edges = g.edges();
  const auto m = edges.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen;
  std::vector<std::vector<std::size_t>> best_trees;

  // Tiny union-find on a copy per level: n <= 8 keeps this cheap.
  std::function<void(std::size_t, std::vector<NodeId>, double)> rec = [&](std::size_t i, std::vector<NodeId> parent,
                                                                           double w) {
    if (chosen.size() == n - 1) {
      if (w < best - 1e-12) {
        best = w;
        best_trees.clear();
      }
      if (std::abs(w - best) <= 1e-12) best_trees.push_back(chosen);
      return;
    }
    if (i == m || m - i < (n - 1) - chosen.size()) return;
    auto root = [&](NodeId x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    if (skip.empty() || !skip[i]) {
      const auto a = root(edges[i].u), b = root(edges[i].v);
      if (a != b) {
        auto p2 = parent;
        p2[a] = b;
        chosen.push_back(i);
        rec(i + 1, std::move(p2), w + edges[i].weight(kind));
        chosen.pop_back();
      }
    }
    rec(i + 1, std::move(parent), w);
  };
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  rec(0, parent, 0.0);
  if (trees) *trees = std::move(best_trees);
  return best;
}

/// Cheapest simple path cost by exhaustive depth-first search.
inline double brute_shortest(const HotspotGraph& g, NodeId s, NodeId t, WeightKind kind) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> on(g.node_count(), 0);
  std::function<void(NodeId, double)> dfs = [&](NodeId u, double c) {
    if (c >= best) return;
    if (u == t) {
      best = c;
      return;
    }
    on[u] = 1;
    for (const auto& e : g.edges()) {
      if (e.u != u && e.v != u) continue;
      const auto v = e.other(u);
      if (!on[v]) dfs(v, c + e.weight(kind));
    }
    on[u] = 0;
  };
  dfs(s, 0.0);
  return best;
}

inline double path_cost(const HotspotGraph& g, const std::vector<NodeId>& nodes, WeightKind kind) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) c += g.find_edge(nodes[i], nodes[i + 1])->weight(kind);
  return c;
}

inline std::vector<DeliveryRequest> small_workload(const HotspotGraph& g, std::uint32_t n, std::uint64_t seed) {
  WorkloadConfig cfg;
  cfg.total_requests = n;
  cfg.rng_seed = seed;
  return generate_requests(g, cfg);
}

}  // namespace testing_support
