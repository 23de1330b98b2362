#pragma once

// Hotspot graph: nodes with coordinates, canonical undirected edges carrying a
// distance and a travel time, plus the primitives the rest of the library
// builds on (complete-graph construction, Kruskal MST, Dijkstra with
// lexicographic tie-breaking, connectivity).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/union_find.hpp"

namespace umstnet {

using NodeId = std::uint32_t;

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultSpeedKmh = 30.0;

enum class WeightKind { Distance, TravelTime };

struct Hotspot {
  NodeId id = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::string tract_label;

  friend bool operator==(const Hotspot&, const Hotspot&) = default;
};

struct EdgeKey {
  NodeId u = 0;
  NodeId v = 0;

  static constexpr EdgeKey canonical(NodeId a, NodeId b) noexcept {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
  }

  friend constexpr auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double distance_km = 0.0;
  double travel_time_s = 0.0;

  EdgeKey key() const noexcept { return {u, v}; }
  double weight(WeightKind kind) const noexcept {
    return kind == WeightKind::Distance ? distance_km : travel_time_s;
  }
  NodeId other(NodeId x) const noexcept { return x == u ? v : u; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool valid_coordinates(double lat, double lon) noexcept {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
         lon <= 180.0;
}

/// Great-circle distance in km on a sphere of radius 6371 km.
inline double haversine_distance(const Hotspot& a, const Hotspot& b) noexcept {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = a.lat * deg;
  const double phi2 = b.lat * deg;
  const double dphi = (b.lat - a.lat) * deg;
  const double dlambda = (b.lon - a.lon) * deg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

inline double travel_time_for(double distance_km, double speed_kmh) noexcept {
  return distance_km / speed_kmh * 3600.0;
}

// Any callable mapping a hotspot pair to kilometres. Road-network providers
// plug in here; haversine is the default.
using DistanceProvider = std::function<double(const Hotspot&, const Hotspot&)>;

inline DistanceProvider haversine_provider() { return [](const Hotspot& a, const Hotspot& b) { return haversine_distance(a, b); }; }

/// Immutable weighted undirected graph over hotspots.
///
/// Edges are stored once in canonical (u < v) orientation and sorted by
/// (u, v). The adjacency index lists each node's neighbours in ascending id
/// order, which shortest-path tie-breaking relies on.
class HotspotGraph {
 public:
  struct Adjacent {
    NodeId node;
    std::uint32_t edge;
  };

  HotspotGraph() = default;

  HotspotGraph(std::vector<Hotspot> hotspots, std::vector<Edge> edges)
      : hotspots_(std::move(hotspots)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < hotspots_.size(); ++i) {
      const auto& h = hotspots_[i];
      if (h.id != i)
        throw Error(ErrorKind::InvalidInput, "hotspot ids must be contiguous from 0; position " + std::to_string(i) +
                                                 " has id " + std::to_string(h.id));
      if (!valid_coordinates(h.lat, h.lon))
        throw Error(ErrorKind::InvalidInput, "hotspot " + std::to_string(i) + " has invalid coordinates");
    }
    const auto n = static_cast<NodeId>(hotspots_.size());
    for (auto& e : edges_) {
      if (e.u == e.v) throw Error(ErrorKind::InvalidInput, "self-loop at node " + std::to_string(e.u));
      if (e.u >= n || e.v >= n)
        throw Error(ErrorKind::InvalidInput,
                    "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") references a missing node");
      if (!(e.distance_km >= 0.0) || !std::isfinite(e.distance_km))
        throw Error(ErrorKind::InvalidInput, "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                                 ") has a negative or non-finite distance");
      if (!(e.travel_time_s > 0.0) || !std::isfinite(e.travel_time_s))
        throw Error(ErrorKind::InvalidInput, "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                                 ") must have a positive travel time");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i].key() == edges_[i - 1].key())
        throw Error(ErrorKind::InvalidInput, "duplicate edge (" + std::to_string(edges_[i].u) + "," +
                                                 std::to_string(edges_[i].v) + ")");
    }
    build_adjacency();
  }

  std::size_t node_count() const noexcept { return hotspots_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Hotspot> hotspots() const noexcept { return hotspots_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Hotspot& hotspot(NodeId id) const { return hotspots_.at(id); }

  std::span<const Adjacent> neighbors(NodeId node) const noexcept {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }

  bool contains(NodeId node) const noexcept { return node < hotspots_.size(); }

  /// Edge joining a and b, if any.
  const Edge* find_edge(NodeId a, NodeId b) const noexcept {
    const auto key = EdgeKey::canonical(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                               [](const Edge& e, const EdgeKey& k) { return e.key() < k; });
    if (it == edges_.end() || it->key() != key) return nullptr;
    return &*it;
  }

  bool is_complete() const noexcept {
    const auto n = node_count();
    return edge_count() == n * (n - 1) / 2;
  }

  /// Same node set, restricted to the given edges (which must come from this graph).
  HotspotGraph with_edges(std::vector<Edge> edges) const { return HotspotGraph(hotspots_, std::move(edges)); }

  friend bool operator==(const HotspotGraph& a, const HotspotGraph& b) {
    return a.hotspots_ == b.hotspots_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    const auto n = hotspots_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n]);
    auto cursor = offsets_;
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      adjacency_[cursor[e.u]++] = {e.v, i};
      adjacency_[cursor[e.v]++] = {e.u, i};
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
    }
  }

  std::vector<Hotspot> hotspots_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Adjacent> adjacency_;
};

inline HotspotGraph build_complete_graph(std::vector<Hotspot> hotspots, const DistanceProvider& distance,
                                         double speed_kmh = kDefaultSpeedKmh) {
  if (hotspots.size() < 2) throw Error(ErrorKind::InvalidInput, "a complete graph needs at least 2 hotspots");
  if (!(speed_kmh > 0.0) || !std::isfinite(speed_kmh))
    throw Error(ErrorKind::InvalidInput, "speed_kmh must be positive");
  std::vector<Edge> edges;
  edges.reserve(hotspots.size() * (hotspots.size() - 1) / 2);
  for (std::size_t i = 0; i < hotspots.size(); ++i) {
    for (std::size_t j = i + 1; j < hotspots.size(); ++j) {
      const double d = distance(hotspots[i], hotspots[j]);
      double t = travel_time_for(d, speed_kmh);
      // Coincident hotspots still need a strictly positive traversal time.
      if (!(t > 0.0)) t = std::numeric_limits<double>::min();
      edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d, t});
    }
  }
  return HotspotGraph(std::move(hotspots), std::move(edges));
}

/// First node (in id order) not reachable from node 0, if any.
inline std::optional<NodeId> first_unreachable(const HotspotGraph& g) {
  const auto n = g.node_count();
  if (n == 0) return std::nullopt;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const auto& adj : g.neighbors(u)) {
      if (!seen[adj.node]) {
        seen[adj.node] = 1;
        stack.push_back(adj.node);
      }
    }
  }
  for (NodeId i = 0; i < n; ++i)
    if (!seen[i]) return i;
  return std::nullopt;
}

inline bool is_connected(const HotspotGraph& g) { return !first_unreachable(g).has_value(); }

/// Kruskal over the canonical order (weight, u, v). Returns the n-1 tree edges
/// sorted by (u, v).
inline std::vector<Edge> minimum_spanning_tree(const HotspotGraph& g, WeightKind weight) {
  const auto n = g.node_count();
  std::vector<const Edge*> order;
  order.reserve(g.edge_count());
  for (const auto& e : g.edges()) order.push_back(&e);
  std::sort(order.begin(), order.end(), [weight](const Edge* a, const Edge* b) {
    const double wa = a->weight(weight);
    const double wb = b->weight(weight);
    if (wa != wb) return wa < wb;
    return a->key() < b->key();
  });

  UnionFind<NodeId> uf(n);
  std::vector<Edge> tree;
  tree.reserve(n > 0 ? n - 1 : 0);
  for (const Edge* e : order) {
    if (uf.unite(e->u, e->v)) {
      tree.push_back(*e);
      if (tree.size() + 1 == n) break;
    }
  }
  if (n > 0 && tree.size() + 1 != n) {
    for (NodeId i = 1; i < n; ++i) {
      if (!uf.same(0, i))
        throw Error(ErrorKind::DisconnectedGraph, "node " + std::to_string(i) + " is unreachable from node 0");
    }
  }
  std::sort(tree.begin(), tree.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
  return tree;
}

inline double total_weight(std::span<const Edge> edges, WeightKind weight) {
  double sum = 0.0;
  for (const auto& e : edges) sum += e.weight(weight);
  return sum;
}

struct Path {
  std::vector<NodeId> nodes;
  double cost = 0.0;
};

/// Single-target Dijkstra: cost from every node to `target`.
inline std::vector<double> costs_to(const HotspotGraph& g, NodeId target, WeightKind weight) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.push({0.0, target});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& adj : g.neighbors(u)) {
      const double nd = d + g.edges()[adj.edge].weight(weight);
      if (nd < dist[adj.node]) {
        dist[adj.node] = nd;
        heap.push({nd, adj.node});
      }
    }
  }
  return dist;
}

namespace detail {

inline bool on_shortest_path(double step, double remaining_after, double remaining_here) noexcept {
  const double tol = 1e-12 * std::max(1.0, std::abs(remaining_here));
  return std::abs(step + remaining_after - remaining_here) <= tol;
}

}  // namespace detail

/// Next node after `from` on the lexicographically smallest minimum-cost path
/// to the target whose cost vector is `to_target`.
inline NodeId next_hop_toward(const HotspotGraph& g, NodeId from, std::span<const double> to_target,
                              WeightKind weight) {
  for (const auto& adj : g.neighbors(from)) {
    const double step = g.edges()[adj.edge].weight(weight);
    if (std::isfinite(to_target[adj.node]) && detail::on_shortest_path(step, to_target[adj.node], to_target[from]))
      return adj.node;
  }
  throw Error(ErrorKind::Unreachable, "no shortest-path successor from node " + std::to_string(from));
}

/// Minimum-cost path; among equal-cost paths the lexicographically smallest
/// node sequence wins. Cost is summed along the returned path.
inline Path shortest_path(const HotspotGraph& g, NodeId src, NodeId dst, WeightKind weight) {
  if (!g.contains(src) || !g.contains(dst)) throw Error(ErrorKind::InvalidInput, "shortest_path: node out of range");
  if (src == dst) return {{src}, 0.0};
  const auto to_dst = costs_to(g, dst, weight);
  if (!std::isfinite(to_dst[src]))
    throw Error(ErrorKind::Unreachable,
                "no path from " + std::to_string(src) + " to " + std::to_string(dst));
  Path path;
  path.nodes.push_back(src);
  NodeId at = src;
  while (at != dst) {
    const NodeId next = next_hop_toward(g, at, to_dst, weight);
    path.cost += g.find_edge(at, next)->weight(weight);
    path.nodes.push_back(next);
    at = next;
  }
  return path;
}

/// Row-major n x n matrix of shortest-path costs.
inline std::vector<double> all_pairs_costs(const HotspotGraph& g, WeightKind weight) {
  const auto n = g.node_count();
  std::vector<double> out(n * n);
  for (NodeId t = 0; t < n; ++t) {
    const auto col = costs_to(g, t, weight);
    for (NodeId s = 0; s < n; ++s) out[s * n + t] = col[s];
  }
  return out;
}

}  // namespace umstnet
