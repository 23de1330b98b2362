#pragma once

// Union of minimum spanning trees over randomly thinned copies of a graph,
// plus the analyses that sit on top of it: edge-frequency tiers, stretch
// against the source graph, and the next-hop routing table used by the
// simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/rng.hpp"
#include "umstnet/union_find.hpp"

namespace umstnet {

struct UmstConfig {
  std::uint32_t k_trees = 20;
  double drop_rate = 0.5;
  std::uint64_t rng_seed = 0;
  std::uint32_t max_resample_attempts = 100;
  WeightKind mst_weight = WeightKind::Distance;
  WeightKind route_weight = WeightKind::TravelTime;

  friend bool operator==(const UmstConfig&, const UmstConfig&) = default;
};

/// Source-graph edges removed in each iteration: floor(rho * |E|).
///
/// The small epsilon keeps decimal drop rates from losing an edge to binary
/// rounding (0.29 * 100 evaluates to 28.999...).
inline std::size_t drop_count(double drop_rate, std::size_t edge_count) noexcept {
  return static_cast<std::size_t>(std::floor(drop_rate * static_cast<double>(edge_count) + 1e-9));
}

struct UmstBackbone {
  HotspotGraph graph;                    // all source nodes, union edges only
  std::vector<std::uint32_t> frequency;  // parallel to graph.edges()
  UmstConfig config;

  std::uint32_t frequency_of(NodeId a, NodeId b) const {
    const Edge* e = graph.find_edge(a, b);
    if (e == nullptr) return 0;
    return frequency[static_cast<std::size_t>(e - graph.edges().data())];
  }

  friend bool operator==(const UmstBackbone&, const UmstBackbone&) = default;
};

namespace detail {

inline void check_umst_config(const HotspotGraph& g, const UmstConfig& cfg) {
  if (cfg.k_trees < 1) throw Error(ErrorKind::InvalidConfig, "k_trees must be >= 1");
  if (!(cfg.drop_rate >= 0.0 && cfg.drop_rate < 1.0))
    throw Error(ErrorKind::InvalidConfig, "drop_rate must lie in [0, 1)");
  if (cfg.max_resample_attempts < 1) throw Error(ErrorKind::InvalidConfig, "max_resample_attempts must be >= 1");
  if (g.node_count() < 2) throw Error(ErrorKind::InvalidConfig, "graph needs at least 2 hotspots");
  if (auto missing = first_unreachable(g))
    throw Error(ErrorKind::InvalidConfig, "source graph is disconnected (node " + std::to_string(*missing) +
                                              " unreachable from node 0)");
  const auto dropped = drop_count(cfg.drop_rate, g.edge_count());
  if (g.edge_count() - dropped < g.node_count() - 1)
    throw Error(ErrorKind::InvalidConfig, "dropping " + std::to_string(dropped) + " of " +
                                              std::to_string(g.edge_count()) +
                                              " edges leaves too few to span " + std::to_string(g.node_count()) +
                                              " nodes");
}

}  // namespace detail

/// Builds the union of cfg.k_trees MSTs. Tree k is computed on the source graph
/// minus a uniform random subset of floor(rho |E|) edges drawn from child
/// stream k of cfg.rng_seed. A disconnected residual is redrawn from the same
/// stream, up to cfg.max_resample_attempts draws per tree.
inline UmstBackbone build_umst(const HotspotGraph& g, const UmstConfig& cfg) {
  detail::check_umst_config(g, cfg);
  const auto n = g.node_count();
  const auto m = g.edge_count();
  const auto n_drop = drop_count(cfg.drop_rate, m);

  // Kruskal order is shared by every iteration; dropping just masks entries.
  std::vector<std::uint32_t> order(m);
  for (std::uint32_t i = 0; i < m; ++i) order[i] = i;
  const auto edges = g.edges();
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double wa = edges[a].weight(cfg.mst_weight);
    const double wb = edges[b].weight(cfg.mst_weight);
    if (wa != wb) return wa < wb;
    return edges[a].key() < edges[b].key();
  });

  std::vector<std::uint32_t> counts(m, 0);
  std::vector<char> dropped(m, 0);
  std::vector<std::uint32_t> tree;
  tree.reserve(n - 1);

  for (std::uint32_t k = 0; k < cfg.k_trees; ++k) {
    Rng rng = Rng::child(cfg.rng_seed, k);
    bool spanned = false;
    for (std::uint32_t attempt = 0; attempt < cfg.max_resample_attempts && !spanned; ++attempt) {
      std::fill(dropped.begin(), dropped.end(), 0);
      for (auto idx : rng.sample_without_replacement(m, n_drop)) dropped[idx] = 1;

      UnionFind<NodeId> uf(n);
      tree.clear();
      for (auto idx : order) {
        if (dropped[idx]) continue;
        if (uf.unite(edges[idx].u, edges[idx].v)) {
          tree.push_back(idx);
          if (tree.size() + 1 == n) break;
        }
      }
      spanned = tree.size() + 1 == n;
    }
    if (!spanned)
      throw Error(ErrorKind::Construction, "iteration " + std::to_string(k) + " produced a disconnected residual in " +
                                               std::to_string(cfg.max_resample_attempts) + " attempts");
    for (auto idx : tree) ++counts[idx];
  }

  std::vector<Edge> kept;
  std::vector<std::uint32_t> freq;
  for (std::size_t i = 0; i < m; ++i) {
    if (counts[i] > 0) {
      kept.push_back(edges[i]);
      freq.push_back(counts[i]);
    }
  }
  // g.edges() is already (u, v) sorted, so kept stays aligned with freq.
  return UmstBackbone{g.with_edges(std::move(kept)), std::move(freq), cfg};
}

/// The deterministic single MST wrapped as a backbone (every edge counted once).
inline UmstBackbone mst_backbone(const HotspotGraph& g, WeightKind weight = WeightKind::Distance) {
  auto tree = minimum_spanning_tree(g, weight);
  std::vector<std::uint32_t> freq(tree.size(), 1);
  UmstConfig cfg;
  cfg.k_trees = 1;
  cfg.drop_rate = 0.0;
  cfg.mst_weight = weight;
  return UmstBackbone{g.with_edges(std::move(tree)), std::move(freq), cfg};
}

/// The full source graph wrapped as a backbone.
inline UmstBackbone clique_backbone(const HotspotGraph& g) {
  UmstConfig cfg;
  cfg.k_trees = 1;
  cfg.drop_rate = 0.0;
  return UmstBackbone{g, std::vector<std::uint32_t>(g.edge_count(), 1), cfg};
}

enum class FrequencyTier { Backbone, Secondary, Fallback };

constexpr std::string_view to_string(FrequencyTier tier) {
  switch (tier) {
    case FrequencyTier::Backbone: return "backbone";
    case FrequencyTier::Secondary: return "secondary";
    case FrequencyTier::Fallback: return "fallback";
  }
  return "unknown";
}

struct TierThresholds {
  double backbone = 0.8;
  double secondary = 0.4;
};

inline FrequencyTier classify_frequency(std::uint32_t count, std::uint32_t k_trees, TierThresholds t = {}) {
  const double k = static_cast<double>(k_trees);
  const double c = static_cast<double>(count);
  if (c >= t.backbone * k - 1e-9) return FrequencyTier::Backbone;
  if (c >= t.secondary * k - 1e-9) return FrequencyTier::Secondary;
  return FrequencyTier::Fallback;
}

inline std::map<EdgeKey, FrequencyTier> edge_frequency_tiers(const UmstBackbone& b, TierThresholds t = {}) {
  std::map<EdgeKey, FrequencyTier> tiers;
  const auto edges = b.graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    tiers.emplace(edges[i].key(), classify_frequency(b.frequency[i], b.config.k_trees, t));
  return tiers;
}

struct PairStretch {
  NodeId u;
  NodeId v;
  double ratio;
};

struct StretchStats {
  double mean = 1.0;
  double max = 1.0;
  std::vector<PairStretch> pairs;
};

/// Ratio of backbone to reference shortest-path cost for each requested pair
/// (all unordered pairs when `sample` is empty).
inline StretchStats stretch_profile(const HotspotGraph& backbone, const HotspotGraph& reference,
                                    std::span<const EdgeKey> sample = {},
                                    WeightKind weight = WeightKind::Distance) {
  if (backbone.node_count() != reference.node_count())
    throw Error(ErrorKind::InvalidInput, "backbone and reference node sets differ");
  const auto n = reference.node_count();
  const auto on_backbone = all_pairs_costs(backbone, weight);
  const auto on_reference = all_pairs_costs(reference, weight);

  std::vector<EdgeKey> pairs(sample.begin(), sample.end());
  if (pairs.empty()) {
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) pairs.push_back({u, v});
  }

  StretchStats stats;
  stats.max = 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double b = on_backbone[p.u * n + p.v];
    const double r = on_reference[p.u * n + p.v];
    if (!std::isfinite(b)) throw Error(ErrorKind::Unreachable, "backbone does not span the reference node set");
    const double ratio = r > 0.0 ? b / r : 1.0;
    stats.pairs.push_back({p.u, p.v, ratio});
    sum += ratio;
    stats.max = std::max(stats.max, ratio);
  }
  if (stats.pairs.empty()) {
    stats.max = 1.0;
  } else {
    stats.mean = sum / static_cast<double>(stats.pairs.size());
  }
  return stats;
}

inline StretchStats stretch_profile(const UmstBackbone& b, const HotspotGraph& reference,
                                    std::span<const EdgeKey> sample = {},
                                    WeightKind weight = WeightKind::Distance) {
  return stretch_profile(b.graph, reference, sample, weight);
}

/// next(h, d): the neighbour of h on the deterministic shortest h -> d path.
class NextHopTable {
 public:
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  NextHopTable() = default;

  NextHopTable(const HotspotGraph& g, WeightKind weight) : n_(g.node_count()), next_(n_ * n_, kNone) {
    if (auto missing = first_unreachable(g))
      throw Error(ErrorKind::Setup, "backbone is disconnected (node " + std::to_string(*missing) + ")");
    for (NodeId d = 0; d < n_; ++d) {
      const auto to_d = costs_to(g, d, weight);
      for (NodeId h = 0; h < n_; ++h) {
        if (h != d) next_[h * n_ + d] = next_hop_toward(g, h, to_d, weight);
      }
    }
  }

  std::size_t node_count() const noexcept { return n_; }

  std::optional<NodeId> next(NodeId from, NodeId to) const {
    const NodeId hop = next_.at(from * n_ + to);
    if (hop == kNone) return std::nullopt;
    return hop;
  }

  /// Node sequence obtained by walking the table from `from` to `to`.
  std::vector<NodeId> walk(NodeId from, NodeId to) const {
    std::vector<NodeId> nodes{from};
    while (from != to) {
      from = next_[from * n_ + to];
      nodes.push_back(from);
      if (nodes.size() > n_) throw Error(ErrorKind::Setup, "next-hop table contains a cycle");
    }
    return nodes;
  }

 private:
  std::size_t n_ = 0;
  std::vector<NodeId> next_;
};

inline NextHopTable next_hop_table(const UmstBackbone& b) { return NextHopTable(b.graph, b.config.route_weight); }

}  // namespace umstnet
