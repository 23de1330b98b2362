#pragma once

// Delivery-request streams: a Gaussian-mixture arrival intensity turned into
// exact per-minute quotas, uniform within-minute offsets, random
// pickup/dropoff pairs and a deadline policy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/rng.hpp"

namespace umstnet {

struct DeadlinePolicy {
  enum class Mode { ScaledShortestPath, FixedBudget };

  Mode mode = Mode::ScaledShortestPath;
  double alpha = 2.0;
  double beta_s = 600.0;
  double budget_s = 1800.0;

  static DeadlinePolicy scaled(double alpha, double beta_s) {
    return {Mode::ScaledShortestPath, alpha, beta_s, 1800.0};
  }
  static DeadlinePolicy fixed(double budget_s) { return {Mode::FixedBudget, 2.0, 600.0, budget_s}; }

  void validate() const {
    if (mode == Mode::ScaledShortestPath) {
      if (!(alpha >= 1.0)) throw Error(ErrorKind::InvalidConfig, "deadline alpha must be >= 1");
      if (!(beta_s >= 0.0)) throw Error(ErrorKind::InvalidConfig, "deadline beta must be >= 0");
    } else if (!(budget_s > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "deadline budget must be > 0");
    }
  }
};

struct WorkloadConfig {
  double horizon_s = 3600.0;
  std::uint32_t total_requests = 9234;
  std::vector<double> peak_fractions{0.25, 0.75};
  double sigma_min = 10.0;
  double max_trip_s = 1800.0;
  DeadlinePolicy deadline_policy;
  std::uint64_t rng_seed = 0;
  // Relative pickup/dropoff weight per hotspot; empty means uniform.
  std::vector<double> hotspot_weights;

  void validate() const {
    if (!(horizon_s > 0.0)) throw Error(ErrorKind::InvalidConfig, "horizon_s must be > 0");
    if (total_requests < 1) throw Error(ErrorKind::InvalidConfig, "total_requests must be >= 1");
    if (peak_fractions.empty()) throw Error(ErrorKind::InvalidConfig, "at least one peak is required");
    for (std::size_t i = 0; i < peak_fractions.size(); ++i) {
      if (!(peak_fractions[i] > 0.0 && peak_fractions[i] < 1.0))
        throw Error(ErrorKind::InvalidConfig, "peak fractions must lie in (0, 1)");
      if (i > 0 && !(peak_fractions[i] > peak_fractions[i - 1]))
        throw Error(ErrorKind::InvalidConfig, "peak fractions must be strictly increasing");
    }
    if (!(sigma_min > 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma_min must be > 0");
    if (!(max_trip_s > 0.0)) throw Error(ErrorKind::InvalidConfig, "max_trip_s must be > 0");
    for (double w : hotspot_weights)
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidConfig, "hotspot weights must be >= 0");
    deadline_policy.validate();
  }
};

struct DeliveryRequest {
  std::uint32_t id = 0;
  NodeId pickup = 0;
  NodeId dropoff = 0;
  double earliest_pickup_s = 0.0;
  double deadline_s = 0.0;

  friend bool operator==(const DeliveryRequest&, const DeliveryRequest&) = default;
};

/// Sum of unit-mass Gaussians, evaluated in minutes. `t_s` is in seconds.
inline double arrival_intensity(double t_s, const WorkloadConfig& cfg) {
  const double t = t_s / 60.0;
  const double horizon_min = cfg.horizon_s / 60.0;
  const double norm = 1.0 / (cfg.sigma_min * std::sqrt(2.0 * std::numbers::pi));
  double y = 0.0;
  for (double frac : cfg.peak_fractions) {
    const double z = (t - frac * horizon_min) / cfg.sigma_min;
    y += norm * std::exp(-0.5 * z * z);
  }
  return y;
}

inline std::size_t minute_bins(const WorkloadConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.horizon_s / 60.0 - 1e-9));
}

/// Requests per minute: intensity sampled at each minute mark, scaled to
/// total_requests and rounded by largest remainder (ties to the earlier
/// minute), so the quotas always sum exactly to the total.
inline std::vector<std::uint32_t> minute_quotas(const WorkloadConfig& cfg) {
  const auto bins = minute_bins(cfg);
  std::vector<double> weight(bins);
  for (std::size_t m = 0; m < bins; ++m) weight[m] = arrival_intensity(60.0 * static_cast<double>(m), cfg);
  const double total_weight = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<std::uint32_t> quota(bins);
  std::vector<double> remainder(bins);
  std::uint64_t assigned = 0;
  for (std::size_t m = 0; m < bins; ++m) {
    const double share = weight[m] / total_weight * static_cast<double>(cfg.total_requests);
    quota[m] = static_cast<std::uint32_t>(std::floor(share));
    remainder[m] = share - std::floor(share);
    assigned += quota[m];
  }
  std::vector<std::size_t> order(bins);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < cfg.total_requests; ++i, ++assigned) ++quota[order[i % bins]];
  return quota;
}

/// Deadline from the pickup->dropoff shortest travel time.
inline double deadline_for(double earliest_pickup_s, double shortest_travel_s, const DeadlinePolicy& policy,
                           double max_trip_s) {
  if (policy.mode == DeadlinePolicy::Mode::FixedBudget) return earliest_pickup_s + policy.budget_s;
  return earliest_pickup_s + std::min(policy.alpha * shortest_travel_s + policy.beta_s, max_trip_s);
}

inline double assign_deadline(const DeliveryRequest& r, const HotspotGraph& g, const DeadlinePolicy& policy,
                              double max_trip_s) {
  double spt = 0.0;
  if (policy.mode == DeadlinePolicy::Mode::ScaledShortestPath) {
    try {
      spt = shortest_path(g, r.pickup, r.dropoff, WeightKind::TravelTime).cost;
    } catch (const Error& e) {
      throw Error(ErrorKind::Generation, "request " + std::to_string(r.id) + ": " + e.what());
    }
  }
  return deadline_for(r.earliest_pickup_s, spt, policy, max_trip_s);
}

/// Requests sorted by earliest pickup, ids assigned in that order.
/// Deadlines use shortest travel times on `g` (normally the complete graph).
inline std::vector<DeliveryRequest> generate_requests(const HotspotGraph& g, const WorkloadConfig& cfg) {
  cfg.validate();
  const auto n = g.node_count();
  if (n < 2) throw Error(ErrorKind::InvalidInput, "workload generation needs at least 2 hotspots");
  const bool weighted = !cfg.hotspot_weights.empty();
  if (weighted) {
    if (cfg.hotspot_weights.size() != n)
      throw Error(ErrorKind::InvalidConfig, "hotspot_weights must have one entry per hotspot");
    if (std::count_if(cfg.hotspot_weights.begin(), cfg.hotspot_weights.end(), [](double w) { return w > 0.0; }) < 2)
      throw Error(ErrorKind::InvalidConfig, "at least two hotspots need positive weight");
  }

  const auto quotas = minute_quotas(cfg);
  Rng rng(cfg.rng_seed);
  std::vector<DeliveryRequest> out;
  out.reserve(cfg.total_requests);
  std::vector<double> scratch;
  for (std::size_t m = 0; m < quotas.size(); ++m) {
    const double start = 60.0 * static_cast<double>(m);
    const double width = std::min(60.0, cfg.horizon_s - start);
    for (std::uint32_t q = 0; q < quotas[m]; ++q) {
      DeliveryRequest r;
      r.earliest_pickup_s = start + width * rng.uniform01();
      if (weighted) {
        r.pickup = static_cast<NodeId>(rng.weighted_index(cfg.hotspot_weights));
        scratch = cfg.hotspot_weights;
        scratch[r.pickup] = 0.0;
        r.dropoff = static_cast<NodeId>(rng.weighted_index(scratch));
      } else {
        r.pickup = static_cast<NodeId>(rng.below(n));
        r.dropoff = static_cast<NodeId>(rng.below(n - 1));
        if (r.dropoff >= r.pickup) ++r.dropoff;
      }
      out.push_back(r);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const DeliveryRequest& a, const DeliveryRequest& b) {
    return a.earliest_pickup_s < b.earliest_pickup_s;
  });

  std::vector<double> spt;
  if (cfg.deadline_policy.mode == DeadlinePolicy::Mode::ScaledShortestPath) spt = all_pairs_costs(g, WeightKind::TravelTime);
  for (std::uint32_t i = 0; i < out.size(); ++i) {
    auto& r = out[i];
    r.id = i;
    double travel = 0.0;
    if (!spt.empty()) {
      travel = spt[r.pickup * n + r.dropoff];
      if (!std::isfinite(travel))
        throw Error(ErrorKind::Generation, "dropoff " + std::to_string(r.dropoff) + " unreachable from pickup " +
                                               std::to_string(r.pickup));
    }
    r.deadline_s = deadline_for(r.earliest_pickup_s, travel, cfg.deadline_policy, cfg.max_trip_s);
  }
  return out;
}

}  // namespace umstnet
