#pragma once

// Evaluation metrics over validated traces, multi-run backbone comparison,
// trade-off frontiers and the Nash-bargaining balanced configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/sim.hpp"
#include "umstnet/validate.hpp"
#include "umstnet/workload.hpp"

namespace umstnet {

struct SimReport {
  std::string label;
  std::string workload_id;
  std::uint64_t total_deliveries = 0;
  std::uint64_t completed = 0;
  std::uint64_t successful = 0;
  double success_rate = 0.0;
  double completion_rate = 0.0;
  double avg_time_s = 0.0;     // over successful deliveries
  double median_time_s = 0.0;  // over successful deliveries
  double vehicle_distance_km = 0.0;
  double package_distance_km = 0.0;
  // Primary "distance saved": paired no-bundling vehicle distance minus this
  // run's vehicle distance when a baseline is supplied, otherwise
  // package - vehicle. Both variants are also reported separately.
  double distance_saved_km = 0.0;
  std::string distance_saved_definition = "package-minus-vehicle";
  std::optional<double> distance_saved_vs_baseline_km;
  double distance_saved_package_minus_vehicle_km = 0.0;
  std::uint64_t bundling_participation = 0;
  std::uint64_t bundles_created = 0;
  double avg_delay_s = 0.0;  // delivered - deadline, over completed deliveries
  double median_delay_s = 0.0;
  double max_delay_s = 0.0;
  double total_travel_s = 0.0;
  std::uint64_t vehicles_used = 0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// FNV-1a fingerprint of a request list; reports compared side by side must
/// share it.
inline std::string workload_fingerprint(std::span<const DeliveryRequest> requests) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : requests) {
    mix(&r.id, sizeof r.id);
    mix(&r.pickup, sizeof r.pickup);
    mix(&r.dropoff, sizeof r.dropoff);
    mix(&r.earliest_pickup_s, sizeof r.earliest_pickup_s);
    mix(&r.deadline_s, sizeof r.deadline_s);
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xF];
  return out;
}

namespace detail {

inline double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

/// Computes the report for a validated trace. `baseline_vehicle_km` is the
/// vehicle distance of the paired no-bundling run, if available.
inline SimReport compute_metrics(const ValidatedTrace& validated, std::span<const DeliveryRequest> requests,
                                 std::optional<double> baseline_vehicle_km = std::nullopt) {
  const auto& trace = validated.trace();
  SimReport rep;
  rep.workload_id = workload_fingerprint(requests);
  rep.total_deliveries = requests.size();

  std::unordered_map<std::uint32_t, const DeliveryRequest*> by_id;
  for (const auto& r : requests) by_id.emplace(r.id, &r);

  std::vector<double> times;
  std::vector<double> delays;
  for (const auto& out : trace.outcomes) {
    if (!out.completed) continue;
    const auto& req = *by_id.at(out.request);
    ++rep.completed;
    delays.push_back(out.delivered_s - req.deadline_s);
    if (out.success) {
      ++rep.successful;
      times.push_back(out.delivered_s - req.earliest_pickup_s);
    }
  }
  const auto n = static_cast<double>(rep.total_deliveries);
  rep.success_rate = n > 0 ? static_cast<double>(rep.successful) / n : 0.0;
  rep.completion_rate = n > 0 ? static_cast<double>(rep.completed) / n : 0.0;
  rep.avg_time_s = detail::mean_of(times);
  rep.median_time_s = detail::median_of(times);
  rep.avg_delay_s = detail::mean_of(delays);
  rep.median_delay_s = detail::median_of(delays);
  rep.max_delay_s = delays.empty() ? 0.0 : *std::max_element(delays.begin(), delays.end());

  for (const auto& v : trace.vehicles) {
    if (!v.used()) continue;
    ++rep.vehicles_used;
    for (double km : v.leg_km) rep.vehicle_distance_km += km;
    for (double s : v.leg_s) rep.total_travel_s += s;
  }

  // Package distance accumulates per request, in request order.
  const auto loads = leg_loads(trace);
  std::set<std::uint32_t> shared;
  for (const auto& out : trace.outcomes) {
    for (const auto& ride : out.rides) {
      const auto& v = trace.vehicles[ride.vehicle];
      const std::size_t end = ride.closed ? ride.alight_index : v.leg_count();
      for (std::size_t j = ride.board_index; j < end; ++j) {
        rep.package_distance_km += v.leg_km[j];
        if (loads[ride.vehicle][j].size() >= 2) shared.insert(out.request);
      }
    }
  }
  for (const auto& out : trace.outcomes)
    if (out.completed && shared.count(out.request)) ++rep.bundling_participation;

  // A bundle is created whenever boarding leaves a vehicle with >= 2 requests
  // on the leg it departs on.
  for (std::size_t k = 0; k < loads.size(); ++k) {
    for (std::size_t j = 0; j < loads[k].size(); ++j) {
      const auto& now = loads[k][j];
      if (now.size() < 2) continue;
      if (j == 0) {
        ++rep.bundles_created;
        continue;
      }
      const auto& before = loads[k][j - 1];
      const bool boarded = std::any_of(now.begin(), now.end(), [&](std::uint32_t r) {
        return std::find(before.begin(), before.end(), r) == before.end();
      });
      if (boarded) ++rep.bundles_created;
    }
  }

  rep.distance_saved_package_minus_vehicle_km = rep.package_distance_km - rep.vehicle_distance_km;
  if (baseline_vehicle_km) {
    rep.distance_saved_vs_baseline_km = *baseline_vehicle_km - rep.vehicle_distance_km;
    rep.distance_saved_km = *rep.distance_saved_vs_baseline_km;
    rep.distance_saved_definition = "paired-baseline";
  } else {
    rep.distance_saved_km = rep.distance_saved_package_minus_vehicle_km;
    rep.distance_saved_definition = "package-minus-vehicle";
  }
  return rep;
}

// Metrics must come from a certified trace.
SimReport compute_metrics(const SimTrace&, std::span<const DeliveryRequest>, std::optional<double> = {}) = delete;

// ---------------------------------------------------------------------------
// Comparison tables

enum class Better { Higher, Lower };

struct MetricSpec {
  std::string name;
  Better better;
  std::function<double(const SimReport&)> value;
};

inline const std::vector<MetricSpec>& comparison_metrics() {
  static const std::vector<MetricSpec> specs{
      {"success_rate", Better::Higher, [](const SimReport& r) { return r.success_rate; }},
      {"completion_rate", Better::Higher, [](const SimReport& r) { return r.completion_rate; }},
      {"avg_time_s", Better::Lower, [](const SimReport& r) { return r.avg_time_s; }},
      {"median_time_s", Better::Lower, [](const SimReport& r) { return r.median_time_s; }},
      {"vehicle_distance_km", Better::Lower, [](const SimReport& r) { return r.vehicle_distance_km; }},
      {"package_distance_km", Better::Lower, [](const SimReport& r) { return r.package_distance_km; }},
      {"distance_saved_km", Better::Higher, [](const SimReport& r) { return r.distance_saved_km; }},
      {"bundling_participation", Better::Higher,
       [](const SimReport& r) { return static_cast<double>(r.bundling_participation); }},
      {"avg_delay_s", Better::Lower, [](const SimReport& r) { return r.avg_delay_s; }},
  };
  return specs;
}

struct LabeledReport {
  std::string label;
  std::uint64_t seed = 0;
  SimReport report;
};

struct ComparisonCell {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  std::size_t runs = 0;
  bool best = false;
  double delta = 0.0;  // mean minus the first label's mean
};

struct ComparisonTable {
  std::vector<std::string> labels;                // first-appearance order
  std::vector<std::string> metrics;
  std::vector<std::vector<ComparisonCell>> cells;  // [metric][label]
};

inline double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = detail::mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

/// Groups reports by label (runs within a label are the seeds) and compares
/// the groups metric by metric.
inline ComparisonTable compare_backbones(std::span<const LabeledReport> reports) {
  if (reports.size() < 2) throw Error(ErrorKind::Comparison, "need at least two reports to compare");
  std::map<std::uint64_t, std::string> workload_of_seed;
  std::map<std::string, std::set<std::uint64_t>> seeds_of_label;
  ComparisonTable table;
  for (const auto& r : reports) {
    auto [it, fresh] = workload_of_seed.emplace(r.seed, r.report.workload_id);
    if (!fresh && it->second != r.report.workload_id)
      throw Error(ErrorKind::Comparison, "reports for seed " + std::to_string(r.seed) + " use different workloads");
    if (!seeds_of_label.count(r.label)) table.labels.push_back(r.label);
    if (!seeds_of_label[r.label].insert(r.seed).second)
      throw Error(ErrorKind::Comparison, "label " + r.label + " has two reports for seed " + std::to_string(r.seed));
  }
  for (const auto& [label, seeds] : seeds_of_label) {
    if (seeds != seeds_of_label.begin()->second)
      throw Error(ErrorKind::Comparison, "label " + label + " was run on a different seed set");
  }

  for (const auto& spec : comparison_metrics()) {
    table.metrics.push_back(spec.name);
    std::vector<ComparisonCell> row;
    for (const auto& label : table.labels) {
      std::vector<double> values;
      for (const auto& r : reports)
        if (r.label == label) values.push_back(spec.value(r.report));
      row.push_back({detail::mean_of(values), sample_stddev(values), values.size(), false, 0.0});
    }
    double best = row.front().mean;
    for (const auto& c : row) best = spec.better == Better::Higher ? std::max(best, c.mean) : std::min(best, c.mean);
    for (auto& c : row) {
      c.best = c.mean == best;
      c.delta = c.mean - row.front().mean;
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Trade-off analysis

struct TradeoffPoint {
  std::string label;
  double success_rate = 0.0;
  double avg_time_s = 0.0;
  double vehicle_distance_km = 0.0;
};

enum class CostAxis { Time, Distance };

inline double cost_of(const TradeoffPoint& p, CostAxis axis) noexcept {
  return axis == CostAxis::Time ? p.avg_time_s : p.vehicle_distance_km;
}

struct NormalizedPoint {
  double success_utility;
  double cost_utility;
  double product;
};

/// Min-max normalisation: success ascending, cost descending, both onto [0, 1].
/// A degenerate axis (all values equal) maps to utility 1 for every point.
inline std::vector<NormalizedPoint> normalize_tradeoff(std::span<const TradeoffPoint> points, CostAxis axis) {
  if (points.empty()) return {};
  double smin = points[0].success_rate, smax = smin;
  double cmin = cost_of(points[0], axis), cmax = cmin;
  for (const auto& p : points) {
    smin = std::min(smin, p.success_rate);
    smax = std::max(smax, p.success_rate);
    cmin = std::min(cmin, cost_of(p, axis));
    cmax = std::max(cmax, cost_of(p, axis));
  }
  std::vector<NormalizedPoint> out;
  for (const auto& p : points) {
    const double us = smax > smin ? (p.success_rate - smin) / (smax - smin) : 1.0;
    const double uc = cmax > cmin ? (cmax - cost_of(p, axis)) / (cmax - cmin) : 1.0;
    out.push_back({us, uc, us * uc});
  }
  return out;
}

/// Label of the point maximising the product of normalised utilities, with
/// the disagreement point at (0, 0). Products within 1e-12 count as tied;
/// ties go to higher raw success rate, then to the smaller label.
inline std::string nash_bargaining_select(std::span<const TradeoffPoint> points, CostAxis axis = CostAxis::Time) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "nash_bargaining_select needs at least one point");
  const auto norm = normalize_tradeoff(points, axis);
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double diff = norm[i].product - norm[best].product;
    if (diff > 1e-12) {
      best = i;
    } else if (diff >= -1e-12) {
      if (points[i].success_rate > points[best].success_rate ||
          (points[i].success_rate == points[best].success_rate && points[i].label < points[best].label))
        best = i;
    }
  }
  return points[best].label;
}

/// Pareto-nondominated points under (maximise success, minimise cost),
/// sorted by success then cost then label. Exact duplicates are all kept.
inline std::vector<TradeoffPoint> tradeoff_frontier(std::span<const TradeoffPoint> points,
                                                    CostAxis axis = CostAxis::Time) {
  std::vector<TradeoffPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [axis](const TradeoffPoint& a, const TradeoffPoint& b) {
    if (a.success_rate != b.success_rate) return a.success_rate > b.success_rate;
    return cost_of(a, axis) < cost_of(b, axis);
  });
  std::vector<TradeoffPoint> out;
  double best_cost_above = std::numeric_limits<double>::infinity();  // over strictly higher success
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].success_rate == sorted[i].success_rate) ++j;
    const double group_min = cost_of(sorted[i], axis);
    for (std::size_t k = i; k < j; ++k) {
      const double c = cost_of(sorted[k], axis);
      if (best_cost_above <= c) continue;  // a higher-success point is no costlier
      if (group_min < c) continue;          // same success, strictly cheaper exists
      out.push_back(sorted[k]);
    }
    best_cost_above = std::min(best_cost_above, group_min);
    i = j;
  }
  std::sort(out.begin(), out.end(), [axis](const TradeoffPoint& a, const TradeoffPoint& b) {
    if (a.success_rate != b.success_rate) return a.success_rate < b.success_rate;
    if (cost_of(a, axis) != cost_of(b, axis)) return cost_of(a, axis) < cost_of(b, axis);
    return a.label < b.label;
  });
  return out;
}

inline TradeoffPoint tradeoff_point(const SimReport& r) {
  return {r.label, r.success_rate, r.avg_time_s, r.vehicle_distance_km};
}

}  // namespace umstnet
