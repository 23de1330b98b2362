#pragma once

// Independent re-check of a simulation trace against the backbone and the
// request list: assignment, precedence, capacity, edge feasibility, timing
// and the on-time success predicate.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/sim.hpp"
#include "umstnet/workload.hpp"

namespace umstnet {

enum class ViolationKind { Assignment, Precedence, Capacity, EdgeFeasibility, Timing, Success };

constexpr std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Assignment: return "assignment";
    case ViolationKind::Precedence: return "precedence";
    case ViolationKind::Capacity: return "capacity";
    case ViolationKind::EdgeFeasibility: return "edge-feasibility";
    case ViolationKind::Timing: return "timing";
    case ViolationKind::Success: return "success";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const noexcept {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.kind == kind;
    return n;
  }
  std::string summary(std::size_t limit = 10) const {
    std::string out = std::to_string(violations.size()) + " violation(s)";
    for (std::size_t i = 0; i < violations.size() && i < limit; ++i)
      out += "\n  [" + std::string(to_string(violations[i].kind)) + "] " + violations[i].detail;
    return out;
  }
};

inline constexpr double kTimingTolerance = 1e-9;

/// Requests aboard each leg of each vehicle, derived from the rides.
/// A ride still open at the end of the trace covers the remaining legs.
inline std::vector<std::vector<std::vector<std::uint32_t>>> leg_loads(const SimTrace& trace) {
  std::vector<std::vector<std::vector<std::uint32_t>>> loads(trace.vehicles.size());
  for (std::size_t k = 0; k < trace.vehicles.size(); ++k) loads[k].resize(trace.vehicles[k].leg_count());
  for (const auto& out : trace.outcomes) {
    for (const auto& ride : out.rides) {
      if (ride.vehicle >= loads.size()) continue;
      auto& legs = loads[ride.vehicle];
      const std::size_t end = ride.closed ? ride.alight_index : legs.size();
      for (std::size_t j = ride.board_index; j < end && j < legs.size(); ++j) legs[j].push_back(out.request);
    }
  }
  return loads;
}

inline ValidationReport validate_trace(const SimTrace& trace, const HotspotGraph& backbone,
                                       std::span<const DeliveryRequest> requests) {
  ValidationReport report;
  auto flag = [&](ViolationKind kind, std::string detail) { report.violations.push_back({kind, std::move(detail)}); };
  auto near = [](double a, double b) { return std::abs(a - b) <= kTimingTolerance; };

  for (const auto& v : trace.vehicles) {
    if (!v.used()) continue;
    const auto tag = "vehicle " + std::to_string(v.id);
    const auto legs = v.nodes.size() - 1;
    if (v.arrival_s.size() != v.nodes.size() || v.departure_s.size() != legs || v.leg_km.size() != legs ||
        v.leg_s.size() != legs) {
      flag(ViolationKind::Timing, tag + ": route arrays have inconsistent lengths");
      continue;
    }
    for (std::size_t j = 0; j < legs; ++j) {
      const auto leg = tag + " leg " + std::to_string(j) + " (" + std::to_string(v.nodes[j]) + "->" +
                       std::to_string(v.nodes[j + 1]) + ")";
      const Edge* e = backbone.contains(v.nodes[j]) && backbone.contains(v.nodes[j + 1])
                          ? backbone.find_edge(v.nodes[j], v.nodes[j + 1])
                          : nullptr;
      if (e == nullptr) {
        flag(ViolationKind::EdgeFeasibility, leg + " is not a backbone edge");
      } else if (!near(v.leg_km[j], e->distance_km) || !near(v.leg_s[j], e->travel_time_s)) {
        flag(ViolationKind::Timing, leg + " length or travel time differs from the backbone edge");
      }
      if (v.departure_s[j] < v.arrival_s[j] - kTimingTolerance)
        flag(ViolationKind::Timing, leg + " departs before the vehicle arrived");
      if (!near(v.arrival_s[j + 1], v.departure_s[j] + v.leg_s[j]))
        flag(ViolationKind::Timing, leg + " arrival time does not match departure + travel time");
    }
  }

  const auto loads = leg_loads(trace);
  for (std::size_t k = 0; k < loads.size(); ++k) {
    for (std::size_t j = 0; j < loads[k].size(); ++j) {
      if (loads[k][j].size() > trace.vehicles[k].capacity)
        flag(ViolationKind::Capacity, "vehicle " + std::to_string(k) + " leg " + std::to_string(j) + " carries " +
                                          std::to_string(loads[k][j].size()) + " > capacity " +
                                          std::to_string(trace.vehicles[k].capacity));
    }
  }

  std::unordered_map<std::uint32_t, const DeliveryRequest*> by_id;
  for (const auto& r : requests) by_id.emplace(r.id, &r);
  std::map<std::uint32_t, std::size_t> seen;
  for (const auto& out : trace.outcomes) ++seen[out.request];
  for (const auto& r : requests) {
    const auto it = seen.find(r.id);
    if (it == seen.end() || it->second != 1)
      flag(ViolationKind::Assignment, "request " + std::to_string(r.id) + " has " +
                                          std::to_string(it == seen.end() ? 0 : it->second) + " outcome records");
  }

  for (const auto& out : trace.outcomes) {
    const auto tag = "request " + std::to_string(out.request);
    const auto rit = by_id.find(out.request);
    if (rit == by_id.end()) {
      flag(ViolationKind::Assignment, tag + " is not in the request list");
      continue;
    }
    const auto& req = *rit->second;

    bool structural = false;
    for (const auto& ride : out.rides) {
      if (ride.vehicle >= trace.vehicles.size() || ride.board_index >= trace.vehicles[ride.vehicle].nodes.size() ||
          (ride.closed && ride.alight_index >= trace.vehicles[ride.vehicle].nodes.size())) {
        flag(ViolationKind::Assignment, tag + " rides a vehicle or route position that does not exist");
        structural = true;
        break;
      }
    }
    if (structural) continue;
    if (out.completed) {
      if (out.rides.empty()) {
        flag(ViolationKind::Assignment, tag + " is completed without riding any vehicle");
        continue;
      }
      if (out.delivering_vehicle != out.rides.back().vehicle) {
        flag(ViolationKind::Assignment, tag + " delivering vehicle differs from its last ride");
        continue;
      }
    }

    auto node_at = [&](std::uint32_t k, std::uint32_t i) { return trace.vehicles[k].nodes[i]; };
    std::string problem;
    for (std::size_t i = 0; i < out.rides.size() && problem.empty(); ++i) {
      const auto& ride = out.rides[i];
      if (ride.closed && ride.alight_index <= ride.board_index) {
        problem = "alights at route position " + std::to_string(ride.alight_index) + " before boarding at " +
                  std::to_string(ride.board_index);
      } else if (!ride.closed && (i + 1 < out.rides.size() || out.completed)) {
        problem = "has an unfinished ride before its last";
      } else if (i == 0 && node_at(ride.vehicle, ride.board_index) != req.pickup) {
        problem = "first boards away from its pickup hotspot";
      } else if (i > 0) {
        const auto& prev = out.rides[i - 1];
        const auto& pv = trace.vehicles[prev.vehicle];
        const auto& cv = trace.vehicles[ride.vehicle];
        if (node_at(prev.vehicle, prev.alight_index) != node_at(ride.vehicle, ride.board_index)) {
          problem = "transfers between different hotspots";
        } else if (ride.board_index < cv.departure_s.size() &&
                   cv.departure_s[ride.board_index] < pv.arrival_s[prev.alight_index] - kTimingTolerance) {
          problem = "boards its next vehicle before alighting from the previous one";
        }
      }
    }
    if (problem.empty() && out.completed && node_at(out.rides.back().vehicle, out.rides.back().alight_index) != req.dropoff)
      problem = "is completed away from its dropoff hotspot";
    if (!problem.empty()) {
      flag(ViolationKind::Precedence, tag + " " + problem);
      continue;
    }

    if (!out.completed) {
      if (out.success) flag(ViolationKind::Success, tag + " is marked successful but never delivered");
      continue;
    }
    const auto& first = out.rides.front();
    const auto& last = out.rides.back();
    const auto& fv = trace.vehicles[first.vehicle];
    const double arrived = trace.vehicles[last.vehicle].arrival_s[last.alight_index];
    if (!near(out.delivered_s, arrived)) {
      flag(ViolationKind::Timing, tag + " delivery time differs from the vehicle's arrival time");
      continue;
    }
    const double picked_up = fv.departure_s[first.board_index];
    const bool on_time = picked_up >= req.earliest_pickup_s - kTimingTolerance && out.delivered_s <= req.deadline_s;
    if (out.success != on_time) flag(ViolationKind::Success, tag + " success flag disagrees with its pickup/deadline times");
  }
  return report;
}

/// A trace that passed validate_trace with zero violations.
class ValidatedTrace {
 public:
  const SimTrace& trace() const noexcept { return trace_; }

  friend ValidatedTrace certify(SimTrace trace, const HotspotGraph& backbone,
                                std::span<const DeliveryRequest> requests);

 private:
  explicit ValidatedTrace(SimTrace trace) : trace_(std::move(trace)) {}
  SimTrace trace_;
};

/// Validates and wraps; throws Error(Validation) listing the violations otherwise.
inline ValidatedTrace certify(SimTrace trace, const HotspotGraph& backbone, std::span<const DeliveryRequest> requests) {
  const auto report = validate_trace(trace, backbone, requests);
  if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
  return ValidatedTrace(std::move(trace));
}

}  // namespace umstnet
