#pragma once

// Discrete-event delivery simulator over a backbone graph.
//
// Requests appear at their pickup hotspot at earliest_pickup_s and wait in
// that hotspot's queue, tagged with their next hop toward the dropoff. A
// direction group (hotspot h, next hop v) is dispatched when it reaches
// vehicle capacity or when its oldest member has waited dispatch_hold_s.
// Vehicles move one backbone edge at a time. On arrival a vehicle drops off
// requests that have reached their destination, keeps the largest
// same-direction group on board (ties go to the group holding the oldest
// request), hands the rest to the hotspot queue, tops up with waiting
// requests heading the same way and departs immediately. A vehicle with
// nothing left on board retires (or returns to the pool).
//
// The engine only emits events. SimTrace is assembled from that event list,
// so an in-memory trace and one re-read from JSON lines are the same value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/rng.hpp"
#include "umstnet/umst.hpp"
#include "umstnet/workload.hpp"

namespace umstnet {

inline constexpr std::uint32_t kNoVehicle = std::numeric_limits<std::uint32_t>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class SpawnMode { OnDemand, FixedPool };

struct FleetConfig {
  std::uint32_t vehicle_capacity = 5;
  double dispatch_hold_s = 30.0;
  // Fleet cruising speed. Edge travel times are derived from it when the
  // toolchain builds graphs; the engine itself reads travel_time_s off the
  // backbone edges.
  double vehicle_speed_kmh = kDefaultSpeedKmh;
  SpawnMode spawn_mode = SpawnMode::OnDemand;
  std::uint32_t pool_size = 0;
  bool bundling_enabled = true;
  // Events later than (latest deadline + grace) are not processed.
  double cutoff_grace_s = 3600.0;

  void validate() const {
    if (vehicle_capacity < 1) throw Error(ErrorKind::InvalidConfig, "vehicle capacity must be >= 1");
    if (!(dispatch_hold_s >= 0.0)) throw Error(ErrorKind::InvalidConfig, "dispatch hold must be >= 0");
    if (!(vehicle_speed_kmh > 0.0)) throw Error(ErrorKind::InvalidConfig, "vehicle speed must be > 0");
    if (spawn_mode == SpawnMode::FixedPool && pool_size < 1)
      throw Error(ErrorKind::InvalidConfig, "a fixed pool needs at least one vehicle");
    if (!(cutoff_grace_s >= 0.0)) throw Error(ErrorKind::InvalidConfig, "cutoff grace must be >= 0");
  }
};

enum class EventKind { Arrive, Depart, Pickup, Dropoff, Merge, Complete };

constexpr std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Arrive: return "arrive";
    case EventKind::Depart: return "depart";
    case EventKind::Pickup: return "pickup";
    case EventKind::Dropoff: return "dropoff";
    case EventKind::Merge: return "merge";
    case EventKind::Complete: return "complete";
  }
  return "unknown";
}

// pickup:   requests board a vehicle that is being dispatched at `hotspot`
// merge:    waiting requests join a bundle passing through `hotspot`
// dropoff:  requests leave the vehicle (at their destination or to transfer)
// complete: one request delivered; `success` is the on-time flag
// depart:   `requests` is the load on the leg hotspot -> to
struct TraceEvent {
  double t = 0.0;
  EventKind kind = EventKind::Arrive;
  std::uint32_t vehicle = 0;
  NodeId hotspot = 0;
  std::vector<std::uint32_t> requests;
  NodeId to = kNoNode;
  std::uint32_t capacity = 0;
  double leg_km = 0.0;
  double leg_s = 0.0;
  bool success = false;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct VehicleRoute {
  std::uint32_t id = 0;
  std::uint32_t capacity = 0;
  std::vector<NodeId> nodes;        // R_k
  std::vector<double> arrival_s;    // t_k(nodes[i]); spawn time for i = 0
  std::vector<double> departure_s;  // one per leg
  std::vector<double> leg_km;
  std::vector<double> leg_s;

  std::size_t leg_count() const noexcept { return departure_s.size(); }
  bool used() const noexcept { return !nodes.empty(); }

  friend bool operator==(const VehicleRoute&, const VehicleRoute&) = default;
};

/// A request riding vehicle `vehicle` from route index board_index to
/// alight_index (valid only when closed).
struct Ride {
  std::uint32_t vehicle = 0;
  std::uint32_t board_index = 0;
  std::uint32_t alight_index = 0;
  bool closed = false;

  friend bool operator==(const Ride&, const Ride&) = default;
};

struct RequestOutcome {
  std::uint32_t request = 0;
  bool completed = false;
  bool success = false;
  double delivered_s = 0.0;
  std::uint32_t delivering_vehicle = kNoVehicle;
  std::vector<Ride> rides;

  friend bool operator==(const RequestOutcome&, const RequestOutcome&) = default;
};

struct BundleEvent {
  enum class Kind { Formed, Merged };
  Kind kind = Kind::Formed;
  double t = 0.0;
  NodeId hotspot = 0;
  std::uint32_t vehicle = 0;
  std::vector<std::uint32_t> added;
  std::size_t size_after = 0;

  friend bool operator==(const BundleEvent&, const BundleEvent&) = default;
};

struct SimTrace {
  std::vector<TraceEvent> events;
  std::vector<VehicleRoute> vehicles;     // indexed by vehicle id
  std::vector<RequestOutcome> outcomes;   // one per request, in request order
  std::vector<BundleEvent> bundles;
  double total_travel_s = 0.0;            // T = sum of T(R_k)

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Rebuilds routes, rides, outcomes and bundle lineage from an event list.
/// Legs that were departed but never arrived (cut off) are dropped.
inline SimTrace assemble_trace(std::vector<TraceEvent> events, std::span<const DeliveryRequest> requests) {
  SimTrace trace;
  trace.outcomes.resize(requests.size());
  std::unordered_map<std::uint32_t, std::size_t> index_of;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    trace.outcomes[i].request = requests[i].id;
    if (!index_of.emplace(requests[i].id, i).second)
      throw Error(ErrorKind::InvalidInput, "duplicate request id " + std::to_string(requests[i].id));
  }
  auto outcome_for = [&](std::uint32_t id) -> RequestOutcome& {
    auto it = index_of.find(id);
    if (it == index_of.end()) throw Error(ErrorKind::Format, "trace references unknown request " + std::to_string(id));
    return trace.outcomes[it->second];
  };

  std::vector<std::size_t> onboard_count;
  std::vector<char> in_flight;  // departed, not yet arrived
  auto vehicle = [&](const TraceEvent& ev) -> VehicleRoute& {
    if (ev.vehicle >= trace.vehicles.size()) {
      const auto old = trace.vehicles.size();
      trace.vehicles.resize(ev.vehicle + 1);
      onboard_count.resize(ev.vehicle + 1, 0);
      in_flight.resize(ev.vehicle + 1, 0);
      for (auto i = old; i < trace.vehicles.size(); ++i) trace.vehicles[i].id = static_cast<std::uint32_t>(i);
    }
    auto& v = trace.vehicles[ev.vehicle];
    if (v.nodes.empty()) {
      v.nodes.push_back(ev.hotspot);
      v.arrival_s.push_back(ev.t);
    }
    if (ev.capacity > 0) v.capacity = ev.capacity;
    return v;
  };

  for (const auto& ev : events) {
    auto& v = vehicle(ev);
    const auto here = static_cast<std::uint32_t>(v.nodes.size() - 1);
    switch (ev.kind) {
      case EventKind::Depart:
        v.departure_s.push_back(ev.t);
        v.leg_km.push_back(ev.leg_km);
        v.leg_s.push_back(ev.leg_s);
        in_flight[ev.vehicle] = 1;
        break;
      case EventKind::Arrive:
        v.nodes.push_back(ev.hotspot);
        v.arrival_s.push_back(ev.t);
        in_flight[ev.vehicle] = 0;
        trace.total_travel_s += v.leg_s.back();
        break;
      case EventKind::Pickup:
      case EventKind::Merge: {
        for (auto id : ev.requests) outcome_for(id).rides.push_back({ev.vehicle, here, 0, false});
        onboard_count[ev.vehicle] += ev.requests.size();
        if (ev.kind == EventKind::Merge || onboard_count[ev.vehicle] >= 2) {
          trace.bundles.push_back({ev.kind == EventKind::Merge ? BundleEvent::Kind::Merged : BundleEvent::Kind::Formed,
                                   ev.t, ev.hotspot, ev.vehicle, ev.requests, onboard_count[ev.vehicle]});
        }
        break;
      }
      case EventKind::Dropoff:
        for (auto id : ev.requests) {
          auto& out = outcome_for(id);
          if (out.rides.empty() || out.rides.back().closed)
            throw Error(ErrorKind::Format, "dropoff of request " + std::to_string(id) + " that is not on board");
          out.rides.back().alight_index = here;
          out.rides.back().closed = true;
        }
        onboard_count[ev.vehicle] -= std::min(onboard_count[ev.vehicle], ev.requests.size());
        break;
      case EventKind::Complete:
        for (auto id : ev.requests) {
          auto& out = outcome_for(id);
          out.completed = true;
          out.success = ev.success;
          out.delivered_s = ev.t;
          out.delivering_vehicle = ev.vehicle;
        }
        break;
    }
  }
  for (std::size_t k = 0; k < trace.vehicles.size(); ++k) {
    auto& v = trace.vehicles[k];
    if (in_flight.size() > k && in_flight[k]) {
      v.departure_s.pop_back();
      v.leg_km.pop_back();
      v.leg_s.pop_back();
    }
  }
  trace.events = std::move(events);
  return trace;
}

/// A request waiting at a hotspot, tagged with its next hop.
struct WaitingRequest {
  std::uint32_t request = 0;
  double since = 0.0;
  NodeId next_hop = 0;
};

/// B(h, v): waiting requests whose next hop is v, in queue (FIFO) order,
/// truncated to `capacity`.
inline std::vector<std::uint32_t> candidate_bundle(std::span<const WaitingRequest> hotspot_queue, NodeId v,
                                                   std::uint32_t capacity) {
  std::vector<std::uint32_t> out;
  for (const auto& w : hotspot_queue) {
    if (out.size() >= capacity) break;
    if (w.next_hop == v) out.push_back(w.request);
  }
  return out;
}

struct MergeRecord {
  NodeId hotspot = 0;
  std::vector<std::uint32_t> added;
};

struct Bundle {
  std::vector<std::uint32_t> members;
  std::vector<MergeRecord> lineage;
};

/// B_out = B_in plus the FIFO prefix of B(h, v) that fits in the remaining capacity.
inline Bundle merge_bundle(const Bundle& inbound, std::span<const WaitingRequest> hotspot_queue, NodeId hotspot,
                           NodeId v, std::uint32_t capacity) {
  Bundle out = inbound;
  const auto room = capacity > inbound.members.size() ? capacity - static_cast<std::uint32_t>(inbound.members.size()) : 0u;
  auto added = candidate_bundle(hotspot_queue, v, room);
  if (!added.empty()) {
    out.members.insert(out.members.end(), added.begin(), added.end());
    out.lineage.push_back({hotspot, std::move(added)});
  }
  return out;
}

namespace detail {

inline void check_requests(const HotspotGraph& g, std::span<const DeliveryRequest> requests) {
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    if (!g.contains(r.pickup) || !g.contains(r.dropoff))
      throw Error(ErrorKind::InvalidInput, "request " + std::to_string(r.id) + " references a missing hotspot");
    if (r.pickup == r.dropoff)
      throw Error(ErrorKind::InvalidInput, "request " + std::to_string(r.id) + " has pickup == dropoff");
    if (!(r.earliest_pickup_s < r.deadline_s))
      throw Error(ErrorKind::InvalidInput, "request " + std::to_string(r.id) + " has deadline before pickup");
    if (i > 0 && r.earliest_pickup_s < requests[i - 1].earliest_pickup_s)
      throw Error(ErrorKind::InvalidInput, "requests must be sorted by earliest pickup");
    if (!ids.insert(r.id).second) throw Error(ErrorKind::InvalidInput, "duplicate request id " + std::to_string(r.id));
  }
}

// Each request rides a dedicated vehicle along its full backbone path.
inline std::vector<TraceEvent> run_unbundled(const HotspotGraph& g, const NextHopTable& table,
                                             std::span<const DeliveryRequest> requests, const FleetConfig& fleet) {
  std::vector<TraceEvent> events;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    const auto k = static_cast<std::uint32_t>(i);
    double t = r.earliest_pickup_s;
    const std::vector<std::uint32_t> load{r.id};
    events.push_back({t, EventKind::Pickup, k, r.pickup, load, kNoNode, fleet.vehicle_capacity});
    const auto path = table.walk(r.pickup, r.dropoff);
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
      const Edge* e = g.find_edge(path[j], path[j + 1]);
      events.push_back({t, EventKind::Depart, k, path[j], load, path[j + 1], fleet.vehicle_capacity, e->distance_km,
                        e->travel_time_s});
      t += e->travel_time_s;
      events.push_back({t, EventKind::Arrive, k, path[j + 1], load});
    }
    events.push_back({t, EventKind::Dropoff, k, r.dropoff, load});
    TraceEvent done{t, EventKind::Complete, k, r.dropoff, load};
    done.success = t <= r.deadline_s;
    events.push_back(std::move(done));
  }
  std::stable_sort(events.begin(), events.end(), [](const TraceEvent& a, const TraceEvent& b) { return a.t < b.t; });
  return events;
}

class BundlingEngine {
 public:
  BundlingEngine(const HotspotGraph& g, const NextHopTable& table, std::span<const DeliveryRequest> requests,
                 const FleetConfig& fleet, std::uint64_t seed)
      : g_(g), table_(table), requests_(requests), fleet_(fleet), queues_(g.node_count()) {
    for (std::size_t i = 0; i < requests.size(); ++i) index_of_.emplace(requests[i].id, static_cast<std::uint32_t>(i));
    if (fleet.spawn_mode == SpawnMode::FixedPool) {
      Rng rng(seed);
      for (std::uint32_t k = 0; k < fleet.pool_size; ++k) {
        VehicleState v;
        v.id = k;
        v.at = static_cast<NodeId>(rng.below(g.node_count()));
        v.busy = false;
        vehicles_.push_back(v);
      }
    }
    cutoff_ = 0.0;
    for (const auto& r : requests) cutoff_ = std::max(cutoff_, r.deadline_s);
    cutoff_ += fleet.cutoff_grace_s;
  }

  std::vector<TraceEvent> run() {
    for (std::size_t i = 0; i < requests_.size(); ++i)
      push(requests_[i].earliest_pickup_s, Kind::RequestReady, static_cast<std::uint32_t>(i), 0);
    while (!agenda_.empty()) {
      const Pending ev = agenda_.top();
      agenda_.pop();
      if (ev.t > cutoff_) break;
      switch (ev.kind) {
        case Kind::RequestReady: on_request_ready(ev.a, ev.t); break;
        case Kind::VehicleArrive: on_arrive(ev.a, ev.t); break;
        case Kind::HoldCheck: on_hold_check(ev.a, ev.b, ev.t); break;
      }
    }
    return std::move(events_);
  }

 private:
  enum class Kind { RequestReady = 0, VehicleArrive = 1, HoldCheck = 2 };

  struct Pending {
    double t;
    Kind kind;
    std::uint64_t seq;
    std::uint32_t a;
    std::uint32_t b;

    bool operator>(const Pending& o) const {
      return std::tie(t, kind, seq) > std::tie(o.t, o.kind, o.seq);
    }
  };

  struct VehicleState {
    std::uint32_t id = 0;
    NodeId at = 0;
    NodeId heading = kNoNode;
    std::vector<std::uint32_t> onboard;  // request indices, FIFO order
    bool busy = true;
    NodeId reposition_target = kNoNode;
    NodeId reposition_direction = kNoNode;
    bool spawned = false;
  };

  using GroupKey = std::pair<NodeId, NodeId>;

  void push(double t, Kind kind, std::uint32_t a, std::uint32_t b) { agenda_.push({t, kind, seq_++, a, b}); }

  void emit(TraceEvent ev) { events_.push_back(std::move(ev)); }

  bool fifo_less(std::uint32_t a, std::uint32_t b) const {
    const auto& ra = requests_[a];
    const auto& rb = requests_[b];
    if (ra.earliest_pickup_s != rb.earliest_pickup_s) return ra.earliest_pickup_s < rb.earliest_pickup_s;
    return ra.id < rb.id;
  }

  std::vector<std::uint32_t> ids_of(std::span<const std::uint32_t> idx) const {
    std::vector<std::uint32_t> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(requests_[i].id);
    return out;
  }

  NodeId next_hop(NodeId from, std::uint32_t request) const {
    return *table_.next(from, requests_[request].dropoff);
  }

  void enqueue(NodeId h, std::uint32_t request, double t) {
    auto& q = queues_[h];
    WaitingRequest w{requests_[request].id, t, next_hop(h, request)};
    auto pos = std::upper_bound(q.begin(), q.end(), w, [](const WaitingRequest& a, const WaitingRequest& b) {
      return std::tie(a.since, a.request) < std::tie(b.since, b.request);
    });
    q.insert(pos, w);
  }

  // Removes the given request ids from hotspot h's queue; returns request indices.
  std::vector<std::uint32_t> take(NodeId h, const std::vector<std::uint32_t>& ids) {
    auto& q = queues_[h];
    std::set<std::uint32_t> wanted(ids.begin(), ids.end());
    std::erase_if(q, [&](const WaitingRequest& w) { return wanted.count(w.request) > 0; });
    std::vector<std::uint32_t> out;
    for (auto id : ids) out.push_back(index_of_.at(id));
    return out;
  }

  std::optional<double> oldest_waiting(NodeId h, NodeId v) const {
    for (const auto& w : queues_[h])
      if (w.next_hop == v) return w.since;
    return std::nullopt;
  }

  std::size_t waiting_count(NodeId h, NodeId v) const {
    return static_cast<std::size_t>(
        std::count_if(queues_[h].begin(), queues_[h].end(), [v](const WaitingRequest& w) { return w.next_hop == v; }));
  }

  void depart(VehicleState& veh, NodeId to, double t) {
    const Edge* e = g_.find_edge(veh.at, to);
    veh.heading = to;
    emit({t, EventKind::Depart, veh.id, veh.at, ids_of(veh.onboard), to, fleet_.vehicle_capacity, e->distance_km,
          e->travel_time_s});
    push(t + e->travel_time_s, Kind::VehicleArrive, veh.id, 0);
  }

  void board(VehicleState& veh, NodeId h, NodeId v, double t) {
    auto ids = candidate_bundle(queues_[h], v, fleet_.vehicle_capacity);
    auto idx = take(h, ids);
    emit({t, EventKind::Pickup, veh.id, h, ids, kNoNode, fleet_.vehicle_capacity});
    veh.onboard = std::move(idx);
    veh.busy = true;
    depart(veh, v, t);
  }

  // Starts a vehicle for group (h, v). Returns false when none is available now.
  bool launch(NodeId h, NodeId v, double t) {
    if (fleet_.spawn_mode == SpawnMode::OnDemand) {
      VehicleState veh;
      veh.id = static_cast<std::uint32_t>(vehicles_.size());
      veh.at = h;
      vehicles_.push_back(veh);
      board(vehicles_.back(), h, v, t);
      return true;
    }
    if (reserved_.count({h, v})) return false;
    VehicleState* best = nullptr;
    double best_cost = std::numeric_limits<double>::infinity();
    for (auto& veh : vehicles_) {
      if (veh.busy) continue;
      if (veh.at == h) {
        best = &veh;
        best_cost = 0.0;
        break;
      }
      const auto path = table_.walk(veh.at, h);
      double cost = 0.0;
      for (std::size_t j = 0; j + 1 < path.size(); ++j) cost += g_.find_edge(path[j], path[j + 1])->travel_time_s;
      if (cost < best_cost) {
        best_cost = cost;
        best = &veh;
      }
    }
    if (best == nullptr) {
      pending_.insert({h, v});
      return false;
    }
    if (best->at == h) {
      board(*best, h, v, t);
      return true;
    }
    best->busy = true;
    best->onboard.clear();
    best->reposition_target = h;
    best->reposition_direction = v;
    reserved_.insert({h, v});
    depart(*best, *table_.next(best->at, h), t);
    return false;
  }

  void schedule_hold(NodeId h, NodeId v, double when) {
    auto [it, inserted] = hold_at_.try_emplace({h, v}, when);
    if (!inserted) {
      if (it->second == when) return;
      it->second = when;
    }
    push(when, Kind::HoldCheck, h, v);
  }

  void try_dispatch(NodeId h, NodeId v, double t) {
    for (;;) {
      const auto oldest = oldest_waiting(h, v);
      if (!oldest) return;
      const bool full = waiting_count(h, v) >= fleet_.vehicle_capacity;
      const bool expired = t >= *oldest + fleet_.dispatch_hold_s;
      if (!full && !expired) {
        schedule_hold(h, v, *oldest + fleet_.dispatch_hold_s);
        return;
      }
      if (!launch(h, v, t)) return;
    }
  }

  void on_hold_check(NodeId h, NodeId v, double t) {
    auto it = hold_at_.find({h, v});
    if (it != hold_at_.end() && it->second == t) hold_at_.erase(it);
    try_dispatch(h, v, t);
  }

  void on_request_ready(std::uint32_t request, double t) {
    const auto h = requests_[request].pickup;
    enqueue(h, request, t);
    try_dispatch(h, next_hop(h, request), t);
  }

  void vehicle_freed(VehicleState& veh, double t) {
    veh.busy = false;
    veh.onboard.clear();
    veh.heading = kNoNode;
    if (fleet_.spawn_mode != SpawnMode::FixedPool) return;
    std::vector<GroupKey> due(pending_.begin(), pending_.end());
    pending_.clear();
    // Groups at the vehicle's own hotspot first, then oldest waiting first.
    const NodeId here = veh.at;
    std::stable_sort(due.begin(), due.end(), [&](const GroupKey& a, const GroupKey& b) {
      const bool la = a.first == here;
      const bool lb = b.first == here;
      if (la != lb) return la;
      return oldest_waiting(a.first, a.second).value_or(0.0) < oldest_waiting(b.first, b.second).value_or(0.0);
    });
    for (const auto& [h, v] : due) try_dispatch(h, v, t);
  }

  void on_arrive(std::uint32_t vehicle_id, double t) {
    auto& veh = vehicles_[vehicle_id];
    veh.at = veh.heading;
    veh.heading = kNoNode;
    const NodeId here = veh.at;
    emit({t, EventKind::Arrive, veh.id, here, ids_of(veh.onboard)});

    if (veh.reposition_target != kNoNode) {
      if (here != veh.reposition_target) {
        depart(veh, *table_.next(here, veh.reposition_target), t);
        return;
      }
      const NodeId dir = veh.reposition_direction;
      veh.reposition_target = kNoNode;
      veh.reposition_direction = kNoNode;
      reserved_.erase({here, dir});
      if (oldest_waiting(here, dir)) {
        board(veh, here, dir, t);
        try_dispatch(here, dir, t);
      } else {
        vehicle_freed(veh, t);
      }
      return;
    }

    std::vector<std::uint32_t> arrived;
    std::vector<std::uint32_t> remaining;
    for (auto r : veh.onboard) (requests_[r].dropoff == here ? arrived : remaining).push_back(r);
    if (!arrived.empty()) {
      emit({t, EventKind::Dropoff, veh.id, here, ids_of(arrived)});
      for (auto r : arrived) {
        TraceEvent done{t, EventKind::Complete, veh.id, here, {requests_[r].id}};
        done.success = t <= requests_[r].deadline_s;
        emit(std::move(done));
      }
    }
    if (remaining.empty()) {
      vehicle_freed(veh, t);
      return;
    }

    std::map<NodeId, std::size_t> per_direction;
    for (auto r : remaining) ++per_direction[next_hop(here, r)];
    std::size_t best = 0;
    for (const auto& [dir, count] : per_direction) best = std::max(best, count);
    NodeId heading = kNoNode;
    for (auto r : remaining) {  // FIFO order: first member of a largest group wins
      const auto dir = next_hop(here, r);
      if (per_direction[dir] == best) {
        heading = dir;
        break;
      }
    }

    std::vector<std::uint32_t> staying;
    std::vector<std::uint32_t> transfers;
    for (auto r : remaining) (next_hop(here, r) == heading ? staying : transfers).push_back(r);
    std::set<NodeId> touched;
    if (!transfers.empty()) {
      emit({t, EventKind::Dropoff, veh.id, here, ids_of(transfers)});
      for (auto r : transfers) {
        enqueue(here, r, t);
        touched.insert(next_hop(here, r));
      }
    }

    veh.onboard = std::move(staying);
    const auto room = fleet_.vehicle_capacity - static_cast<std::uint32_t>(veh.onboard.size());
    if (room > 0) {
      auto ids = candidate_bundle(queues_[here], heading, room);
      if (!ids.empty()) {
        auto idx = take(here, ids);
        emit({t, EventKind::Merge, veh.id, here, ids});
        veh.onboard.insert(veh.onboard.end(), idx.begin(), idx.end());
        std::stable_sort(veh.onboard.begin(), veh.onboard.end(),
                         [this](std::uint32_t a, std::uint32_t b) { return fifo_less(a, b); });
      }
    }
    depart(veh, heading, t);
    touched.insert(heading);
    for (auto dir : touched) try_dispatch(here, dir, t);
  }

  const HotspotGraph& g_;
  const NextHopTable& table_;
  std::span<const DeliveryRequest> requests_;
  const FleetConfig& fleet_;
  std::unordered_map<std::uint32_t, std::uint32_t> index_of_;
  std::vector<std::vector<WaitingRequest>> queues_;
  std::deque<VehicleState> vehicles_;  // stable references across spawns
  std::map<GroupKey, double> hold_at_;
  std::set<GroupKey> pending_;
  std::set<GroupKey> reserved_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> agenda_;
  std::uint64_t seq_ = 0;
  double cutoff_ = 0.0;
  std::vector<TraceEvent> events_;
};

}  // namespace detail

/// Runs the delivery simulation on `backbone`, routing by travel time.
/// `seed` only affects the initial placement of a fixed vehicle pool.
inline SimTrace run_simulation(const HotspotGraph& backbone, std::span<const DeliveryRequest> requests,
                               const FleetConfig& fleet, std::uint64_t seed = 0) {
  fleet.validate();
  if (backbone.node_count() < 2) throw Error(ErrorKind::Setup, "backbone needs at least 2 hotspots");
  if (auto missing = first_unreachable(backbone))
    throw Error(ErrorKind::Setup, "backbone is disconnected (node " + std::to_string(*missing) + " unreachable)");
  detail::check_requests(backbone, requests);
  const NextHopTable table(backbone, WeightKind::TravelTime);
  std::vector<TraceEvent> events;
  if (fleet.bundling_enabled) {
    detail::BundlingEngine engine(backbone, table, requests, fleet, seed);
    events = engine.run();
  } else {
    events = detail::run_unbundled(backbone, table, requests, fleet);
  }
  return assemble_trace(std::move(events), requests);
}

inline SimTrace run_simulation(const UmstBackbone& backbone, std::span<const DeliveryRequest> requests,
                               const FleetConfig& fleet, std::uint64_t seed = 0) {
  return run_simulation(backbone.graph, requests, fleet, seed);
}

}  // namespace umstnet
