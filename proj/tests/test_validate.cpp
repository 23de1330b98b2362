#include <gtest/gtest.h>

#include "support.hpp"

using namespace umstnet;
using namespace testing_support;

namespace {

// 0 - 1 - 2 path, 2 km / 240 s per edge.
HotspotGraph line3() { return HotspotGraph(grid_hotspots(3), {{0, 1, 2.0, 240.0}, {1, 2, 2.0, 240.0}}); }

VehicleRoute route(std::uint32_t id, std::uint32_t capacity, std::vector<NodeId> nodes, double start,
                   const HotspotGraph& g) {
  VehicleRoute v;
  v.id = id;
  v.capacity = capacity;
  v.nodes = nodes;
  v.arrival_s.push_back(start);
  double t = start;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const Edge* e = g.find_edge(nodes[j], nodes[j + 1]);
    const double km = e ? e->distance_km : 3.0;
    const double s = e ? e->travel_time_s : 360.0;
    v.departure_s.push_back(t);
    v.leg_km.push_back(km);
    v.leg_s.push_back(s);
    t += s;
    v.arrival_s.push_back(t);
  }
  return v;
}

RequestOutcome delivered(std::uint32_t id, std::uint32_t vehicle, std::uint32_t board, std::uint32_t alight,
                         double at, bool success) {
  RequestOutcome o;
  o.request = id;
  o.completed = true;
  o.success = success;
  o.delivered_s = at;
  o.delivering_vehicle = vehicle;
  o.rides.push_back({vehicle, board, alight, true});
  return o;
}

// Three requests 0 -> 2 sharing one vehicle of capacity 3; all on time.
struct Fixture {
  HotspotGraph g = line3();
  std::vector<DeliveryRequest> reqs{{0, 0, 2, 0.0, 1000.0}, {1, 0, 2, 0.0, 1000.0}, {2, 0, 2, 0.0, 1000.0}};
  SimTrace trace;

  Fixture() {
    trace.vehicles.push_back(route(0, 3, {0, 1, 2}, 0.0, g));
    for (std::uint32_t r = 0; r < 3; ++r) trace.outcomes.push_back(delivered(r, 0, 0, 2, 480.0, true));
  }
};

}  // namespace

TEST(ValidateTrace, CleanFixturePasses) {
  Fixture f;
  const auto rep = validate_trace(f.trace, f.g, f.reqs);
  EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(ValidateTrace, ForgedCapacityViolation) {
  Fixture f;
  f.trace.vehicles[0].capacity = 2;
  const auto rep = validate_trace(f.trace, f.g, f.reqs);
  EXPECT_EQ(rep.violations.size(), rep.count(ViolationKind::Capacity));
  EXPECT_EQ(rep.count(ViolationKind::Capacity), 2u);  // both legs carry 3
}

TEST(ValidateTrace, ForgedPrecedenceViolation) {
  Fixture f;
  // Request 1 "alights" at position 0 after boarding at position 2.
  f.trace.outcomes[1].rides[0] = {0, 2, 0, true};
  const auto rep = validate_trace(f.trace, f.g, f.reqs);
  ASSERT_EQ(rep.violations.size(), 1u) << rep.summary();
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::Precedence);
}

TEST(ValidateTrace, ForgedEdgeFeasibilityViolation) {
  Fixture f;
  // A vehicle driving 0 -> 2 directly: no such backbone edge.
  f.trace.vehicles[0] = route(0, 3, {0, 2}, 0.0, f.g);
  for (auto& o : f.trace.outcomes) {
    o.rides[0] = {0, 0, 1, true};
    o.delivered_s = 360.0;
  }
  const auto rep = validate_trace(f.trace, f.g, f.reqs);
  ASSERT_EQ(rep.violations.size(), 1u) << rep.summary();
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::EdgeFeasibility);
}

TEST(ValidateTrace, TimingAndSuccessViolations) {
  Fixture f;
  f.trace.vehicles[0].arrival_s[2] += 5.0;
  auto rep = validate_trace(f.trace, f.g, f.reqs);
  EXPECT_GE(rep.count(ViolationKind::Timing), 1u);
  EXPECT_EQ(rep.violations.size(), rep.count(ViolationKind::Timing));

  Fixture late;
  late.trace.outcomes[0].success = false;
  rep = validate_trace(late.trace, late.g, late.reqs);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::Success);

  Fixture early;  // departs before the request is ready
  early.reqs[2].earliest_pickup_s = 10.0;
  rep = validate_trace(early.trace, early.g, early.reqs);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::Success);
}

TEST(ValidateTrace, AssignmentViolations) {
  Fixture f;
  f.trace.outcomes.pop_back();
  auto rep = validate_trace(f.trace, f.g, f.reqs);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::Assignment);

  Fixture dup;
  dup.trace.outcomes.push_back(dup.trace.outcomes[0]);
  rep = validate_trace(dup.trace, dup.g, dup.reqs);
  EXPECT_GE(rep.count(ViolationKind::Assignment), 1u);

  Fixture ghost;
  ghost.trace.outcomes[2].rides[0].vehicle = 7;
  rep = validate_trace(ghost.trace, ghost.g, ghost.reqs);
  EXPECT_EQ(rep.violations.size(), rep.count(ViolationKind::Assignment));
  EXPECT_GE(rep.violations.size(), 1u);
}

TEST(ValidateTrace, TransfersMustBeContiguous) {
  const HotspotGraph g = line3();
  const std::vector<DeliveryRequest> reqs{{0, 0, 2, 0.0, 5000.0}};
  SimTrace t;
  t.vehicles.push_back(route(0, 2, {0, 1}, 0.0, g));
  t.vehicles.push_back(route(1, 2, {1, 2}, 300.0, g));
  RequestOutcome o = delivered(0, 1, 0, 1, 540.0, true);
  o.rides.insert(o.rides.begin(), Ride{0, 0, 1, true});
  t.outcomes.push_back(o);
  EXPECT_TRUE(validate_trace(t, g, reqs).ok()) << validate_trace(t, g, reqs).summary();

  // Second leg leaves before the first arrives.
  t.vehicles[1] = route(1, 2, {1, 2}, 100.0, g);
  t.outcomes[0].delivered_s = 340.0;
  const auto rep = validate_trace(t, g, reqs);
  ASSERT_EQ(rep.violations.size(), 1u) << rep.summary();
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::Precedence);
}

TEST(Certify, ThrowsValidationErrorWithSummary) {
  Fixture f;
  f.trace.vehicles[0].capacity = 1;
  try {
    certify(f.trace, f.g, f.reqs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("capacity"), std::string::npos);
  }
  Fixture ok;
  EXPECT_EQ(certify(ok.trace, ok.g, ok.reqs).trace(), ok.trace);
}

TEST(LegLoads, DerivedFromRides) {
  Fixture f;
  f.trace.outcomes[2].rides[0] = {0, 1, 2, true};
  const auto loads = leg_loads(f.trace);
  ASSERT_EQ(loads.size(), 1u);
  EXPECT_EQ(loads[0][0], (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(loads[0][1], (std::vector<std::uint32_t>{0, 1, 2}));
}
