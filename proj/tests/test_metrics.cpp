#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace umstnet;
using namespace testing_support;

namespace {

// Path 0 - 1 - 2 (2 km / 240 s per edge). One vehicle leaves 0 at t=10 with
// requests A (0->1), B (0->2) and C (0->2); C's deadline is missed.
struct HandTrace {
  HotspotGraph g{grid_hotspots(3), {{0, 1, 2.0, 240.0}, {1, 2, 2.0, 240.0}}};
  std::vector<DeliveryRequest> reqs{{0, 0, 1, 0.0, 600.0}, {1, 0, 2, 5.0, 900.0}, {2, 0, 2, 10.0, 400.0}};
  SimTrace trace;

  HandTrace() {
    VehicleRoute v;
    v.id = 0;
    v.capacity = 3;
    v.nodes = {0, 1, 2};
    v.arrival_s = {10.0, 250.0, 490.0};
    v.departure_s = {10.0, 250.0};
    v.leg_km = {2.0, 2.0};
    v.leg_s = {240.0, 240.0};
    trace.vehicles.push_back(v);
    trace.outcomes = {{0, true, true, 250.0, 0, {{0, 0, 1, true}}},
                      {1, true, true, 490.0, 0, {{0, 0, 2, true}}},
                      {2, true, false, 490.0, 0, {{0, 0, 2, true}}}};
  }
};

std::vector<TradeoffPoint> brute_frontier(const std::vector<TradeoffPoint>& pts, CostAxis axis) {
  std::vector<TradeoffPoint> out;
  for (const auto& p : pts) {
    bool dominated = false;
    for (const auto& q : pts) {
      const bool no_worse = q.success_rate >= p.success_rate && cost_of(q, axis) <= cost_of(p, axis);
      const bool better = q.success_rate > p.success_rate || cost_of(q, axis) < cost_of(p, axis);
      if (no_worse && better) dominated = true;
    }
    if (!dominated) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [axis](const TradeoffPoint& a, const TradeoffPoint& b) {
    return std::tuple(a.success_rate, cost_of(a, axis), a.label) < std::tuple(b.success_rate, cost_of(b, axis), b.label);
  });
  return out;
}

std::vector<TradeoffPoint> random_points(std::mt19937_64& gen, std::size_t n) {
  // Small integer grid so ties and duplicates are common.
  std::uniform_int_distribution<int> s(0, 10), c(0, 10);
  std::vector<TradeoffPoint> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({"p" + std::to_string(i), s(gen) / 10.0, 100.0 + 10.0 * c(gen), 50.0 + c(gen)});
  return pts;
}

}  // namespace

TEST(ComputeMetrics, HandBuiltTrace) {
  HandTrace h;
  const auto rep = compute_metrics(certify(h.trace, h.g, h.reqs), h.reqs);
  EXPECT_EQ(rep.total_deliveries, 3u);
  EXPECT_EQ(rep.completed, 3u);
  EXPECT_EQ(rep.successful, 2u);
  EXPECT_DOUBLE_EQ(rep.success_rate, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.avg_time_s, ((250.0 - 0.0) + (490.0 - 5.0)) / 2.0);
  EXPECT_DOUBLE_EQ(rep.median_time_s, 367.5);
  EXPECT_DOUBLE_EQ(rep.vehicle_distance_km, 4.0);
  EXPECT_DOUBLE_EQ(rep.package_distance_km, 2.0 + 4.0 + 4.0);
  EXPECT_DOUBLE_EQ(rep.distance_saved_km, 6.0);
  EXPECT_EQ(rep.distance_saved_definition, "package-minus-vehicle");
  EXPECT_FALSE(rep.distance_saved_vs_baseline_km.has_value());
  EXPECT_EQ(rep.bundling_participation, 3u);
  EXPECT_EQ(rep.bundles_created, 1u);
  EXPECT_DOUBLE_EQ(rep.avg_delay_s, ((250.0 - 600.0) + (490.0 - 900.0) + (490.0 - 400.0)) / 3.0);
  EXPECT_DOUBLE_EQ(rep.max_delay_s, 90.0);
  EXPECT_DOUBLE_EQ(rep.total_travel_s, 480.0);
  EXPECT_EQ(rep.vehicles_used, 1u);

  const auto paired = compute_metrics(certify(h.trace, h.g, h.reqs), h.reqs, 10.0);
  EXPECT_EQ(paired.distance_saved_definition, "paired-baseline");
  EXPECT_DOUBLE_EQ(paired.distance_saved_km, 6.0);
  EXPECT_DOUBLE_EQ(*paired.distance_saved_vs_baseline_km, 6.0);
  EXPECT_DOUBLE_EQ(paired.distance_saved_package_minus_vehicle_km, 6.0);
}

TEST(WorkloadFingerprint, StableAndSensitive) {
  HandTrace h;
  const auto a = workload_fingerprint(h.reqs);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, workload_fingerprint(h.reqs));
  h.reqs[1].deadline_s += 1.0;
  EXPECT_NE(a, workload_fingerprint(h.reqs));
}

TEST(CompareBackbones, MeansAndSampleStd) {
  std::vector<LabeledReport> reports;
  const std::vector<double> clique{0.9, 0.8, 0.7}, umst{0.6, 0.6, 0.9};
  for (std::uint64_t s = 0; s < 3; ++s) {
    SimReport a, b;
    a.workload_id = b.workload_id = "w" + std::to_string(s);
    a.success_rate = clique[s];
    b.success_rate = umst[s];
    a.avg_time_s = 100.0;
    b.avg_time_s = 90.0;
    reports.push_back({"clique", s, a});
    reports.push_back({"umst", s, b});
  }
  const auto table = compare_backbones(reports);
  ASSERT_EQ(table.labels, (std::vector<std::string>{"clique", "umst"}));
  ASSERT_EQ(table.metrics.front(), "success_rate");
  const auto& row = table.cells[0];
  EXPECT_NEAR(row[0].mean, 0.8, 1e-12);
  EXPECT_NEAR(row[0].stddev, 0.1, 1e-12);
  EXPECT_NEAR(row[1].mean, 0.7, 1e-12);
  EXPECT_NEAR(row[1].stddev, std::sqrt(0.03), 1e-12);
  EXPECT_TRUE(row[0].best);
  EXPECT_FALSE(row[1].best);
  EXPECT_NEAR(row[1].delta, -0.1, 1e-12);
  const auto time_row = std::find(table.metrics.begin(), table.metrics.end(), "avg_time_s") - table.metrics.begin();
  EXPECT_TRUE(table.cells[time_row][1].best);
}

TEST(CompareBackbones, RejectsMismatchedInputs) {
  SimReport r;
  r.workload_id = "w";
  auto kind = [](std::vector<LabeledReport> v) {
    try {
      compare_backbones(v);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  EXPECT_EQ(kind({{"a", 0, r}}), ErrorKind::Comparison);
  auto other = r;
  other.workload_id = "x";
  EXPECT_EQ(kind({{"a", 0, r}, {"b", 0, other}}), ErrorKind::Comparison);
  EXPECT_EQ(kind({{"a", 0, r}, {"a", 0, r}}), ErrorKind::Comparison);
  EXPECT_EQ(kind({{"a", 0, r}, {"b", 1, r}}), ErrorKind::Comparison);
}

TEST(NashBargaining, PicksTheBalancedPoint) {
  // (success, time): fast-but-unreliable, balanced, reliable-but-slow.
  const std::vector<TradeoffPoint> pts{{"reliable", 0.9, 800.0, 0.0}, {"balanced", 0.6, 400.0, 0.0},
                                       {"fast", 0.2, 100.0, 0.0}};
  EXPECT_EQ(nash_bargaining_select(pts), "balanced");
  const auto norm = normalize_tradeoff(pts, CostAxis::Time);
  EXPECT_DOUBLE_EQ(norm[0].success_utility, 1.0);
  EXPECT_DOUBLE_EQ(norm[0].cost_utility, 0.0);
  EXPECT_NEAR(norm[1].product, (0.4 / 0.7) * (400.0 / 700.0), 1e-12);
}

TEST(NashBargaining, DegenerateAxesAndTies) {
  const std::vector<TradeoffPoint> same_success{{"a", 0.5, 300.0, 1.0}, {"b", 0.5, 200.0, 9.0}};
  EXPECT_EQ(nash_bargaining_select(same_success), "b");
  EXPECT_EQ(nash_bargaining_select(same_success, CostAxis::Distance), "a");
  const std::vector<TradeoffPoint> identical{{"z", 0.5, 100.0, 1.0}, {"y", 0.5, 100.0, 1.0}};
  EXPECT_EQ(nash_bargaining_select(identical), "y");
  EXPECT_THROW(nash_bargaining_select({}), Error);
}

TEST(NashBargaining, NeverStrictlyDominatedAndAffineInvariant) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> scale(0.01, 50.0), shift(-1000.0, 1000.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto pts = random_points(gen, 1 + gen() % 30);
    const auto pick = nash_bargaining_select(pts);
    const auto& p = *std::find_if(pts.begin(), pts.end(), [&](const auto& x) { return x.label == pick; });
    for (const auto& q : pts) EXPECT_FALSE(q.success_rate > p.success_rate && q.avg_time_s < p.avg_time_s);
    const double a = scale(gen), b = shift(gen);
    auto scaled = pts;
    for (auto& q : scaled) q.avg_time_s = a * q.avg_time_s + b;
    EXPECT_EQ(nash_bargaining_select(scaled), pick);
  }
}

TEST(TradeoffFrontier, MatchesPairwiseDomination) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pts = random_points(gen, gen() % 51);
    for (auto axis : {CostAxis::Time, CostAxis::Distance}) {
      const auto fast = tradeoff_frontier(pts, axis);
      const auto slow = brute_frontier(pts, axis);
      ASSERT_EQ(fast.size(), slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i].label, slow[i].label);
    }
  }
}

TEST(TradeoffPoint, FromReport) {
  SimReport r;
  r.label = "x";
  r.success_rate = 0.7;
  r.avg_time_s = 123.0;
  r.vehicle_distance_km = 45.0;
  const auto p = tradeoff_point(r);
  EXPECT_EQ(p.label, "x");
  EXPECT_EQ(cost_of(p, CostAxis::Time), 123.0);
  EXPECT_EQ(cost_of(p, CostAxis::Distance), 45.0);
}
