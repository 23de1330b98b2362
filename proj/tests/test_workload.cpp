#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "support.hpp"

using namespace umstnet;
using namespace testing_support;

TEST(ArrivalIntensity, SinglePeakValue) {
  WorkloadConfig cfg;
  cfg.peak_fractions = {0.5};
  EXPECT_NEAR(arrival_intensity(1800.0, cfg), 1.0 / (10.0 * std::sqrt(2.0 * std::numbers::pi)), 1e-15);
  EXPECT_NEAR(arrival_intensity(1800.0, cfg), 0.0398942, 1e-7);
}

TEST(ArrivalIntensity, TwoPeaksAreSymmetric) {
  const WorkloadConfig cfg;
  EXPECT_EQ(arrival_intensity(15 * 60.0, cfg), arrival_intensity(45 * 60.0, cfg));
  for (int m = 0; m <= 30; ++m) EXPECT_DOUBLE_EQ(arrival_intensity(60.0 * (30 - m), cfg), arrival_intensity(60.0 * (30 + m), cfg));
  EXPECT_GT(arrival_intensity(15 * 60.0, cfg), arrival_intensity(30 * 60.0, cfg));
}

TEST(MinuteQuotas, SumExactlyToTheTotal) {
  WorkloadConfig cfg;
  for (std::uint32_t total : {1u, 2u, 59u, 60u, 61u, 777u, 2000u, 9234u, 100000u}) {
    cfg.total_requests = total;
    const auto q = minute_quotas(cfg);
    EXPECT_EQ(q.size(), 60u);
    EXPECT_EQ(std::accumulate(q.begin(), q.end(), std::uint64_t{0}), total);
  }
  cfg.horizon_s = 1830.0;
  cfg.total_requests = 500;
  const auto q = minute_quotas(cfg);
  EXPECT_EQ(q.size(), 31u);
  EXPECT_EQ(std::accumulate(q.begin(), q.end(), 0u), 500u);
}

TEST(MinuteQuotas, DefaultShapeIsPalindromicWithTwoModes) {
  const auto q = minute_quotas(WorkloadConfig{});
  EXPECT_EQ(std::accumulate(q.begin(), q.end(), 0u), 9234u);
  for (int d = 1; d < 30; ++d) EXPECT_EQ(q[30 - d], q[30 + d]) << "d=" << d;
  EXPECT_EQ(std::max_element(q.begin(), q.begin() + 30) - q.begin(), 15);
  EXPECT_EQ(std::max_element(q.begin() + 30, q.end()) - q.begin(), 45);
}

TEST(GenerateRequests, BasicInvariants) {
  const auto g = city_graph(26, 1);
  const auto reqs = small_workload(g, 3000, 7);
  ASSERT_EQ(reqs.size(), 3000u);
  std::vector<int> seen(26, 0);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    const auto& r = reqs[i];
    EXPECT_EQ(r.id, i);
    EXPECT_NE(r.pickup, r.dropoff);
    EXPECT_LT(r.pickup, 26u);
    EXPECT_LT(r.dropoff, 26u);
    EXPECT_GE(r.earliest_pickup_s, 0.0);
    EXPECT_LE(r.earliest_pickup_s, 3600.0);
    EXPECT_LT(r.earliest_pickup_s, r.deadline_s);
    EXPECT_LE(r.deadline_s - r.earliest_pickup_s, 1800.0 + 1e-9);
    if (i > 0) {
      EXPECT_LE(reqs[i - 1].earliest_pickup_s, r.earliest_pickup_s);
    }
    ++seen[r.pickup];
  }
  for (int c : seen) EXPECT_GT(c, 0);
}

TEST(GenerateRequests, HistogramFollowsQuotas) {
  const auto g = city_graph(10, 2);
  WorkloadConfig cfg;
  cfg.total_requests = 2000;
  const auto quotas = minute_quotas(cfg);
  for (std::uint64_t seed : {1u, 2u}) {
    cfg.rng_seed = seed;
    std::vector<std::uint32_t> hist(60, 0);
    for (const auto& r : generate_requests(g, cfg)) ++hist[static_cast<std::size_t>(r.earliest_pickup_s / 60.0)];
    EXPECT_EQ(hist, quotas);
  }
}

TEST(GenerateRequests, SingleRequest) {
  const auto reqs = small_workload(city_graph(2, 3), 1, 3);
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_NE(reqs[0].pickup, reqs[0].dropoff);
}

TEST(GenerateRequests, SeedDeterminism) {
  const auto g = city_graph(12, 4);
  EXPECT_EQ(small_workload(g, 500, 9), small_workload(g, 500, 9));
  EXPECT_NE(small_workload(g, 500, 9), small_workload(g, 500, 10));
}

TEST(GenerateRequests, ZeroWeightHotspotsAreNeverDrawn) {
  const auto g = city_graph(6, 5);
  WorkloadConfig cfg;
  cfg.total_requests = 1000;
  cfg.hotspot_weights = {1.0, 0.0, 2.0, 0.0, 1.0, 0.0};
  for (const auto& r : generate_requests(g, cfg)) {
    EXPECT_TRUE(r.pickup == 0 || r.pickup == 2 || r.pickup == 4);
    EXPECT_TRUE(r.dropoff == 0 || r.dropoff == 2 || r.dropoff == 4);
    EXPECT_NE(r.pickup, r.dropoff);
  }
  cfg.hotspot_weights = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_THROW(generate_requests(g, cfg), Error);
}

TEST(GenerateRequests, ConfigErrors) {
  const auto g = city_graph(5, 1);
  auto expect_invalid = [&](auto mutate) {
    WorkloadConfig cfg;
    cfg.total_requests = 10;
    mutate(cfg);
    try {
      generate_requests(g, cfg);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  };
  expect_invalid([](WorkloadConfig& c) { c.total_requests = 0; });
  expect_invalid([](WorkloadConfig& c) { c.peak_fractions = {0.75, 0.25}; });
  expect_invalid([](WorkloadConfig& c) { c.peak_fractions = {0.0}; });
  expect_invalid([](WorkloadConfig& c) { c.sigma_min = 0.0; });
  expect_invalid([](WorkloadConfig& c) { c.deadline_policy.alpha = 0.5; });
  expect_invalid([](WorkloadConfig& c) { c.deadline_policy = DeadlinePolicy::fixed(0.0); });
}

TEST(Deadline, Arithmetic) {
  EXPECT_DOUBLE_EQ(deadline_for(0.0, 999.0, DeadlinePolicy::fixed(1800.0), 1800.0), 1800.0);
  EXPECT_DOUBLE_EQ(deadline_for(0.0, 400.0, DeadlinePolicy::scaled(2.0, 600.0), 1800.0), 1400.0);
  EXPECT_DOUBLE_EQ(deadline_for(100.0, 400.0, DeadlinePolicy::scaled(2.0, 600.0), 1800.0), 1500.0);
  EXPECT_DOUBLE_EQ(deadline_for(0.0, 1000.0, DeadlinePolicy::scaled(2.0, 600.0), 1800.0), 1800.0);
}

TEST(Deadline, UnitScaleOnAdjacentHotspotsIsTheEdgeTime) {
  const auto g = city_graph(6, 6);
  for (const auto& e : g.edges()) {
    const DeliveryRequest r{0, e.u, e.v, 10.0, 0.0};
    EXPECT_NEAR(assign_deadline(r, g, DeadlinePolicy::scaled(1.0, 0.0), 1e9) - 10.0, e.travel_time_s, 1e-9);
  }
}

TEST(Deadline, UnreachableDropoffIsAGenerationError) {
  const HotspotGraph g(grid_hotspots(3), {{0, 1, 1.0, 1.0}});
  try {
    assign_deadline({0, 0, 2, 0.0, 0.0}, g, DeadlinePolicy{}, 1800.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Generation);
  }
}
