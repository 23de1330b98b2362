#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "support.hpp"

using namespace umstnet;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("umstnet_test_" + name);
  fs::remove_all(dir);
  return dir;
}

SweepConfig small_sweep(const fs::path& out) {
  SweepConfig cfg;
  cfg.k_values = {5, 10};
  cfg.rho_values = {0.5};
  cfg.seeds = {0, 1, 2};
  cfg.out_dir = out;
  cfg.threads = 2;
  return cfg;
}

WorkloadConfig small_workload_cfg() {
  WorkloadConfig w;
  w.total_requests = 150;
  return w;
}

}  // namespace

TEST(SweepCells, DefaultGridShape) {
  const SweepConfig cfg;
  const auto cells = sweep_cells(cfg);
  EXPECT_EQ(cells.size(), (1u + 1u + 16u) * 2u * 10u);
  std::set<std::string> ids;
  for (const auto& c : cells) ids.insert(c.id());
  EXPECT_EQ(ids.size(), cells.size());
  EXPECT_EQ((SweepCell{"umst", 20, 0.5, 3, true}.id()), "umst_k20_r0.5__s3__on");
  EXPECT_EQ((SweepCell{"mst", 0, 0.0, 3, false}.config()), "mst/off");
}

TEST(RunSweep, SingleCell) {
  const auto dir = scratch("single");
  SweepConfig cfg = small_sweep(dir);
  cfg.backbones = {"umst"};
  cfg.k_values = {10};
  cfg.seeds = {4};
  cfg.bundling = BundlingMode::On;
  const auto res = run_sweep(cfg, city_graph(10, 1), small_workload_cfg());
  EXPECT_EQ(res.cells, 1u);
  EXPECT_EQ(res.computed, 1u);
  EXPECT_TRUE(res.failures.empty());
  EXPECT_TRUE(fs::exists(dir / "cells" / "umst_k10_r0.5__s4__on.json"));
  const auto table = parse_csv(io::read_file(dir / "aggregate.csv"));
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.rows[0][table.column("edges")],
            std::to_string(build_umst(city_graph(10, 1), {10, 0.5, 4}).graph.edge_count()));
}

TEST(RunSweep, ResumesToIdenticalOutputs) {
  const auto dir = scratch("resume");
  const auto city = city_graph(9, 2);
  auto cfg = small_sweep(dir);
  const auto first = run_sweep(cfg, city, small_workload_cfg());
  EXPECT_EQ(first.computed, first.cells);
  const auto aggregate = io::read_file(dir / "aggregate.csv");
  const auto summary = io::read_file(dir / "summary.csv");

  fs::remove(dir / "cells" / "mst__s1__off.json");
  fs::remove(dir / "cells" / "umst_k10_r0.5__s2__on.json");
  fs::remove(dir / "aggregate.csv");
  const auto second = run_sweep(cfg, city, small_workload_cfg());
  EXPECT_EQ(second.computed, 2u);
  EXPECT_EQ(second.skipped, first.cells - 2);
  EXPECT_EQ(io::read_file(dir / "aggregate.csv"), aggregate);
  EXPECT_EQ(io::read_file(dir / "summary.csv"), summary);

  cfg.force = true;
  cfg.threads = 1;
  const auto forced = run_sweep(cfg, city, small_workload_cfg());
  EXPECT_EQ(forced.computed, forced.cells);
  EXPECT_EQ(io::read_file(dir / "aggregate.csv"), aggregate);
}

TEST(RunSweep, SummaryMatchesReaggregation) {
  const auto dir = scratch("summary");
  auto cfg = small_sweep(dir);
  cfg.backbones = {"clique", "umst"};
  run_sweep(cfg, city_graph(8, 3), small_workload_cfg());
  const auto summary = parse_csv(io::read_file(dir / "summary.csv"));
  for (const auto& row : summary.rows) {
    const auto config = row[summary.column("config")];
    std::vector<double> success, edges;
    for (const auto& cell : sweep_cells(cfg)) {
      if (cell.config() != config) continue;
      const auto doc = nlohmann::json::parse(io::read_file(dir / "cells" / (cell.id() + ".json")));
      success.push_back(doc["report"]["success_rate"].get<double>());
      edges.push_back(doc["cell"]["edges"].get<double>());
    }
    ASSERT_EQ(success.size(), 3u);
    const double mean = (success[0] + success[1] + success[2]) / 3.0;
    double ss = 0.0;
    for (double s : success) ss += (s - mean) * (s - mean);
    EXPECT_NEAR(std::stod(row[summary.column("success_rate_mean")]), mean, 1e-12);
    EXPECT_NEAR(std::stod(row[summary.column("success_rate_std")]), std::sqrt(ss / 2.0), 1e-12);
    EXPECT_NEAR(std::stod(row[summary.column("edges_mean")]), (edges[0] + edges[1] + edges[2]) / 3.0, 1e-12);
  }
  EXPECT_EQ(summary.rows.size(), 2u * 2u + 2u);
}

TEST(RunSweep, FailedCellsAreRecordedNotFatal) {
  const auto dir = scratch("failures");
  auto cfg = small_sweep(dir);
  cfg.backbones = {"umst"};
  cfg.k_values = {5};
  cfg.rho_values = {0.5, 0.95};  // 0.95 leaves too few edges to span
  cfg.seeds = {0};
  cfg.bundling = BundlingMode::Off;
  const auto res = run_sweep(cfg, city_graph(8, 1), small_workload_cfg());
  EXPECT_EQ(res.cells, 2u);
  ASSERT_EQ(res.failures.size(), 1u);
  EXPECT_EQ(res.failures[0].first, "umst_k5_r0.95__s0__off");
  const auto manifest = parse_csv(io::read_file(dir / "failures.csv"));
  ASSERT_EQ(manifest.rows.size(), 1u);
  EXPECT_EQ(manifest.rows[0][0], "umst_k5_r0.95__s0__off");
  EXPECT_EQ(parse_csv(io::read_file(dir / "aggregate.csv")).rows.size(), 1u);
}

TEST(RunSweep, ThreadCapFromEnvironment) {
  ::setenv("UMST_NET_THREADS", "3", 1);
  EXPECT_EQ(sweep_threads(0), 3u);
  EXPECT_EQ(sweep_threads(5), 5u);
  ::setenv("UMST_NET_THREADS", "lots", 1);
  EXPECT_THROW(sweep_threads(0), Error);
  ::unsetenv("UMST_NET_THREADS");
  EXPECT_GE(sweep_threads(0), 1u);
}

TEST(PlotData, Formats) {
  const auto dir = scratch("plot");
  auto cfg = small_sweep(dir);
  run_sweep(cfg, city_graph(9, 5), small_workload_cfg());
  const auto aggregate = io::read_file(dir / "aggregate.csv");

  const auto time = parse_csv(emit_plot_data(aggregate, "success-vs-time"));
  EXPECT_EQ(time.header, (std::vector<std::string>{"label", "success_rate", "avg_time_s", "is_nbs"}));
  EXPECT_EQ(time.rows.size(), 8u);  // (clique, mst, 2 umst) x (on, off)

  // Independent re-derivation of the seed means and the NBS choice.
  const auto agg = parse_csv(aggregate);
  std::vector<TradeoffPoint> pts;
  for (const auto& row : time.rows) {
    double s = 0.0, t = 0.0, km = 0.0;
    int n = 0;
    for (const auto& a : agg.rows) {
      if (a[agg.column("config")] != row[0]) continue;
      s += std::stod(a[agg.column("success_rate")]);
      t += std::stod(a[agg.column("avg_time_s")]);
      km += std::stod(a[agg.column("vehicle_distance_km")]);
      ++n;
    }
    ASSERT_EQ(n, 3);
    EXPECT_NEAR(std::stod(row[1]), s / 3, 1e-12);
    EXPECT_NEAR(std::stod(row[2]), t / 3, 1e-9);
    pts.push_back({row[0], s / 3, t / 3, km / 3});
  }
  int flagged = 0;
  for (const auto& row : time.rows) {
    flagged += row[3] == "1";
    if (row[3] == "1") {
      EXPECT_EQ(row[0], nash_bargaining_select(pts, CostAxis::Time));
    }
  }
  EXPECT_EQ(flagged, 1);

  const auto dist = parse_csv(emit_plot_data(aggregate, "success-vs-distance"));
  EXPECT_EQ(dist.header, (std::vector<std::string>{"label", "success_rate", "vehicle_km", "is_nbs"}));
  flagged = 0;
  for (const auto& row : dist.rows) {
    flagged += row[3] == "1";
    if (row[3] == "1") {
      EXPECT_EQ(row[0], nash_bargaining_select(pts, CostAxis::Distance));
    }
  }
  EXPECT_EQ(flagged, 1);

  const auto edges = parse_csv(emit_plot_data(aggregate, "edges-vs-k"));
  EXPECT_EQ(edges.header, (std::vector<std::string>{"k", "rho", "mean_edges", "clique_edges"}));
  ASSERT_EQ(edges.rows.size(), 2u);
  EXPECT_EQ(edges.rows[0][0], "5");
  EXPECT_EQ(edges.rows[1][0], "10");
  EXPECT_EQ(edges.rows[0][3], "36");
  EXPECT_LE(std::stod(edges.rows[0][2]), std::stod(edges.rows[1][2]));
}

TEST(PlotData, EmptyAggregateAndUnknownKind) {
  const std::string header = std::string(kAggregateKeyColumns) + ",success_rate,avg_time_s,vehicle_distance_km\n";
  EXPECT_EQ(emit_plot_data(header, "success-vs-time"), "label,success_rate,avg_time_s,is_nbs\n");
  EXPECT_EQ(emit_plot_data("", "edges-vs-k"), "k,rho,mean_edges,clique_edges\n");
  try {
    emit_plot_data(header, "pie-chart");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Usage);
  }
}
