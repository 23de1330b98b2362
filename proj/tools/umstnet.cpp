// umstnet command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 trace validation failure,
// 3 sweep finished with failed cells.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umstnet/umstnet.hpp"

namespace fs = std::filesystem;
using namespace umstnet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSweepFailures = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
  bool quiet = false;
};

void emit(const Globals& g, const std::string& content) {
  if (g.out.empty()) {
    std::cout << content;
    return;
  }
  if (!g.force && fs::exists(g.out))
    throw Error(ErrorKind::Usage, g.out + " already exists (use --force to overwrite)");
  io::write_file(g.out, content);
}

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

WeightKind weight_arg(const std::string& s) { return s == "distance" ? WeightKind::Distance : WeightKind::TravelTime; }

const std::map<std::string, std::string> kWeightChoices{{"distance", "distance"}, {"travel_time", "travel_time"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UMST backbones and bundled last-mile delivery simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file (or directory for sweep); stdout when omitted");
  app.add_flag("--force", g.force, "Overwrite existing outputs / recompute sweep cells");
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");

  // gen-city
  auto* gen_city = app.add_subcommand("gen-city", "Synthetic hotspots as a complete graph (JSON)");
  SyntheticCityConfig city;
  std::string placement = "uniform";
  double speed = kDefaultSpeedKmh;
  std::vector<double> bbox;
  gen_city->add_option("--n", city.n_hotspots, "Number of hotspots")->capture_default_str();
  gen_city->add_option("--placement", placement, "uniform | grid")
      ->check(CLI::IsMember({"uniform", "grid"}))
      ->capture_default_str();
  gen_city->add_option("--jitter", city.cell_jitter_fraction, "Grid cell jitter fraction")->capture_default_str();
  gen_city->add_option("--bbox", bbox, "lat_min lat_max lon_min lon_max")->expected(4)->delimiter(',');
  gen_city->add_option("--speed", speed, "Vehicle speed (km/h) used for edge travel times")->capture_default_str();

  // build-umst
  auto* build = app.add_subcommand("build-umst", "Build a backbone from a graph");
  std::string graph_path, kind = "umst", mst_weight = "distance", route_weight = "travel_time";
  UmstConfig ucfg;
  build->add_option("--graph", graph_path, "Input graph JSON")->required()->check(CLI::ExistingFile);
  build->add_option("--k", ucfg.k_trees, "Number of MSTs")->capture_default_str();
  build->add_option("--rho", ucfg.drop_rate, "Edge drop rate")->capture_default_str();
  build->add_option("--kind", kind, "umst | mst | clique")->check(CLI::IsMember({"umst", "mst", "clique"}))->capture_default_str();
  build->add_option("--max-resample", ucfg.max_resample_attempts, "Resample budget per tree")->capture_default_str();
  build->add_option("--mst-weight", mst_weight, "distance | travel_time")->check(CLI::IsMember(kWeightChoices))->capture_default_str();
  build->add_option("--route-weight", route_weight, "distance | travel_time")->check(CLI::IsMember(kWeightChoices))->capture_default_str();

  // gen-workload
  auto* gen_work = app.add_subcommand("gen-workload", "Generate delivery requests (CSV)");
  WorkloadConfig wcfg;
  std::string deadline = "scaled";
  gen_work->add_option("--graph", graph_path, "Graph JSON (deadlines use its shortest travel times)")
      ->required()
      ->check(CLI::ExistingFile);
  gen_work->add_option("--n", wcfg.total_requests, "Number of requests")->capture_default_str();
  gen_work->add_option("--horizon", wcfg.horizon_s, "Horizon (s)")->capture_default_str();
  gen_work->add_option("--peaks", wcfg.peak_fractions, "Peak positions as horizon fractions")->delimiter(',');
  gen_work->add_option("--sigma", wcfg.sigma_min, "Peak spread (minutes)")->capture_default_str();
  gen_work->add_option("--max-trip", wcfg.max_trip_s, "Deadline cap (s)")->capture_default_str();
  gen_work->add_option("--deadline", deadline, "scaled | fixed")->check(CLI::IsMember({"scaled", "fixed"}))->capture_default_str();
  gen_work->add_option("--alpha", wcfg.deadline_policy.alpha, "Scaled deadline multiplier")->capture_default_str();
  gen_work->add_option("--beta", wcfg.deadline_policy.beta_s, "Scaled deadline slack (s)")->capture_default_str();
  gen_work->add_option("--budget", wcfg.deadline_policy.budget_s, "Fixed deadline budget (s)")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the delivery simulation on a backbone");
  std::string backbone_path, requests_path, trace_path, report_path, bundling = "on";
  FleetConfig fleet;
  std::optional<std::uint32_t> pool;
  sim->add_option("--backbone", backbone_path, "Backbone (or graph) JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--requests", requests_path, "Requests CSV")->required()->check(CLI::ExistingFile);
  sim->add_option("--capacity", fleet.vehicle_capacity, "Vehicle capacity")->capture_default_str();
  sim->add_option("--hold", fleet.dispatch_hold_s, "Dispatch hold (s)")->capture_default_str();
  sim->add_option("--bundling", bundling, "on | off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  sim->add_option("--pool", pool, "Fixed fleet size (default: vehicles spawn on demand)");
  sim->add_option("--grace", fleet.cutoff_grace_s, "Seconds past the latest deadline before cutoff")->capture_default_str();
  sim->add_option("--trace", trace_path, "Trace output (JSON lines)")->required();
  sim->add_option("--report", report_path, "Also write a report JSON");

  // report
  auto* rep = app.add_subcommand("report", "Validate a trace and compute its metrics");
  std::string baseline_trace, label;
  rep->add_option("--trace", trace_path, "Trace JSON lines")->required()->check(CLI::ExistingFile);
  rep->add_option("--requests", requests_path, "Requests CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--backbone", backbone_path, "Backbone the trace was run on (edges are taken from the trace when omitted)")
      ->check(CLI::ExistingFile);
  rep->add_option("--baseline-trace", baseline_trace, "No-bundling trace on the same workload")->check(CLI::ExistingFile);
  rep->add_option("--label", label, "Report label");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Resumable (backbone, K, rho, seed, bundling) sweep");
  SweepConfig scfg;
  std::string sweep_bundling = "both";
  std::optional<std::uint32_t> runs;
  std::optional<std::uint32_t> city_n;
  std::uint32_t sweep_requests = wcfg.total_requests;
  sw->add_option("--graph", graph_path, "City graph JSON (default: synthetic city from --city-n and --seed)")
      ->check(CLI::ExistingFile);
  sw->add_option("--city-n", city_n, "Synthetic city size when no --graph is given (default 26)");
  sw->add_option("--k", scfg.k_values, "K values")->delimiter(',');
  sw->add_option("--rho", scfg.rho_values, "Drop rates")->delimiter(',');
  sw->add_option("--seeds", scfg.seeds, "Seed list")->delimiter(',');
  sw->add_option("--runs", runs, "Use seeds 0..runs-1");
  sw->add_option("--backbones", scfg.backbones, "clique,mst,umst")->delimiter(',');
  sw->add_option("--bundling", sweep_bundling, "both | on | off")->check(CLI::IsMember({"both", "on", "off"}))->capture_default_str();
  sw->add_option("--requests", sweep_requests, "Requests per workload")->capture_default_str();
  sw->add_option("--capacity", scfg.fleet.vehicle_capacity, "Vehicle capacity")->capture_default_str();
  sw->add_option("--hold", scfg.fleet.dispatch_hold_s, "Dispatch hold (s)")->capture_default_str();
  sw->add_option("--threads", scfg.threads, "Worker threads (default: UMST_NET_THREADS or all cores)");

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Plot-ready CSV from a sweep aggregate");
  std::string aggregate_path, plot_kind;
  plot->add_option("--aggregate", aggregate_path, "aggregate.csv from a sweep")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", plot_kind, "success-vs-time | success-vs-distance | edges-vs-k")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_city) {
      city.rng_seed = g.seed;
      city.placement = placement == "grid" ? Placement::GridJitter : Placement::UniformRandom;
      if (!bbox.empty()) city.bbox = {bbox[0], bbox[1], bbox[2], bbox[3]};
      const auto graph = build_complete_graph(generate_synthetic_city(city), haversine_provider(), speed);
      emit(g, io::graph_to_json(graph).dump(2) + "\n");
      note(g, "gen-city: " + std::to_string(graph.node_count()) + " hotspots, " + std::to_string(graph.edge_count()) +
                  " edges");
    } else if (*build) {
      const auto graph = io::load_graph(graph_path);
      UmstBackbone b;
      if (kind == "clique") {
        b = clique_backbone(graph);
      } else if (kind == "mst") {
        b = mst_backbone(graph, weight_arg(mst_weight));
      } else {
        ucfg.rng_seed = g.seed;
        ucfg.mst_weight = weight_arg(mst_weight);
        ucfg.route_weight = weight_arg(route_weight);
        b = build_umst(graph, ucfg);
      }
      b.config.route_weight = weight_arg(route_weight);
      emit(g, io::backbone_to_json(b).dump(2) + "\n");
      note(g, "build-umst: " + kind + " backbone with " + std::to_string(b.graph.edge_count()) + " of " +
                  std::to_string(graph.edge_count()) + " edges");
    } else if (*gen_work) {
      const auto graph = io::load_graph(graph_path);
      wcfg.rng_seed = g.seed;
      if (deadline == "fixed") wcfg.deadline_policy.mode = DeadlinePolicy::Mode::FixedBudget;
      const auto requests = generate_requests(graph, wcfg);
      emit(g, io::requests_csv(requests));
      note(g, "gen-workload: " + std::to_string(requests.size()) + " requests");
    } else if (*sim) {
      const auto backbone = io::load_backbone(backbone_path);
      const auto requests = io::load_requests(requests_path);
      fleet.bundling_enabled = bundling == "on";
      if (pool) {
        fleet.spawn_mode = SpawnMode::FixedPool;
        fleet.pool_size = *pool;
      }
      auto trace = run_simulation(backbone, requests, fleet, g.seed);
      io::save_trace(trace_path, trace);
      const auto check = validate_trace(trace, backbone.graph, requests);
      if (!check.ok()) {
        std::cerr << "simulate: trace failed validation: " << check.summary() << '\n';
        return kExitValidation;
      }
      if (!report_path.empty() || !g.out.empty()) {
        auto report = compute_metrics(certify(std::move(trace), backbone.graph, requests), requests);
        report.label = bundling == "on" ? "bundling" : "no-bundling";
        const auto text = io::report_to_json(report).dump(2) + "\n";
        io::write_file(report_path.empty() ? fs::path(g.out) : fs::path(report_path), text);
      }
      note(g, "simulate: wrote " + trace_path);
    } else if (*rep) {
      const auto requests = io::load_requests(requests_path);
      std::optional<HotspotGraph> backbone;
      if (!backbone_path.empty()) {
        backbone = io::load_backbone(backbone_path).graph;
      } else {
        note(g, "report: no --backbone given; checking edges against the legs recorded in the trace");
      }
      auto load = [&](const std::string& path) {
        auto events = io::load_trace_events(path);
        const auto graph = backbone ? *backbone : io::graph_from_trace(events, requests);
        return certify(assemble_trace(std::move(events), requests), graph, requests);
      };
      std::optional<double> baseline_km;
      if (!baseline_trace.empty()) baseline_km = compute_metrics(load(baseline_trace), requests).vehicle_distance_km;
      auto report = compute_metrics(load(trace_path), requests, baseline_km);
      report.label = label.empty() ? fs::path(trace_path).stem().string() : label;
      emit(g, io::report_to_json(report).dump(2) + "\n");
    } else if (*sw) {
      if (runs) {
        scfg.seeds.clear();
        for (std::uint32_t s = 0; s < *runs; ++s) scfg.seeds.push_back(s);
      }
      scfg.bundling = sweep_bundling == "on" ? BundlingMode::On : sweep_bundling == "off" ? BundlingMode::Off : BundlingMode::Both;
      scfg.out_dir = g.out.empty() ? fs::path("sweep") : fs::path(g.out);
      scfg.force = g.force;
      HotspotGraph graph;
      if (!graph_path.empty()) {
        graph = io::load_graph(graph_path);
      } else {
        SyntheticCityConfig c;
        c.n_hotspots = city_n.value_or(26);
        c.rng_seed = g.seed;
        graph = build_complete_graph(generate_synthetic_city(c), haversine_provider(), scfg.fleet.vehicle_speed_kmh);
      }
      WorkloadConfig w;
      w.total_requests = sweep_requests;
      const auto result = run_sweep(scfg, graph, w, [&](const SweepCell& cell, const std::string& status) {
        note(g, "  " + cell.id() + ": " + status);
      });
      note(g, "sweep: " + std::to_string(result.cells) + " cells, " + std::to_string(result.computed) + " computed, " +
                  std::to_string(result.skipped) + " skipped, " + std::to_string(result.failures.size()) +
                  " failed -> " + scfg.out_dir.string());
      if (!result.failures.empty()) return kExitSweepFailures;
    } else if (*plot) {
      emit(g, emit_plot_data(io::read_file(aggregate_path), plot_kind));
    }
  } catch (const Error& e) {
    std::cerr << "umstnet: " << e.what() << '\n';
    return e.kind() == ErrorKind::Validation ? kExitValidation : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "umstnet: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
