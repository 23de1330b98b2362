#pragma once

// Parameter sweeps over (backbone, K, rho, seed, bundling) cells, with
// resumable per-cell outputs, an aggregate CSV, a mean/std summary and a
// failures manifest; plus plot-ready CSV extraction from the aggregate.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <set>
#include <thread>
#include <tuple>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/io.hpp"
#include "umstnet/metrics.hpp"
#include "umstnet/sim.hpp"
#include "umstnet/umst.hpp"
#include "umstnet/validate.hpp"
#include "umstnet/workload.hpp"

namespace umstnet {

enum class BundlingMode { Both, On, Off };

struct SweepConfig {
  std::vector<std::uint32_t> k_values{10, 20, 40, 100};
  std::vector<double> rho_values{0.1, 0.2, 0.5, 0.7};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::string> backbones{"clique", "mst", "umst"};
  BundlingMode bundling = BundlingMode::Both;
  FleetConfig fleet;
  std::filesystem::path out_dir = "sweep";
  bool force = false;
  unsigned threads = 0;  // 0: UMST_NET_THREADS, else hardware concurrency

  void validate() const {
    if (seeds.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one seed");
    if (backbones.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one backbone kind");
    for (const auto& b : backbones)
      if (b != "clique" && b != "mst" && b != "umst")
        throw Error(ErrorKind::InvalidConfig, "unknown backbone kind " + b);
    if (std::find(backbones.begin(), backbones.end(), "umst") != backbones.end() &&
        (k_values.empty() || rho_values.empty()))
      throw Error(ErrorKind::InvalidConfig, "UMST sweeps need nonempty k and rho lists");
    fleet.validate();
  }
};

struct SweepCell {
  std::string backbone;  // clique | mst | umst
  std::uint32_t k = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  bool bundling = true;

  std::string label() const {
    if (backbone != "umst") return backbone;
    return "umst_k" + std::to_string(k) + "_r" + io::format_number(rho);
  }
  std::string config() const { return label() + (bundling ? "/on" : "/off"); }
  std::string id() const { return label() + "__s" + std::to_string(seed) + (bundling ? "__on" : "__off"); }
};

struct SweepResult {
  std::size_t cells = 0;
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // cell id, message
};

inline std::vector<SweepCell> sweep_cells(const SweepConfig& cfg) {
  std::vector<bool> modes;
  if (cfg.bundling != BundlingMode::Off) modes.push_back(true);
  if (cfg.bundling != BundlingMode::On) modes.push_back(false);
  std::vector<SweepCell> cells;
  for (const auto& kind : cfg.backbones) {
    for (bool on : modes) {
      for (auto seed : cfg.seeds) {
        if (kind != "umst") {
          cells.push_back({kind, 0, 0.0, seed, on});
          continue;
        }
        for (auto k : cfg.k_values)
          for (double rho : cfg.rho_values) cells.push_back({kind, k, rho, seed, on});
      }
    }
  }
  return cells;
}

inline unsigned sweep_threads(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("UMST_NET_THREADS"); env != nullptr && *env != '\0') {
      try {
        n = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidConfig, std::string("UMST_NET_THREADS is not a number: ") + env);
      }
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

namespace detail {

inline UmstBackbone cell_backbone(const SweepCell& cell, const HotspotGraph& city) {
  if (cell.backbone == "clique") return clique_backbone(city);
  if (cell.backbone == "mst") return mst_backbone(city);
  UmstConfig cfg;
  cfg.k_trees = cell.k;
  cfg.drop_rate = cell.rho;
  cfg.rng_seed = cell.seed;
  return build_umst(city, cfg);
}

inline io::Json run_cell(const SweepCell& cell, const HotspotGraph& city, const WorkloadConfig& workload,
                         const FleetConfig& fleet) {
  auto wcfg = workload;
  wcfg.rng_seed = cell.seed;
  const auto requests = generate_requests(city, wcfg);
  const auto backbone = cell_backbone(cell, city);

  auto off = fleet;
  off.bundling_enabled = false;
  auto baseline = certify(run_simulation(backbone, requests, off, cell.seed), backbone.graph, requests);
  SimReport report;
  if (cell.bundling) {
    auto on = fleet;
    on.bundling_enabled = true;
    const auto baseline_km = compute_metrics(baseline, requests).vehicle_distance_km;
    auto trace = certify(run_simulation(backbone, requests, on, cell.seed), backbone.graph, requests);
    report = compute_metrics(trace, requests, baseline_km);
  } else {
    report = compute_metrics(baseline, requests);
  }
  report.label = cell.config();

  io::Json doc;
  doc["format_version"] = io::kFormatVersion;
  doc["cell"] = io::Json{{"id", cell.id()},
                         {"backbone", cell.backbone},
                         {"k", cell.k},
                         {"rho", cell.rho},
                         {"seed", cell.seed},
                         {"bundling", cell.bundling},
                         {"nodes", city.node_count()},
                         {"edges", backbone.graph.edge_count()},
                         {"clique_edges", city.edge_count()}};
  doc["report"] = io::report_to_json(report);
  return doc;
}

inline const std::vector<std::string>& aggregate_metrics() {
  static const std::vector<std::string> names{
      "success_rate",        "completion_rate",        "avg_time_s",     "median_time_s",
      "vehicle_distance_km", "package_distance_km",    "distance_saved_km", "bundling_participation",
      "bundles_created",     "avg_delay_s",            "vehicles_used"};
  return names;
}

}  // namespace detail

inline constexpr std::string_view kAggregateKeyColumns = "config,label,backbone,k,rho,seed,bundling,nodes,edges,clique_edges";

/// Aggregate CSV rows rebuilt from the per-cell files, in cell order.
inline std::string aggregate_csv(const std::vector<SweepCell>& cells, const std::filesystem::path& cell_dir) {
  std::ostringstream out;
  out << kAggregateKeyColumns;
  for (const auto& m : detail::aggregate_metrics()) out << ',' << m;
  out << '\n';
  for (const auto& cell : cells) {
    const auto path = cell_dir / (cell.id() + ".json");
    if (!std::filesystem::exists(path)) continue;
    const auto doc = nlohmann::json::parse(io::read_file(path));
    const auto& c = doc["cell"];
    const auto& r = doc["report"];
    out << cell.config() << ',' << cell.label() << ',' << cell.backbone << ',' << cell.k << ','
        << io::format_number(cell.rho) << ',' << cell.seed << ',' << (cell.bundling ? "on" : "off") << ','
        << c["nodes"].get<std::uint64_t>() << ',' << c["edges"].get<std::uint64_t>() << ','
        << c["clique_edges"].get<std::uint64_t>();
    for (const auto& m : detail::aggregate_metrics()) out << ',' << io::format_number(r[m].get<double>());
    out << '\n';
  }
  return out.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::Format, "CSV is missing column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto c : io::split_csv(line)) cells.emplace_back(c);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size())
        throw Error(ErrorKind::Format, "CSV line " + std::to_string(lineno) + ": expected " +
                                           std::to_string(table.header.size()) + " columns");
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

/// Mean and sample std per (config, metric) over seeds, from the aggregate.
inline std::string summary_csv(std::string_view aggregate) {
  const auto table = parse_csv(aggregate);
  std::ostringstream out;
  out << "config,runs,edges_mean,edges_std";
  for (const auto& m : detail::aggregate_metrics()) out << ',' << m << "_mean," << m << "_std";
  out << '\n';
  if (table.rows.empty()) return out.str();

  std::vector<std::string> order;
  std::map<std::string, std::vector<const std::vector<std::string>*>> groups;
  const auto config_col = table.column("config");
  for (const auto& row : table.rows) {
    if (!groups.count(row[config_col])) order.push_back(row[config_col]);
    groups[row[config_col]].push_back(&row);
  }
  auto stats = [&](const std::vector<const std::vector<std::string>*>& rows, std::size_t col) {
    std::vector<double> v;
    for (const auto* r : rows) v.push_back(io::parse_number((*r)[col], "aggregate"));
    return std::pair{detail::mean_of(v), sample_stddev(v)};
  };
  for (const auto& config : order) {
    const auto& rows = groups[config];
    out << config << ',' << rows.size();
    auto [em, es] = stats(rows, table.column("edges"));
    out << ',' << io::format_number(em) << ',' << io::format_number(es);
    for (const auto& m : detail::aggregate_metrics()) {
      auto [mean, sd] = stats(rows, table.column(m));
      out << ',' << io::format_number(mean) << ',' << io::format_number(sd);
    }
    out << '\n';
  }
  return out.str();
}

/// Runs every cell not already on disk (all of them with cfg.force), then
/// rewrites aggregate.csv, summary.csv and failures.csv under cfg.out_dir.
/// `progress` is called once per finished cell from worker threads.
inline SweepResult run_sweep(const SweepConfig& cfg, const HotspotGraph& city, const WorkloadConfig& workload,
                             const std::function<void(const SweepCell&, const std::string&)>& progress = {}) {
  cfg.validate();
  workload.validate();
  const auto cells = sweep_cells(cfg);
  const auto cell_dir = cfg.out_dir / "cells";
  std::filesystem::create_directories(cell_dir);

  SweepResult result;
  result.cells = cells.size();
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cfg.force && std::filesystem::exists(cell_dir / (cells[i].id() + ".json"))) {
      ++result.skipped;
    } else {
      todo.push_back(i);
    }
  }

  std::mutex mu;
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < todo.size();) {
      const auto& cell = cells[todo[t]];
      std::string status = "ok";
      try {
        const auto doc = detail::run_cell(cell, city, workload, cfg.fleet);
        // Write to a temporary name first so an interrupted sweep never
        // leaves a truncated cell behind.
        const auto final_path = cell_dir / (cell.id() + ".json");
        const auto tmp = cell_dir / (cell.id() + ".json.tmp");
        io::write_file(tmp, doc.dump(2) + "\n");
        std::filesystem::rename(tmp, final_path);
      } catch (const std::exception& e) {
        errors[todo[t]] = e.what();
        status = e.what();
      }
      if (progress) {
        std::lock_guard lock(mu);
        progress(cell, status);
      }
    }
  };
  const unsigned n = std::min<std::size_t>(sweep_threads(cfg.threads), std::max<std::size_t>(todo.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  std::ostringstream failures;
  failures << "cell,error\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (errors[i].empty()) continue;
    auto msg = errors[i];
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    failures << cells[i].id() << ',' << msg << '\n';
    result.failures.emplace_back(cells[i].id(), errors[i]);
  }
  result.computed = todo.size() - result.failures.size();

  const auto aggregate = aggregate_csv(cells, cell_dir);
  io::write_file(cfg.out_dir / "aggregate.csv", aggregate);
  io::write_file(cfg.out_dir / "summary.csv", summary_csv(aggregate));
  io::write_file(cfg.out_dir / "failures.csv", failures.str());
  return result;
}

// ---------------------------------------------------------------------------
// Plot data

/// Plot-ready CSV from an aggregate CSV. Kinds:
///   success-vs-time      label,success_rate,avg_time_s,is_nbs
///   success-vs-distance  label,success_rate,vehicle_km,is_nbs
///   edges-vs-k           k,rho,mean_edges,clique_edges (UMST rows only)
/// Rows are seed means per configuration, in first-appearance order.
inline std::string emit_plot_data(std::string_view aggregate, std::string_view kind) {
  const bool time = kind == "success-vs-time";
  const bool dist = kind == "success-vs-distance";
  const bool edges = kind == "edges-vs-k";
  if (!time && !dist && !edges) throw Error(ErrorKind::Usage, "unknown plot kind " + std::string(kind));

  std::ostringstream out;
  if (edges) {
    out << "k,rho,mean_edges,clique_edges\n";
  } else {
    out << "label,success_rate," << (time ? "avg_time_s" : "vehicle_km") << ",is_nbs\n";
  }
  const auto table = parse_csv(aggregate);
  if (table.rows.empty()) return out.str();

  auto num = [](const std::string& s) { return io::parse_number(s, "aggregate"); };
  std::vector<std::string> order;
  std::map<std::string, std::vector<const std::vector<std::string>*>> groups;
  const auto config_col = table.column("config");
  for (const auto& row : table.rows) {
    if (!groups.count(row[config_col])) order.push_back(row[config_col]);
    groups[row[config_col]].push_back(&row);
  }
  auto mean_col = [&](const std::vector<const std::vector<std::string>*>& rows, std::size_t col) {
    double s = 0.0;
    for (const auto* r : rows) s += num((*r)[col]);
    return s / static_cast<double>(rows.size());
  };

  if (edges) {
    const auto backbone = table.column("backbone");
    std::vector<std::tuple<double, double, double, double>> points;
    std::set<std::string> seen;
    for (const auto& config : order) {
      const auto& rows = groups[config];
      const auto& first = *rows.front();
      if (first[backbone] != "umst") continue;
      const auto label = first[table.column("label")];
      if (!seen.insert(label).second) continue;  // on/off share the backbone
      points.emplace_back(num(first[table.column("k")]), num(first[table.column("rho")]),
                          mean_col(rows, table.column("edges")), mean_col(rows, table.column("clique_edges")));
    }
    std::sort(points.begin(), points.end());
    for (const auto& [k, rho, e, c] : points)
      out << io::format_number(k) << ',' << io::format_number(rho) << ',' << io::format_number(e) << ','
          << io::format_number(c) << '\n';
    return out.str();
  }

  std::vector<TradeoffPoint> points;
  for (const auto& config : order) {
    const auto& rows = groups[config];
    points.push_back({config, mean_col(rows, table.column("success_rate")), mean_col(rows, table.column("avg_time_s")),
                      mean_col(rows, table.column("vehicle_distance_km"))});
  }
  const auto axis = time ? CostAxis::Time : CostAxis::Distance;
  const auto nbs = nash_bargaining_select(points, axis);
  for (const auto& p : points)
    out << p.label << ',' << io::format_number(p.success_rate) << ',' << io::format_number(cost_of(p, axis)) << ','
        << (p.label == nbs ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace umstnet
