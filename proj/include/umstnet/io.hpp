#pragma once

// File formats: graph / backbone JSON, request CSV, trace JSON lines, report
// JSON and the comparison / trade-off CSVs. JSON documents carry a
// "format_version"; loaders reject unknown major versions.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/metrics.hpp"
#include "umstnet/sim.hpp"
#include "umstnet/umst.hpp"
#include "umstnet/workload.hpp"

namespace umstnet::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatMajor = 1;
inline constexpr std::string_view kFormatVersion = "1.0";

/// Shortest decimal string that round-trips to the same double.
inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorKind::Format, "cannot format number");
  return std::string(buf, end);
}

inline double parse_number(std::string_view text, const std::string& where) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw Error(ErrorKind::Format, where + ": '" + std::string(text) + "' is not a number");
  return value;
}

inline std::uint64_t parse_unsigned(std::string_view text, const std::string& where) {
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw Error(ErrorKind::Format, where + ": '" + std::string(text) + "' is not a non-negative integer");
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Format, "cannot write " + path.string());
  out << content;
}

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

/// 1-based line on which each element of the top-level array `key` starts.
inline std::vector<std::size_t> element_lines(std::string_view text, std::string_view key) {
  std::vector<std::size_t> lines;
  std::size_t line = 1;
  int depth = 0;
  bool in_string = false, escaped = false;
  std::string last_string;
  std::string current;
  bool target_array = false;
  bool expect_element = false;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
        last_string = current;
      } else {
        current.push_back(c);
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (target_array && depth == 2 && expect_element && c != ']') {
      lines.push_back(line);
      expect_element = false;
    }
    switch (c) {
      case '"':
        in_string = true;
        current.clear();
        break;
      case '{':
      case '[':
        if (c == '[' && depth == 1 && last_string == key) {
          target_array = true;
          expect_element = true;
        }
        ++depth;
        break;
      case '}':
      case ']':
        --depth;
        if (depth == 1) target_array = false;
        break;
      case ',':
        if (target_array && depth == 2) expect_element = true;
        break;
      default:
        break;
    }
  }
  return lines;
}

inline std::string at_line(const std::vector<std::size_t>& lines, std::size_t index) {
  return index < lines.size() ? " (line " + std::to_string(lines[index]) + ")" : "";
}

inline void check_version(const nlohmann::json& doc, const std::string& what) {
  if (!doc.contains("format_version")) return;
  const auto& v = doc["format_version"];
  if (!v.is_string()) throw Error(ErrorKind::Format, what + ": format_version must be a string");
  const auto s = v.get<std::string>();
  const auto major = s.substr(0, s.find('.'));
  if (major != std::to_string(kFormatMajor))
    throw Error(ErrorKind::Format, what + ": unsupported format_version " + s);
}

template <typename T>
T field(const nlohmann::json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) throw Error(ErrorKind::Format, where + ": missing \"" + name + "\"");
  const auto& v = obj[name];
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw Error(ErrorKind::Format, where + ": \"" + name + "\" must be a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw Error(ErrorKind::Format, where + ": \"" + name + "\" must be a number");
  } else {
    if (!v.is_number_unsigned()) throw Error(ErrorKind::Format, where + ": \"" + name + "\" must be a non-negative integer");
  }
  return v.get<T>();
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, what + ": JSON syntax error at line " + std::to_string(line_of_offset(text, e.byte)) +
                                       ": " + e.what());
  }
}

inline std::string weight_name(WeightKind w) { return w == WeightKind::Distance ? "distance" : "travel_time"; }

inline WeightKind weight_from(const std::string& s, const std::string& where) {
  if (s == "distance") return WeightKind::Distance;
  if (s == "travel_time") return WeightKind::TravelTime;
  throw Error(ErrorKind::Format, where + ": unknown weight kind " + s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph and backbone JSON

inline Json graph_to_json(const HotspotGraph& g, std::span<const std::uint32_t> frequency = {}) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  Json hs = Json::array();
  for (const auto& h : g.hotspots())
    hs.push_back(Json{{"id", h.id}, {"lat", h.lat}, {"lon", h.lon}, {"tract_label", h.tract_label}});
  doc["hotspots"] = std::move(hs);
  Json es = Json::array();
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    Json je{{"u", e.u}, {"v", e.v}, {"distance_km", e.distance_km}, {"travel_time_s", e.travel_time_s}};
    if (!frequency.empty()) je["frequency"] = frequency[i];
    es.push_back(std::move(je));
  }
  doc["edges"] = std::move(es);
  return doc;
}

/// Parses and validates a graph document. Every element-level problem is
/// reported with the line the offending element starts on.
inline HotspotGraph parse_graph(std::string_view text, const std::string& what = "graph",
                                std::vector<std::uint32_t>* frequency = nullptr) {
  const auto doc = detail::parse_json(text, what);
  detail::check_version(doc, what);
  if (!doc.is_object() || !doc.contains("hotspots") || !doc["hotspots"].is_array())
    throw Error(ErrorKind::Format, what + ": missing \"hotspots\" array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw Error(ErrorKind::Format, what + ": missing \"edges\" array");
  const auto hs_lines = detail::element_lines(text, "hotspots");
  const auto e_lines = detail::element_lines(text, "edges");

  std::vector<Hotspot> hotspots;
  for (std::size_t i = 0; i < doc["hotspots"].size(); ++i) {
    const auto where = what + ": hotspots[" + std::to_string(i) + "]" + detail::at_line(hs_lines, i);
    const auto& jh = doc["hotspots"][i];
    Hotspot h;
    h.id = static_cast<NodeId>(detail::field<std::uint64_t>(jh, "id", where));
    h.lat = detail::field<double>(jh, "lat", where);
    h.lon = detail::field<double>(jh, "lon", where);
    h.tract_label = jh.contains("tract_label") ? detail::field<std::string>(jh, "tract_label", where) : "";
    if (h.id != i) throw Error(ErrorKind::Format, where + ": ids must be contiguous from 0 (got " + std::to_string(h.id) + ")");
    if (!valid_coordinates(h.lat, h.lon)) throw Error(ErrorKind::Format, where + ": latitude/longitude out of range");
    hotspots.push_back(std::move(h));
  }

  std::vector<Edge> edges;
  std::set<EdgeKey> keys;
  if (frequency) frequency->clear();
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto where = what + ": edges[" + std::to_string(i) + "]" + detail::at_line(e_lines, i);
    const auto& je = doc["edges"][i];
    Edge e;
    const auto u = detail::field<std::uint64_t>(je, "u", where);
    const auto v = detail::field<std::uint64_t>(je, "v", where);
    e.distance_km = detail::field<double>(je, "distance_km", where);
    e.travel_time_s = detail::field<double>(je, "travel_time_s", where);
    if (u >= hotspots.size() || v >= hotspots.size()) throw Error(ErrorKind::Format, where + ": endpoint does not exist");
    if (u == v) throw Error(ErrorKind::Format, where + ": self-loop");
    if (!(e.distance_km >= 0.0)) throw Error(ErrorKind::Format, where + ": distance_km must be >= 0");
    if (!(e.travel_time_s > 0.0)) throw Error(ErrorKind::Format, where + ": travel_time_s must be > 0");
    e.u = static_cast<NodeId>(std::min(u, v));
    e.v = static_cast<NodeId>(std::max(u, v));
    if (!keys.insert(e.key()).second) throw Error(ErrorKind::Format, where + ": duplicate edge");
    if (frequency) {
      if (!je.contains("frequency")) throw Error(ErrorKind::Format, where + ": missing \"frequency\"");
      frequency->push_back(static_cast<std::uint32_t>(detail::field<std::uint64_t>(je, "frequency", where)));
    }
    edges.push_back(e);
  }
  if (frequency) {
    // Re-align frequencies with the graph's canonical (u, v) edge order.
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a].key() < edges[b].key(); });
    std::vector<std::uint32_t> sorted;
    for (auto i : order) sorted.push_back((*frequency)[i]);
    *frequency = std::move(sorted);
  }
  try {
    return HotspotGraph(std::move(hotspots), std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, what + ": " + e.what());
  }
}

inline HotspotGraph load_graph(const std::filesystem::path& path) { return parse_graph(read_file(path), path.string()); }

inline void save_graph(const std::filesystem::path& path, const HotspotGraph& g) {
  write_file(path, graph_to_json(g).dump(2) + "\n");
}

inline Json backbone_to_json(const UmstBackbone& b) {
  auto doc = graph_to_json(b.graph, b.frequency);
  const auto& c = b.config;
  doc["provenance"] = Json{{"k_trees", c.k_trees},
                           {"drop_rate", c.drop_rate},
                           {"rng_seed", c.rng_seed},
                           {"max_resample_attempts", c.max_resample_attempts},
                           {"mst_weight", detail::weight_name(c.mst_weight)},
                           {"route_weight", detail::weight_name(c.route_weight)}};
  return doc;
}

/// Reads a backbone document. A plain graph file (no frequencies, no
/// provenance) is accepted as a backbone whose edges all have frequency 1.
inline UmstBackbone parse_backbone(std::string_view text, const std::string& what = "backbone") {
  const auto doc = detail::parse_json(text, what);
  const bool has_freq = doc.is_object() && doc.contains("edges") && doc["edges"].is_array() && !doc["edges"].empty() &&
                        doc["edges"][0].is_object() && doc["edges"][0].contains("frequency");
  UmstBackbone b;
  b.graph = parse_graph(text, what, has_freq ? &b.frequency : nullptr);
  if (!has_freq) b.frequency.assign(b.graph.edge_count(), 1);
  b.config.k_trees = 1;
  b.config.drop_rate = 0.0;
  if (doc.contains("provenance")) {
    const auto& p = doc["provenance"];
    const auto where = what + ": provenance";
    b.config.k_trees = static_cast<std::uint32_t>(detail::field<std::uint64_t>(p, "k_trees", where));
    b.config.drop_rate = detail::field<double>(p, "drop_rate", where);
    b.config.rng_seed = detail::field<std::uint64_t>(p, "rng_seed", where);
    b.config.max_resample_attempts =
        static_cast<std::uint32_t>(detail::field<std::uint64_t>(p, "max_resample_attempts", where));
    b.config.mst_weight = detail::weight_from(detail::field<std::string>(p, "mst_weight", where), where);
    b.config.route_weight = detail::weight_from(detail::field<std::string>(p, "route_weight", where), where);
  }
  return b;
}

inline UmstBackbone load_backbone(const std::filesystem::path& path) {
  return parse_backbone(read_file(path), path.string());
}

inline void save_backbone(const std::filesystem::path& path, const UmstBackbone& b) {
  write_file(path, backbone_to_json(b).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Request CSV: id,pickup,dropoff,earliest_pickup_s,deadline_s

inline constexpr std::string_view kRequestHeader = "id,pickup,dropoff,earliest_pickup_s,deadline_s";

inline void write_requests_csv(std::ostream& out, std::span<const DeliveryRequest> requests) {
  out << kRequestHeader << '\n';
  for (const auto& r : requests)
    out << r.id << ',' << r.pickup << ',' << r.dropoff << ',' << format_number(r.earliest_pickup_s) << ','
        << format_number(r.deadline_s) << '\n';
}

inline std::string requests_csv(std::span<const DeliveryRequest> requests) {
  std::ostringstream ss;
  write_requests_csv(ss, requests);
  return ss.str();
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::vector<DeliveryRequest> read_requests_csv(std::istream& in, const std::string& what = "requests") {
  std::vector<DeliveryRequest> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kRequestHeader) throw Error(ErrorKind::Format, what + ":1: expected header '" + std::string(kRequestHeader) + "'");
      header = true;
      continue;
    }
    const auto where = what + ":" + std::to_string(lineno);
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw Error(ErrorKind::Format, where + ": expected 5 columns");
    DeliveryRequest r;
    r.id = static_cast<std::uint32_t>(parse_unsigned(cells[0], where));
    r.pickup = static_cast<NodeId>(parse_unsigned(cells[1], where));
    r.dropoff = static_cast<NodeId>(parse_unsigned(cells[2], where));
    r.earliest_pickup_s = parse_number(cells[3], where);
    r.deadline_s = parse_number(cells[4], where);
    if (r.pickup == r.dropoff) throw Error(ErrorKind::Format, where + ": pickup equals dropoff");
    if (!(r.earliest_pickup_s < r.deadline_s)) throw Error(ErrorKind::Format, where + ": deadline must follow pickup");
    out.push_back(r);
  }
  if (!header) throw Error(ErrorKind::Format, what + ": empty file");
  return out;
}

inline std::vector<DeliveryRequest> load_requests(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path.string());
  return read_requests_csv(in, path.string());
}

inline void save_requests(const std::filesystem::path& path, std::span<const DeliveryRequest> requests) {
  write_file(path, requests_csv(requests));
}

// ---------------------------------------------------------------------------
// Trace JSON lines: {t, kind, vehicle, hotspot, requests[], ...}

inline Json event_to_json(const TraceEvent& ev) {
  Json j{{"t", ev.t},
         {"kind", std::string(to_string(ev.kind))},
         {"vehicle", ev.vehicle},
         {"hotspot", ev.hotspot},
         {"requests", ev.requests}};
  if (ev.kind == EventKind::Depart) {
    j["to"] = ev.to;
    j["leg_km"] = ev.leg_km;
    j["leg_s"] = ev.leg_s;
  }
  if (ev.kind == EventKind::Depart || ev.kind == EventKind::Pickup) j["capacity"] = ev.capacity;
  if (ev.kind == EventKind::Complete) j["success"] = ev.success;
  return j;
}

inline void write_trace_jsonl(std::ostream& out, std::span<const TraceEvent> events) {
  for (const auto& ev : events) out << event_to_json(ev).dump() << '\n';
}

inline std::string trace_jsonl(std::span<const TraceEvent> events) {
  std::ostringstream ss;
  write_trace_jsonl(ss, events);
  return ss.str();
}

inline std::vector<TraceEvent> read_trace_jsonl(std::istream& in, const std::string& what = "trace") {
  static const std::map<std::string, EventKind> kinds{{"arrive", EventKind::Arrive},   {"depart", EventKind::Depart},
                                                      {"pickup", EventKind::Pickup},   {"dropoff", EventKind::Dropoff},
                                                      {"merge", EventKind::Merge},     {"complete", EventKind::Complete}};
  std::vector<TraceEvent> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = what + ":" + std::to_string(lineno);
    const auto j = detail::parse_json(line, where);
    TraceEvent ev;
    ev.t = detail::field<double>(j, "t", where);
    const auto kind = detail::field<std::string>(j, "kind", where);
    const auto it = kinds.find(kind);
    if (it == kinds.end()) throw Error(ErrorKind::Format, where + ": unknown event kind " + kind);
    ev.kind = it->second;
    ev.vehicle = static_cast<std::uint32_t>(detail::field<std::uint64_t>(j, "vehicle", where));
    ev.hotspot = static_cast<NodeId>(detail::field<std::uint64_t>(j, "hotspot", where));
    if (!j.contains("requests") || !j["requests"].is_array()) throw Error(ErrorKind::Format, where + ": missing requests");
    for (const auto& r : j["requests"]) {
      if (!r.is_number_unsigned()) throw Error(ErrorKind::Format, where + ": request ids must be integers");
      ev.requests.push_back(r.get<std::uint32_t>());
    }
    if (ev.kind == EventKind::Depart) {
      ev.to = static_cast<NodeId>(detail::field<std::uint64_t>(j, "to", where));
      ev.leg_km = detail::field<double>(j, "leg_km", where);
      ev.leg_s = detail::field<double>(j, "leg_s", where);
    }
    if (ev.kind == EventKind::Depart || ev.kind == EventKind::Pickup)
      ev.capacity = static_cast<std::uint32_t>(detail::field<std::uint64_t>(j, "capacity", where));
    if (ev.kind == EventKind::Complete) {
      if (!j.contains("success") || !j["success"].is_boolean()) throw Error(ErrorKind::Format, where + ": missing success flag");
      ev.success = j["success"].get<bool>();
    }
    events.push_back(std::move(ev));
  }
  return events;
}

inline std::vector<TraceEvent> load_trace_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path.string());
  return read_trace_jsonl(in, path.string());
}

inline void save_trace(const std::filesystem::path& path, const SimTrace& trace) {
  write_file(path, trace_jsonl(trace.events));
}

/// Graph implied by a trace's departures, for reporting without the backbone
/// file. Hotspot coordinates are placeholders. Every traversal of an edge
/// must carry the same distance and travel time.
inline HotspotGraph graph_from_trace(std::span<const TraceEvent> events, std::span<const DeliveryRequest> requests) {
  NodeId n = 0;
  for (const auto& r : requests) n = std::max({n, r.pickup + 1, r.dropoff + 1});
  std::map<EdgeKey, Edge> legs;
  for (const auto& ev : events) {
    n = std::max(n, ev.hotspot + 1);
    if (ev.kind != EventKind::Depart) continue;
    if (ev.to == kNoNode || ev.to == ev.hotspot)
      throw Error(ErrorKind::Validation, "departure at t=" + format_number(ev.t) + " has no valid destination");
    n = std::max(n, ev.to + 1);
    const auto [u, v] = std::minmax(ev.hotspot, ev.to);
    const Edge e{u, v, ev.leg_km, ev.leg_s};
    const auto [it, fresh] = legs.emplace(e.key(), e);
    if (!fresh && !(it->second == e))
      throw Error(ErrorKind::Validation, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                             ") is traversed with inconsistent distance or travel time");
  }
  std::vector<Hotspot> hotspots;
  for (NodeId i = 0; i < n; ++i) hotspots.push_back({i, 0.0, 0.0, "h" + std::to_string(i)});
  std::vector<Edge> edges;
  for (const auto& [key, e] : legs) edges.push_back(e);
  try {
    return HotspotGraph(std::move(hotspots), std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, std::string("trace legs do not form a graph: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report JSON

inline Json report_to_json(const SimReport& r) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["label"] = r.label;
  j["workload_id"] = r.workload_id;
  j["total_deliveries"] = r.total_deliveries;
  j["completed"] = r.completed;
  j["successful"] = r.successful;
  j["success_rate"] = r.success_rate;
  j["completion_rate"] = r.completion_rate;
  j["avg_time_s"] = r.avg_time_s;
  j["median_time_s"] = r.median_time_s;
  j["vehicle_distance_km"] = r.vehicle_distance_km;
  j["package_distance_km"] = r.package_distance_km;
  j["distance_saved_km"] = r.distance_saved_km;
  j["distance_saved_definition"] = r.distance_saved_definition;
  j["distance_saved_vs_baseline_km"] =
      r.distance_saved_vs_baseline_km ? Json(*r.distance_saved_vs_baseline_km) : Json(nullptr);
  j["distance_saved_package_minus_vehicle_km"] = r.distance_saved_package_minus_vehicle_km;
  j["bundling_participation"] = r.bundling_participation;
  j["bundles_created"] = r.bundles_created;
  j["avg_delay_s"] = r.avg_delay_s;
  j["median_delay_s"] = r.median_delay_s;
  j["max_delay_s"] = r.max_delay_s;
  j["total_travel_s"] = r.total_travel_s;
  j["vehicles_used"] = r.vehicles_used;
  return j;
}

inline SimReport parse_report(std::string_view text, const std::string& what = "report") {
  const auto j = detail::parse_json(text, what);
  detail::check_version(j, what);
  using detail::field;
  SimReport r;
  r.label = field<std::string>(j, "label", what);
  r.workload_id = field<std::string>(j, "workload_id", what);
  r.total_deliveries = field<std::uint64_t>(j, "total_deliveries", what);
  r.completed = field<std::uint64_t>(j, "completed", what);
  r.successful = field<std::uint64_t>(j, "successful", what);
  r.success_rate = field<double>(j, "success_rate", what);
  r.completion_rate = field<double>(j, "completion_rate", what);
  r.avg_time_s = field<double>(j, "avg_time_s", what);
  r.median_time_s = field<double>(j, "median_time_s", what);
  r.vehicle_distance_km = field<double>(j, "vehicle_distance_km", what);
  r.package_distance_km = field<double>(j, "package_distance_km", what);
  r.distance_saved_km = field<double>(j, "distance_saved_km", what);
  r.distance_saved_definition = field<std::string>(j, "distance_saved_definition", what);
  if (j.contains("distance_saved_vs_baseline_km") && !j["distance_saved_vs_baseline_km"].is_null())
    r.distance_saved_vs_baseline_km = field<double>(j, "distance_saved_vs_baseline_km", what);
  r.distance_saved_package_minus_vehicle_km = field<double>(j, "distance_saved_package_minus_vehicle_km", what);
  r.bundling_participation = field<std::uint64_t>(j, "bundling_participation", what);
  r.bundles_created = field<std::uint64_t>(j, "bundles_created", what);
  r.avg_delay_s = field<double>(j, "avg_delay_s", what);
  r.median_delay_s = field<double>(j, "median_delay_s", what);
  r.max_delay_s = field<double>(j, "max_delay_s", what);
  r.total_travel_s = field<double>(j, "total_travel_s", what);
  r.vehicles_used = field<std::uint64_t>(j, "vehicles_used", what);
  return r;
}

inline SimReport load_report(const std::filesystem::path& path) { return parse_report(read_file(path), path.string()); }

inline void save_report(const std::filesystem::path& path, const SimReport& r) {
  write_file(path, report_to_json(r).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV tables

inline std::string comparison_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "metric,label,mean,std,runs,best,delta\n";
  for (std::size_t m = 0; m < table.metrics.size(); ++m) {
    for (std::size_t l = 0; l < table.labels.size(); ++l) {
      const auto& c = table.cells[m][l];
      out << table.metrics[m] << ',' << table.labels[l] << ',' << format_number(c.mean) << ','
          << format_number(c.stddev) << ',' << c.runs << ',' << (c.best ? 1 : 0) << ',' << format_number(c.delta)
          << '\n';
    }
  }
  return out.str();
}

inline std::string tradeoff_csv(std::span<const TradeoffPoint> points) {
  std::ostringstream out;
  out << "label,success_rate,avg_time_s,vehicle_km\n";
  for (const auto& p : points)
    out << p.label << ',' << format_number(p.success_rate) << ',' << format_number(p.avg_time_s) << ','
        << format_number(p.vehicle_distance_km) << '\n';
  return out.str();
}

}  // namespace umstnet::io
