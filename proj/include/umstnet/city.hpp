#pragma once

// Synthetic hotspot layouts for experiments without census/road data.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "umstnet/error.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/rng.hpp"

namespace umstnet {

struct BoundingBox {
  // Roughly a downtown core (about 8.9 km x 8.5 km).
  double lat_min = 39.92;
  double lat_max = 40.00;
  double lon_min = -83.05;
  double lon_max = -82.95;
};

enum class Placement { UniformRandom, GridJitter };

struct SyntheticCityConfig {
  std::uint32_t n_hotspots = 26;
  BoundingBox bbox;
  Placement placement = Placement::UniformRandom;
  double cell_jitter_fraction = 0.3;
  std::uint64_t rng_seed = 0;
};

inline std::vector<Hotspot> generate_synthetic_city(const SyntheticCityConfig& cfg) {
  const auto& b = cfg.bbox;
  if (cfg.n_hotspots < 2) throw Error(ErrorKind::InvalidConfig, "n_hotspots must be >= 2");
  if (!(b.lat_min < b.lat_max) || !(b.lon_min < b.lon_max) || !valid_coordinates(b.lat_min, b.lon_min) ||
      !valid_coordinates(b.lat_max, b.lon_max))
    throw Error(ErrorKind::InvalidConfig, "bounding box is degenerate or out of range");
  if (!(cfg.cell_jitter_fraction >= 0.0 && cfg.cell_jitter_fraction <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "cell_jitter_fraction must lie in [0, 1]");

  Rng rng(cfg.rng_seed);
  std::vector<Hotspot> out;
  std::set<std::pair<double, double>> used;
  const auto n = cfg.n_hotspots;
  auto emit = [&](double lat, double lon) {
    if (!used.insert({lat, lon}).second) return false;
    const auto id = static_cast<NodeId>(out.size());
    out.push_back({id, lat, lon, "tract-" + std::to_string(id)});
    return true;
  };

  if (cfg.placement == Placement::UniformRandom) {
    while (out.size() < n) emit(rng.uniform(b.lat_min, b.lat_max), rng.uniform(b.lon_min, b.lon_max));
    return out;
  }

  const auto cols = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const auto rows = (n + cols - 1) / cols;
  const double dlat = (b.lat_max - b.lat_min) / rows;
  const double dlon = (b.lon_max - b.lon_min) / cols;
  for (std::uint32_t i = 0; out.size() < n; ++i) {
    const auto cell = i % (rows * cols);
    const double cy = b.lat_min + (cell / cols + 0.5) * dlat;
    const double cx = b.lon_min + (cell % cols + 0.5) * dlon;
    const double jy = (rng.uniform01() - 0.5) * cfg.cell_jitter_fraction * dlat;
    const double jx = (rng.uniform01() - 0.5) * cfg.cell_jitter_fraction * dlon;
    emit(cy + jy, cx + jx);
  }
  return out;
}

}  // namespace umstnet
