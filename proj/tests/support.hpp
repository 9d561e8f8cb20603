// Copyright 2026 The Lorentz Tubes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small fixtures shared by the test suites and the acceptance binary.

#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "lorentz/config.hpp"
#include "lorentz/dynamics.hpp"
#include "lorentz/world.hpp"

namespace lorentz::testing {

/// Gas catalog whose type 2 has a centre disc of radius 0.25 (plus corner
/// discs of radius 0.2), so that centre discs of neighbouring cells face each
/// other through the gates.
inline std::shared_ptr<const Catalog> facing_discs_catalog() {
  const std::vector<Disc> corners{{{0, 0}, 0.2}, {{1, 0}, 0.2}, {{0, 1}, 0.2}, {{1, 1}, 0.2}};
  const std::vector<GateSpec> gates{{Side::left, 0.2, 0.8}, {Side::right, 0.2, 0.8},
                                    {Side::bottom, 0.2, 0.8}, {Side::top, 0.2, 0.8}};
  auto blocking = corners;
  blocking.push_back({{0.5, 0.5}, 0.35});
  auto facing = corners;
  facing.push_back({{0.5, 0.5}, 0.25});
  std::vector<LocalConfiguration> cells;
  cells.push_back(build_local_config(1, blocking, gates, true));
  cells.push_back(build_local_config(2, facing, gates, false));
  return std::make_shared<const Catalog>(std::move(cells));
}

/// Index of the full-circle arc (the centre disc) of a configuration.
inline int centre_arc(const LocalConfiguration& cfg) {
  const auto arcs = cfg.arcs();
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].full_circle()) return int(i);
  return -1;
}

/// Tube with cells 0..length-1 of corridor type 2 and blocking cells elsewhere.
inline World corridor_tube(int length) {
  return make_word_world(canonical_tube_catalog(), std::vector<ConfigId>(std::size_t(length), 2), 0, 1,
                         false);
}

/// The scatterer test behind the domain definition: a point of the plane is
/// inside the scatterer when it lies in a disc of the configuration of the
/// cell containing it.
inline bool inside_scatterer(const World& w, Point p) {
  const CellIndex c{std::int64_t(std::floor(p.x)), std::int64_t(std::floor(p.y))};
  if (w.kind() == TableKind::tube && (p.y <= 0.0 || p.y >= 1.0)) return true;
  const Point local = p - cell_offset(w.kind() == TableKind::tube ? CellIndex{c.x, 0} : c);
  for (const Disc& d : w.config_at(c).discs())
    if (distance(local, d.center) < d.radius) return true;
  return false;
}

/// Ray-marching reference for the next collision: step h along the ray, then
/// bisect the first step that enters the scatterer.
struct MarchHit {
  double t = 0.0;
  Point point;
};

inline std::optional<MarchHit> march(const World& w, Point o, Vec2 d, double h, double t_max) {
  double prev = 0.0;
  for (double t = h; t <= t_max; t += h) {
    if (inside_scatterer(w, o + t * d)) {
      double lo = prev, hi = t;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (inside_scatterer(w, o + mid * d) ? hi : lo) = mid;
      }
      return MarchHit{lo, o + lo * d};
    }
    prev = t;
  }
  return std::nullopt;
}

}  // namespace lorentz::testing
