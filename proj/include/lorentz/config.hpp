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

// Single-cell scatterer configurations and catalogs.
//
// A cell is the unit square [0,1]^2. Its scatterer is a union of discs
// clipped to the cell together with the flat parts of the cell boundary that
// are not gates. Gates are open intervals on the sides through which
// trajectories pass into the neighbouring cell. Tubes use the left/right
// gates only, gases use all four.
//
// build_local_config() decomposes the scatterer boundary into ArcPieces and
// WallSegments and checks the static admissibility conditions:
//   A1  arcs meet only at endpoints (no two discs share a circle),
//   A2  no gate touches the scatterer,
//   A3  radii lie in [kMinRadius, 1] (curvature bounded below),
//   A4  every meeting angle between arcs, walls and gates is >= kMinMeetingAngle.
// The dynamical conditions (blocking, walls out of reach) are verified by
// sampling in check_blocking() and check_shadowing().

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lorentz/geometry.hpp"

namespace lorentz {

inline constexpr double kMinRadius = 0.05;
inline constexpr double kMinMeetingAngle = 1e-3;
inline constexpr double kClearanceTol = 1e-6;
/// Positional tolerance used when classifying arc endpoints.
inline constexpr double kSnapTol = 1e-9;

using ConfigId = int;

enum class TableKind { tube, gas };

inline std::string_view to_string(TableKind k) { return k == TableKind::tube ? "tube" : "gas"; }

enum class Side { left, right, bottom, top };

inline std::string_view to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

inline std::optional<Side> side_from_string(std::string_view s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  if (s == "bottom") return Side::bottom;
  if (s == "top") return Side::top;
  return std::nullopt;
}

inline Side opposite(Side s) {
  switch (s) {
    case Side::left: return Side::right;
    case Side::right: return Side::left;
    case Side::bottom: return Side::top;
    case Side::top: return Side::bottom;
  }
  return s;
}

/// Point of the unit square's side `s` at coordinate `c` along it.
inline Point side_point(Side s, double c) {
  switch (s) {
    case Side::left: return {0.0, c};
    case Side::right: return {1.0, c};
    case Side::bottom: return {c, 0.0};
    case Side::top: return {c, 1.0};
  }
  return {};
}

inline UnitVector side_inward_normal(Side s) {
  switch (s) {
    case Side::left: return UnitVector::normalize({1.0, 0.0});
    case Side::right: return UnitVector::normalize({-1.0, 0.0});
    case Side::bottom: return UnitVector::normalize({0.0, 1.0});
    case Side::top: return UnitVector::normalize({0.0, -1.0});
  }
  return {};
}

struct GateSpec {
  Side side = Side::left;
  double a = 0.0;
  double b = 1.0;

  bool operator==(const GateSpec&) const = default;
};

struct Disc {
  Point center;
  double radius = 0.0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class A1Violation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class A2Violation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class A3Violation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class A4Violation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LocalConfiguration;
LocalConfiguration build_local_config(ConfigId id, std::vector<Disc> discs,
                                      std::vector<GateSpec> gates, bool blocking_claim);

/// One cell's scatterer set. Immutable once built.
class LocalConfiguration {
 public:
  ConfigId id() const { return id_; }
  bool blocking() const { return blocking_; }
  TableKind kind() const { return gates_.size() == 4 ? TableKind::gas : TableKind::tube; }

  std::span<const Disc> discs() const { return discs_; }
  std::span<const GateSpec> gates() const { return gates_; }
  std::span<const ArcPiece> arcs() const { return arcs_; }
  std::span<const WallSegment> walls() const { return walls_; }
  /// Non-smooth points of the scatterer boundary (arc/arc and arc/wall meetings).
  std::span<const Point> corners() const { return corners_; }

  const GateSpec* gate(Side s) const {
    for (const auto& g : gates_)
      if (g.side == s) return &g;
    return nullptr;
  }
  /// True when coordinate `c` along side `s` lies in the open gate shrunk by `tol`.
  bool in_gate(Side s, double c, double tol = 0.0) const {
    const GateSpec* g = gate(s);
    return g != nullptr && c > g->a + tol && c < g->b - tol;
  }
  /// Distance from coordinate `c` to the nearest endpoint of the gate on `s`.
  double gate_edge_distance(Side s, double c) const {
    const GateSpec* g = gate(s);
    if (g == nullptr) return std::numeric_limits<double>::infinity();
    return std::min(std::abs(c - g->a), std::abs(c - g->b));
  }
  double total_arc_length() const {
    double sum = 0.0;
    for (const auto& a : arcs_) sum += a.length();
    return sum;
  }

  /// A cell with gates but no discs. Only useful as a test rig: it is not an
  /// admissible scatterer configuration.
  static LocalConfiguration open_cell(ConfigId id, std::vector<GateSpec> gates) {
    LocalConfiguration c;
    c.id_ = id;
    c.gates_ = std::move(gates);
    c.compute_walls();
    return c;
  }

 private:
  // Walls: the cell boundary minus the gates.
  void compute_walls() {
    walls_.clear();
    for (Side s : {Side::left, Side::right, Side::bottom, Side::top}) {
      const GateSpec* g = gate(s);
      auto push = [&](double lo, double hi) {
        if (hi - lo > 1e-12) walls_.push_back({side_point(s, lo), side_point(s, hi)});
      };
      if (g == nullptr) {
        push(0.0, 1.0);
      } else {
        push(0.0, g->a);
        push(g->b, 1.0);
      }
    }
  }

  friend LocalConfiguration build_local_config(ConfigId, std::vector<Disc>,
                                               std::vector<GateSpec>, bool);
  ConfigId id_ = 0;
  bool blocking_ = false;
  std::vector<Disc> discs_;
  std::vector<GateSpec> gates_;
  std::vector<ArcPiece> arcs_;
  std::vector<WallSegment> walls_;
  std::vector<Point> corners_;
};

namespace detail {

inline bool strictly_inside_cell(Point p) {
  return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
}

/// Side of the unit square that `p` lies on (within kSnapTol), with the
/// coordinate along it. Vertices report the first matching side.
inline std::optional<std::pair<Side, double>> on_cell_side(Point p) {
  if (std::abs(p.x) <= kSnapTol) return std::pair{Side::left, p.y};
  if (std::abs(p.x - 1.0) <= kSnapTol) return std::pair{Side::right, p.y};
  if (std::abs(p.y) <= kSnapTol) return std::pair{Side::bottom, p.x};
  if (std::abs(p.y - 1.0) <= kSnapTol) return std::pair{Side::top, p.x};
  return std::nullopt;
}

/// Acute angle between the tangent of a circle at `p` and direction `line`.
inline double tangent_line_angle(Point center, Point p, Vec2 line) {
  const UnitVector n = UnitVector::normalize(p - center);
  const UnitVector l = UnitVector::normalize(line);
  // Tangent is perpendicular to n, so |sin(angle)| = |<n, l>|.
  return std::asin(std::min(1.0, std::abs(dot(n, l))));
}

inline Vec2 side_direction(Side s) {
  return (s == Side::left || s == Side::right) ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
}

inline void validate_gates(const std::vector<GateSpec>& gates) {
  for (const auto& g : gates) {
    if (!(g.a >= 0.0 && g.b <= 1.0 && g.a < g.b))
      throw ConfigError("gate interval must satisfy 0 <= a < b <= 1");
  }
  for (std::size_t i = 0; i < gates.size(); ++i)
    for (std::size_t j = i + 1; j < gates.size(); ++j)
      if (gates[i].side == gates[j].side) throw ConfigError("duplicate gate side");

  auto find = [&](Side s) -> const GateSpec* {
    for (const auto& g : gates)
      if (g.side == s) return &g;
    return nullptr;
  };
  const GateSpec* l = find(Side::left);
  const GateSpec* r = find(Side::right);
  const GateSpec* b = find(Side::bottom);
  const GateSpec* t = find(Side::top);
  if (l == nullptr || r == nullptr) throw ConfigError("left and right gates are required");
  if (l->a != r->a || l->b != r->b) throw ConfigError("left and right gates must be congruent");
  if (gates.size() == 2) return;
  if (gates.size() != 4 || b == nullptr || t == nullptr)
    throw ConfigError("a cell has either two (tube) or four (gas) gates");
  if (b->a != t->a || b->b != t->b) throw ConfigError("bottom and top gates must be congruent");
}

/// Angles on circle i where it crosses circle j (empty when they do not cross).
inline std::vector<double> circle_crossings(const Disc& ci, const Disc& cj) {
  const Vec2 dv = cj.center - ci.center;
  const double d = norm(dv);
  if (d <= 0.0) return {};
  if (d > ci.radius + cj.radius || d < std::abs(ci.radius - cj.radius)) return {};
  const double base = std::atan2(dv.y, dv.x);
  double c = (d * d + ci.radius * ci.radius - cj.radius * cj.radius) / (2.0 * d * ci.radius);
  c = std::clamp(c, -1.0, 1.0);
  const double alpha = std::acos(c);
  return {base - alpha, base + alpha};
}

/// Angles on the circle where it crosses the four lines bounding the cell.
inline std::vector<double> side_crossings(const Disc& c) {
  std::vector<double> out;
  const double r = c.radius;
  for (double line : {0.0, 1.0}) {
    const double cx = (line - c.center.x) / r;
    if (std::abs(cx) <= 1.0) {
      const double a = std::acos(cx);
      out.push_back(a);
      out.push_back(-a);
    }
    const double sy = (line - c.center.y) / r;
    if (std::abs(sy) <= 1.0) {
      const double a = std::asin(sy);
      out.push_back(a);
      out.push_back(kPi - a);
    }
  }
  return out;
}

}  // namespace detail

/// Builds one cell configuration, computing the clipped arc/wall decomposition
/// of the union of `discs` and checking A1-A4. The blocking flag is taken from
/// `blocking_claim`; check_blocking() verifies it separately.
inline LocalConfiguration build_local_config(ConfigId id, std::vector<Disc> discs,
                                             std::vector<GateSpec> gates, bool blocking_claim) {
  if (discs.empty()) throw ConfigError("a configuration needs at least one disc");
  detail::validate_gates(gates);
  for (const auto& d : discs) {
    if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y) || !std::isfinite(d.radius))
      throw ConfigError("non-finite disc parameters");
    if (d.radius < kMinRadius || d.radius > 1.0)
      throw A3Violation("disc radius " + std::to_string(d.radius) + " outside [r_min, 1]");
  }
  for (std::size_t i = 0; i < discs.size(); ++i)
    for (std::size_t j = i + 1; j < discs.size(); ++j)
      if (distance(discs[i].center, discs[j].center) < kSnapTol &&
          std::abs(discs[i].radius - discs[j].radius) < kSnapTol)
        throw A1Violation("two discs share a boundary circle");

  LocalConfiguration cfg;
  cfg.id_ = id;
  cfg.blocking_ = blocking_claim;
  cfg.discs_ = discs;
  cfg.gates_ = gates;

  // A2: no disc may cover any point of an open gate.
  for (const auto& g : gates) {
    for (const auto& d : discs) {
      const bool vertical = g.side == Side::left || g.side == Side::right;
      const double line = (g.side == Side::left || g.side == Side::bottom) ? 0.0 : 1.0;
      const double off = std::abs((vertical ? d.center.x : d.center.y) - line);
      const double along = vertical ? d.center.y : d.center.x;
      if (off > d.radius) continue;
      const double w = std::sqrt(std::max(0.0, d.radius * d.radius - off * off));
      if (along - w < g.b - 1e-12 && along + w > g.a + 1e-12)
        throw A2Violation("disc overlaps the " + std::string(to_string(g.side)) + " gate");
    }
  }

  // Arc decomposition of the union boundary, clipped to the cell.
  for (std::size_t i = 0; i < discs.size(); ++i) {
    const Disc& di = discs[i];
    std::vector<double> cuts = detail::side_crossings(di);
    for (std::size_t j = 0; j < discs.size(); ++j) {
      if (j == i) continue;
      auto c = detail::circle_crossings(di, discs[j]);
      cuts.insert(cuts.end(), c.begin(), c.end());
    }
    for (double& a : cuts) a = wrap_angle(a, 0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-14; }),
               cuts.end());

    auto keep = [&](double angle) {
      const Point p = di.center + di.radius * Vec2{std::cos(angle), std::sin(angle)};
      if (!detail::strictly_inside_cell(p)) return false;
      for (std::size_t j = 0; j < discs.size(); ++j)
        if (j != i && distance(p, discs[j].center) < discs[j].radius) return false;
      return true;
    };

    if (cuts.empty()) {
      if (keep(kPi)) cfg.arcs_.push_back({di.center, di.radius, 0.0, kTwoPi, int(i)});
      continue;
    }
    const std::size_t n = cuts.size();
    std::vector<bool> kept(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = cuts[k];
      const double hi = k + 1 < n ? cuts[k + 1] : cuts[0] + kTwoPi;
      kept[k] = hi - lo > 1e-14 && keep(0.5 * (lo + hi));
    }
    if (std::all_of(kept.begin(), kept.end(), [](bool b) { return b; })) {
      cfg.arcs_.push_back({di.center, di.radius, 0.0, kTwoPi, int(i)});
      continue;
    }
    // Start from a dropped interval so every kept run is contiguous.
    std::size_t start = 0;
    while (kept[start]) ++start;
    auto interval = [&](std::size_t e) {
      return (e + 1 < n ? cuts[e + 1] : cuts[0] + kTwoPi) - cuts[e];
    };
    for (std::size_t step = 1; step <= n;) {
      const std::size_t k = (start + step) % n;
      if (!kept[k]) {
        ++step;
        continue;
      }
      double span = 0.0;
      while (step <= n && kept[(start + step) % n]) span += interval((start + step++) % n);
      cfg.arcs_.push_back({di.center, di.radius, cuts[k], cuts[k] + span, int(i)});
    }
  }
  if (cfg.arcs_.empty()) throw ConfigError("no scatterer boundary inside the cell");

  // A4 for circles touching without crossing (meeting angle zero).
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      const Vec2 dv = discs[j].center - discs[i].center;
      const double d = norm(dv);
      if (std::abs(d - (discs[i].radius + discs[j].radius)) > kSnapTol) continue;
      const Point touch = discs[i].center + (discs[i].radius / d) * dv;
      bool covered = false;
      for (std::size_t k = 0; k < discs.size(); ++k)
        if (k != i && k != j && distance(touch, discs[k].center) < discs[k].radius) covered = true;
      if (!covered && touch.x >= 0.0 && touch.x <= 1.0 && touch.y >= 0.0 && touch.y <= 1.0)
        throw A4Violation("two discs touch tangentially inside the cell");
    }
  }

  // Classify arc endpoints: gate edges (smooth continuation into the
  // neighbouring cell), wall meetings and arc/arc meetings (corners).
  auto add_corner = [&](Point p) {
    for (const auto& c : cfg.corners_)
      if (distance(c, p) < kSnapTol) return;
    cfg.corners_.push_back(p);
  };
  for (const auto& arc : cfg.arcs_) {
    if (arc.full_circle()) continue;
    for (double theta : {arc.theta0, arc.theta1}) {
      const Point p = arc.point_at(theta);
      if (auto side = detail::on_cell_side(p)) {
        const auto [s, c] = *side;
        const double angle = detail::tangent_line_angle(arc.center, p, detail::side_direction(s));
        if (cfg.in_gate(s, c, kSnapTol))
          throw A2Violation("arc ends inside the " + std::string(to_string(s)) + " gate");
        if (angle < kMinMeetingAngle)
          throw A4Violation("arc meets the cell boundary at a vanishing angle");
        if (cfg.gate_edge_distance(s, c) > kSnapTol) add_corner(p);
        continue;
      }
      bool matched = false;
      for (std::size_t j = 0; j < discs.size(); ++j) {
        if (int(j) == arc.disc) continue;
        if (std::abs(distance(p, discs[j].center) - discs[j].radius) > 1e-8) continue;
        matched = true;
        const UnitVector ni = UnitVector::normalize(p - arc.center);
        const UnitVector nj = UnitVector::normalize(p - discs[j].center);
        const double angle = std::acos(std::min(1.0, std::abs(dot(ni, nj))));
        if (angle < kMinMeetingAngle) throw A4Violation("two arcs meet at a vanishing angle");
      }
      if (!matched) throw A1Violation("arc endpoint is not on another arc or the cell boundary");
      add_corner(p);
    }
  }

  cfg.compute_walls();
  return cfg;
}

struct Chord {
  Point from;
  Point to;

  double length() const { return distance(from, to); }
  UnitVector direction() const { return UnitVector::normalize(to - from); }
};

enum class BlockingKind { blocking, non_blocking, inconclusive };

inline std::string_view to_string(BlockingKind k) {
  switch (k) {
    case BlockingKind::blocking: return "blocking";
    case BlockingKind::non_blocking: return "non_blocking";
    case BlockingKind::inconclusive: return "inconclusive";
  }
  return "?";
}

struct BlockingVerdict {
  BlockingKind kind = BlockingKind::inconclusive;
  /// Largest chord clearance found. Negative values are the smallest
  /// penetration depth over all sampled gate-to-gate chords.
  double clearance = -std::numeric_limits<double>::infinity();
  std::optional<Chord> witness;
  std::int64_t chords = 0;
};

namespace detail {

/// Where a ray starting inside (or on) the unit square leaves it.
struct SquareExit {
  double t;
  Side side;
  double coord;
};

inline SquareExit exit_unit_square(Point p, UnitVector d) {
  SquareExit best{std::numeric_limits<double>::infinity(), Side::left, 0.0};
  auto consider = [&](double t, Side s) {
    if (t > 1e-15 && t < best.t) best = {t, s, 0.0};
  };
  if (d.x() > 0.0) consider((1.0 - p.x) / d.x(), Side::right);
  if (d.x() < 0.0) consider(-p.x / d.x(), Side::left);
  if (d.y() > 0.0) consider((1.0 - p.y) / d.y(), Side::top);
  if (d.y() < 0.0) consider(-p.y / d.y(), Side::bottom);
  const Point q = p + best.t * d.vec();
  best.coord = (best.side == Side::left || best.side == Side::right) ? q.y : q.x;
  return best;
}

/// Signed clearance of a chord: positive when it misses every disc (distance
/// to the nearest one), negative when it enters one (minus the depth).
inline double chord_clearance(const LocalConfiguration& cfg, Point a, Point b) {
  double score = std::numeric_limits<double>::infinity();
  for (const auto& d : cfg.discs())
    score = std::min(score, segment_point_distance(a, b, d.center) - d.radius);
  return score;
}

}  // namespace detail

/// Samples directed chords entering through every gate: entry points at
/// a + (b-a)k/n_offsets (k = 0..n_offsets) and directions at
/// -π/2 + πm/n_angles (m = 1..n_angles-1) from the inward normal. Only chords
/// leaving through another (closed) gate are scored.
inline BlockingVerdict check_blocking(const LocalConfiguration& cfg, int n_angles, int n_offsets,
                                      double eps_clear = kClearanceTol) {
  if (n_angles < 2 || n_offsets < 1)
    throw std::invalid_argument("check_blocking: need n_angles >= 2 and n_offsets >= 1");
  BlockingVerdict v;
  for (const auto& g : cfg.gates()) {
    const UnitVector inward = side_inward_normal(g.side);
    for (int k = 0; k <= n_offsets; ++k) {
      const double c = g.a + (g.b - g.a) * double(k) / n_offsets;
      const Point p = side_point(g.side, c);
      for (int m = 1; m < n_angles; ++m) {
        const UnitVector d = inward.rotated(-kPi / 2 + kPi * double(m) / n_angles);
        const auto exit = detail::exit_unit_square(p, d);
        const GateSpec* out = cfg.gate(exit.side);
        if (out == nullptr || exit.coord < out->a - 1e-12 || exit.coord > out->b + 1e-12) continue;
        const Point q = p + exit.t * d.vec();
        ++v.chords;
        const double score = detail::chord_clearance(cfg, p, q);
        if (score > v.clearance) {
          v.clearance = score;
          v.witness = Chord{p, q};
        }
      }
    }
  }
  if (v.clearance > eps_clear) {
    v.kind = BlockingKind::non_blocking;
  } else if (v.clearance >= -eps_clear) {
    v.kind = BlockingKind::inconclusive;
  } else {
    v.kind = BlockingKind::blocking;
    v.witness.reset();
  }
  return v;
}

struct ShadowingVerdict {
  bool shadowed = true;
  std::optional<Point> wall_point;
  std::optional<Chord> chord;
};

/// Checks by ray sampling that no straight path from a gate, or leaving an arc
/// after a collision, reaches a WallSegment before an arc.
inline ShadowingVerdict check_shadowing(const LocalConfiguration& cfg, int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("check_shadowing: n_samples must be positive");
  ShadowingVerdict verdict;
  if (cfg.walls().empty()) return verdict;

  auto probe = [&](Point p, UnitVector d, double t_min) {
    const auto exit = detail::exit_unit_square(p, d);
    if (cfg.in_gate(exit.side, exit.coord, kSnapTol)) return false;
    double t_arc = std::numeric_limits<double>::infinity();
    for (const auto& arc : cfg.arcs())
      if (auto hit = ray_arc_intersection(p, d, arc, t_min)) t_arc = std::min(t_arc, hit->t);
    if (exit.t < t_arc - kSnapTol) {
      verdict.shadowed = false;
      verdict.wall_point = p + exit.t * d.vec();
      verdict.chord = Chord{p, *verdict.wall_point};
      return true;
    }
    return false;
  };

  for (const auto& g : cfg.gates()) {
    const UnitVector inward = side_inward_normal(g.side);
    for (int k = 0; k < n_samples; ++k) {
      const Point p = side_point(g.side, g.a + (g.b - g.a) * (k + 0.5) / n_samples);
      for (int m = 0; m < n_samples; ++m)
        if (probe(p, inward.rotated(-kPi / 2 + kPi * (m + 0.5) / n_samples), kMinFlight))
          return verdict;
    }
  }
  for (const auto& arc : cfg.arcs()) {
    for (int k = 0; k < n_samples; ++k) {
      const double theta = arc.theta0 + arc.span() * (k + 0.5) / n_samples;
      const Point p = arc.point_at(theta);
      const UnitVector n = UnitVector::from_angle(theta);
      for (int m = 0; m < n_samples; ++m)
        if (probe(p, n.rotated(-kPi / 2 + kPi * (m + 0.5) / n_samples), 1e-9)) return verdict;
    }
  }
  return verdict;
}

/// Ordered configuration set Ω: ids 1..m' are blocking, m'+1..m are not.
class Catalog {
 public:
  explicit Catalog(std::vector<LocalConfiguration> cells) : cells_(std::move(cells)) {
    if (cells_.size() < 2) throw ConfigError("a catalog needs at least two configurations");
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].id() != ConfigId(i + 1)) throw ConfigError("catalog ids must be 1..m in order");
    while (blocking_count_ < cells_.size() && cells_[blocking_count_].blocking()) ++blocking_count_;
    for (std::size_t i = blocking_count_; i < cells_.size(); ++i)
      if (cells_[i].blocking()) throw ConfigError("blocking configurations must precede non-blocking ones");
    if (blocking_count_ < 1 || blocking_count_ >= cells_.size())
      throw ConfigError("a catalog needs 1 <= m' < m");
    const auto g0 = cells_.front().gates();
    for (const auto& c : cells_) {
      const auto g = c.gates();
      if (!std::equal(g.begin(), g.end(), g0.begin(), g0.end()))
        throw ConfigError("all configurations of a catalog must share the same gates");
    }
  }

  int size() const { return int(cells_.size()); }
  int blocking_count() const { return int(blocking_count_); }
  bool blocking(ConfigId id) const { return id >= 1 && id <= int(blocking_count_); }
  TableKind kind() const { return cells_.front().kind(); }
  const LocalConfiguration& at(ConfigId id) const {
    if (id < 1 || id > size()) throw std::out_of_range("configuration id out of range");
    return cells_[std::size_t(id - 1)];
  }
  std::span<const LocalConfiguration> cells() const { return cells_; }

 private:
  std::vector<LocalConfiguration> cells_;
  std::size_t blocking_count_ = 0;
};

/// Canonical cell geometry shared by the shipped catalogs. Corner discs of
/// radius 0.45 leave gates (0.45, 0.55); tube cells add wall discs of radius
/// 0.1 so the top and bottom walls are out of reach; blocking cells add a
/// centre disc of radius 0.2.
namespace canonical {

inline constexpr double kCornerRadius = 0.45;
inline constexpr double kWallDiscRadius = 0.1;
inline constexpr double kCentreRadius = 0.2;

inline std::vector<Disc> corner_discs() {
  return {{{0, 0}, kCornerRadius}, {{1, 0}, kCornerRadius},
          {{0, 1}, kCornerRadius}, {{1, 1}, kCornerRadius}};
}

inline std::vector<GateSpec> tube_gates() {
  return {{Side::left, kCornerRadius, 1 - kCornerRadius},
          {Side::right, kCornerRadius, 1 - kCornerRadius}};
}

inline std::vector<GateSpec> gas_gates() {
  return {{Side::left, kCornerRadius, 1 - kCornerRadius},
          {Side::right, kCornerRadius, 1 - kCornerRadius},
          {Side::bottom, kCornerRadius, 1 - kCornerRadius},
          {Side::top, kCornerRadius, 1 - kCornerRadius}};
}

inline std::vector<Disc> tube_discs(bool with_centre) {
  auto d = corner_discs();
  d.push_back({{0.5, 0.0}, kWallDiscRadius});
  d.push_back({{0.5, 1.0}, kWallDiscRadius});
  if (with_centre) d.push_back({{0.5, 0.5}, kCentreRadius});
  return d;
}

inline std::vector<Disc> gas_discs(bool with_centre) {
  auto d = corner_discs();
  if (with_centre) d.push_back({{0.5, 0.5}, kCentreRadius});
  return d;
}

}  // namespace canonical

/// Tube catalog: 1 = blocking (centre disc), 2 = non-blocking straight corridor.
inline std::shared_ptr<const Catalog> canonical_tube_catalog() {
  std::vector<LocalConfiguration> cells;
  cells.push_back(build_local_config(1, canonical::tube_discs(true), canonical::tube_gates(), true));
  cells.push_back(build_local_config(2, canonical::tube_discs(false), canonical::tube_gates(), false));
  return std::make_shared<const Catalog>(std::move(cells));
}

/// Gas catalog: 1 = blocking (centre disc), 2 = non-blocking with horizontal
/// and vertical corridors.
inline std::shared_ptr<const Catalog> canonical_gas_catalog() {
  std::vector<LocalConfiguration> cells;
  cells.push_back(build_local_config(1, canonical::gas_discs(true), canonical::gas_gates(), true));
  cells.push_back(build_local_config(2, canonical::gas_discs(false), canonical::gas_gates(), false));
  return std::make_shared<const Catalog>(std::move(cells));
}

}  // namespace lorentz
