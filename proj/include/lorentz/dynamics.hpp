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

// The billiard map on a World: free flight across cells, specular reflection,
// time reversal and the tangent cocycle.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lorentz/geometry.hpp"
#include "lorentz/world.hpp"

namespace lorentz {

/// Post-collision state. `q` is relative to the lower-left corner of `cell`.
struct LineElement {
  CellIndex cell;
  int arc = 0;
  Point q;
  UnitVector v;

  Point position() const { return cell_offset(cell) + q; }
};

enum class SingularKind { none, tangential, corner, gate_graze };

inline std::string_view to_string(SingularKind s) {
  switch (s) {
    case SingularKind::none: return "none";
    case SingularKind::tangential: return "tangential";
    case SingularKind::corner: return "corner";
    case SingularKind::gate_graze: return "gate_graze";
  }
  return "?";
}

struct CollisionEvent {
  LineElement from;
  LineElement to;
  double tau = 0.0;
  std::int64_t cells_traversed = 0;
  SingularKind singular = SingularKind::none;
  double curvature_from = 0.0;
  double curvature_to = 0.0;
  double cos_from = 1.0;  // <n_q, v> at departure
  double cos_to = 1.0;    // <n_q', v'> after the reflection
};

struct Guards {
  std::int64_t max_cells = 10'000;
  double max_length = 1e4;
};

enum class FlightStatus { ok, wall_hit, guard_exceeded, singular };

inline std::string_view to_string(FlightStatus s) {
  switch (s) {
    case FlightStatus::ok: return "ok";
    case FlightStatus::wall_hit: return "wall_hit";
    case FlightStatus::guard_exceeded: return "guard_exceeded";
    case FlightStatus::singular: return "singular";
  }
  return "?";
}

/// Outcome of one free flight. `event` is fully populated only for ok and
/// singular; for wall_hit and guard_exceeded `stop_cell` names the last cell.
struct FlightResult {
  FlightStatus status = FlightStatus::ok;
  CollisionEvent event;
  CellIndex stop_cell;
  double stop_length = 0.0;

  bool ok() const { return status == FlightStatus::ok; }
};

class WallHit : public std::runtime_error {
 public:
  WallHit(CellIndex c, const std::string& what) : std::runtime_error(what), cell(c) {}
  CellIndex cell;
};
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SingularCollision : public std::runtime_error {
 public:
  SingularCollision(SingularKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  SingularKind kind;
};
class NearTangency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incremental enumeration of the lattice cells met by a ray, in the frame of
/// the starting cell. `cell` is relative to the start.
class GridWalker {
 public:
  GridWalker(Point origin, UnitVector dir) : dir_(dir) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    step_x_ = dir.x() > 0 ? 1 : (dir.x() < 0 ? -1 : 0);
    step_y_ = dir.y() > 0 ? 1 : (dir.y() < 0 ? -1 : 0);
    t_max_x_ = step_x_ > 0 ? (1.0 - origin.x) / dir.x() : step_x_ < 0 ? -origin.x / dir.x() : inf;
    t_max_y_ = step_y_ > 0 ? (1.0 - origin.y) / dir.y() : step_y_ < 0 ? -origin.y / dir.y() : inf;
    t_delta_x_ = step_x_ != 0 ? 1.0 / std::abs(dir.x()) : inf;
    t_delta_y_ = step_y_ != 0 ? 1.0 / std::abs(dir.y()) : inf;
  }

  CellIndex cell() const { return cell_; }
  double t_exit() const { return std::min(t_max_x_, t_max_y_); }
  /// Side of the current cell through which the ray leaves it.
  Side exit_side() const {
    if (t_max_x_ <= t_max_y_) return step_x_ > 0 ? Side::right : Side::left;
    return step_y_ > 0 ? Side::top : Side::bottom;
  }
  /// True when the exit is (numerically) through a lattice vertex.
  bool exit_at_vertex(double tol) const {
    if (step_x_ == 0 || step_y_ == 0) return false;
    // distance from the exit point to the vertex, measured along the side
    const double gap = std::abs(t_max_x_ - t_max_y_);
    return gap * (t_max_x_ <= t_max_y_ ? std::abs(dir_.y()) : std::abs(dir_.x())) <= tol;
  }
  void advance() {
    if (t_max_x_ <= t_max_y_) {
      cell_.x += step_x_;
      t_max_x_ += t_delta_x_;
    } else {
      cell_.y += step_y_;
      t_max_y_ += t_delta_y_;
    }
  }

 private:
  UnitVector dir_;
  CellIndex cell_{0, 0};
  int step_x_ = 0;
  int step_y_ = 0;
  double t_max_x_, t_max_y_, t_delta_x_, t_delta_y_;
};

/// Coordinate along side `s` of the point p (cell frame).
inline double side_coordinate(Side s, Point p) {
  return (s == Side::left || s == Side::right) ? p.y : p.x;
}

/// One application of the billiard map, reported as a value.
inline FlightResult next_collision(const World& world, const LineElement& x,
                                   const Guards& guards = {}) {
  FlightResult res;
  GridWalker walk(x.q, x.v);
  struct Best {
    double t = std::numeric_limits<double>::infinity();
    ArcHit hit;
    CellIndex rel;
    int arc = -1;
    const LocalConfiguration* cfg = nullptr;
  } best;

  std::int64_t cells = 0;
  for (;;) {
    ++cells;
    const CellIndex rel = walk.cell();
    const CellIndex abs_cell = x.cell + rel;
    const LocalConfiguration& cfg = world.config_at(abs_cell);
    const Point o = x.q - cell_offset(rel);
    const auto arcs = cfg.arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (auto hit = ray_arc_intersection(o, x.v, arcs[i], kMinFlight); hit && hit->t < best.t) {
        best.t = hit->t;
        best.hit = *hit;
        best.rel = rel;
        best.arc = int(i);
        best.cfg = &cfg;
      }
    }
    const double t_exit = walk.t_exit();
    if (best.arc >= 0 && best.t <= t_exit) break;

    if (cells >= guards.max_cells || t_exit > guards.max_length) {
      res.status = FlightStatus::guard_exceeded;
      res.stop_cell = abs_cell;
      res.stop_length = t_exit;
      return res;
    }
    const Side side = walk.exit_side();
    const double c = side_coordinate(side, o + t_exit * x.v.vec());
    if (walk.exit_at_vertex(kTangencyTol) || cfg.gate_edge_distance(side, c) <= kTangencyTol) {
      res.status = FlightStatus::singular;
      res.event.from = x;
      res.event.singular = SingularKind::gate_graze;
      res.event.tau = t_exit;
      res.event.cells_traversed = cells;
      res.stop_cell = abs_cell;
      res.stop_length = t_exit;
      return res;
    }
    if (!cfg.in_gate(side, c)) {
      res.status = FlightStatus::wall_hit;
      res.stop_cell = abs_cell;
      res.stop_length = t_exit;
      return res;
    }
    walk.advance();
  }

  CollisionEvent& ev = res.event;
  ev.from = x;
  ev.tau = best.t;
  ev.cells_traversed = cells;
  const ArcPiece& arc = best.cfg->arcs()[std::size_t(best.arc)];
  const UnitVector n = best.hit.inward_normal;
  ev.to.cell = x.cell + best.rel;
  ev.to.arc = best.arc;
  ev.to.q = best.hit.point;
  ev.to.v = x.v;
  ev.curvature_to = 1.0 / arc.radius;
  {
    const LocalConfiguration& c0 = world.config_at(x.cell);
    const auto a0 = c0.arcs();
    if (x.arc >= 0 && std::size_t(x.arc) < a0.size()) {
      const ArcPiece& from_arc = a0[std::size_t(x.arc)];
      ev.curvature_from = 1.0 / from_arc.radius;
      ev.cos_from = dot(from_arc.normal_at(x.q), x.v);
    }
  }
  res.stop_cell = ev.to.cell;
  res.stop_length = best.t;

  SingularKind sk = best.hit.tangential ? SingularKind::tangential : SingularKind::none;
  if (sk == SingularKind::none) {
    for (const Point& corner : best.cfg->corners())
      if (distance(corner, best.hit.point) <= kTangencyTol) sk = SingularKind::corner;
  }
  const auto reflected = reflect(x.v, n);
  if (!reflected) sk = SingularKind::tangential;
  if (sk != SingularKind::none) {
    ev.singular = sk;
    res.status = FlightStatus::singular;
    return res;
  }
  ev.to.v = *reflected;
  ev.cos_to = dot(n, ev.to.v);
  return res;
}

/// Visits the cells crossed by the flight of `e`, in order, starting with the
/// departure cell. Stops early when `fn` returns false.
template <class F>
void for_each_flight_cell(const CollisionEvent& e, F&& fn) {
  GridWalker walk(e.from.q, e.from.v);
  for (std::int64_t i = 0; i < e.cells_traversed; ++i) {
    if (!fn(e.from.cell + walk.cell())) return;
    walk.advance();
  }
}

/// Throwing form of next_collision.
inline CollisionEvent next_event(const World& world, const LineElement& x,
                                 const Guards& guards = {}) {
  FlightResult r = next_collision(world, x, guards);
  switch (r.status) {
    case FlightStatus::ok: return r.event;
    case FlightStatus::wall_hit:
      throw WallHit(r.stop_cell, "flat wall reached in cell (" + std::to_string(r.stop_cell.x) +
                                     ", " + std::to_string(r.stop_cell.y) + ")");
    case FlightStatus::guard_exceeded:
      throw GuardExceeded("free flight exceeded the guards (" + std::to_string(r.stop_length) +
                          " cell units)");
    case FlightStatus::singular:
      throw SingularCollision(r.event.singular,
                              "singular collision: " + std::string(to_string(r.event.singular)));
  }
  return r.event;
}

inline LineElement billiard_map(const World& world, const LineElement& x, const Guards& guards = {}) {
  return next_event(world, x, guards).to;
}

struct OrbitSummary {
  std::int64_t steps = 0;
  FlightStatus status = FlightStatus::ok;
  SingularKind singular = SingularKind::none;
  LineElement last;
};

/// Iterates T up to `n` times, handing each event to `on_event`. A false
/// return from the callback stops the orbit early with status ok.
template <class F>
OrbitSummary run_orbit(const World& world, LineElement x, std::int64_t n, F&& on_event,
                       const Guards& guards = {}) {
  OrbitSummary s;
  s.last = x;
  for (std::int64_t t = 0; t < n; ++t) {
    FlightResult r = next_collision(world, s.last, guards);
    if (!r.ok()) {
      s.status = r.status;
      s.singular = r.event.singular;
      return s;
    }
    s.last = r.event.to;
    ++s.steps;
    if (!on_event(static_cast<const CollisionEvent&>(r.event))) return s;
  }
  return s;
}

inline std::vector<CollisionEvent> iterate_orbit(const World& world, const LineElement& x,
                                                 std::int64_t n, const Guards& guards = {}) {
  std::vector<CollisionEvent> out;
  out.reserve(std::size_t(std::max<std::int64_t>(n, 0)));
  run_orbit(world, x, n, [&](const CollisionEvent& e) {
    out.push_back(e);
    return true;
  }, guards);
  return out;
}

/// Outward normal of the domain at x.q, i.e. the disc normal.
inline UnitVector normal_at(const World& world, const LineElement& x) {
  return world.config_at(x.cell).arcs()[std::size_t(x.arc)].normal_at(x.q);
}

/// Time reversal ι(q, v) = (q, reflect(-v, n_q)).
inline LineElement reverse(const World& world, const LineElement& x) {
  const auto v = reflect(-x.v, normal_at(world, x));
  if (!v) throw SingularCollision(SingularKind::tangential, "reverse: tangential line element");
  LineElement y = x;
  y.v = *v;
  return y;
}

using Mat2 = std::array<double, 4>;  // row-major

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline double det(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }

/// Differential of T in (r, φ) coordinates: r is arclength measured
/// counter-clockwise around the scatterer, φ the signed angle from n to v
/// (counter-clockwise positive).
inline Mat2 tangent_factor(double tau, double k0, double k1, double cos0, double cos1) {
  if (!(cos1 > kTangencyTol)) throw NearTangency("tangent_factor: arrival is tangential");
  const double s = -1.0 / cos1;
  return {s * (tau * k0 + cos0), s * tau,
          s * (tau * k0 * k1 + k0 * cos1 + k1 * cos0), s * (tau * k1 + cos1)};
}

inline Mat2 tangent_factor(const CollisionEvent& e) {
  return tangent_factor(e.tau, e.curvature_from, e.curvature_to, e.cos_from, e.cos_to);
}

struct CocycleState {
  Mat2 m{1.0, 0.0, 0.0, 1.0};
  double log_norm = 0.0;
  std::int64_t steps = 0;
};

/// Left-multiplies by the step factor and renormalizes to unit Frobenius norm.
inline CocycleState tangent_step(const CollisionEvent& e, CocycleState s) {
  if (e.singular != SingularKind::none) throw NearTangency("tangent_step: singular event");
  s.m = mat_mul(tangent_factor(e), s.m);
  const double n = std::hypot(std::hypot(s.m[0], s.m[1]), std::hypot(s.m[2], s.m[3]));
  for (double& v : s.m) v /= n;
  s.log_norm += std::log(n);
  ++s.steps;
  return s;
}

/// Phase coordinates (r, φ) of a line element; used by finite-difference
/// checks of tangent_factor.
struct PhaseCoords {
  double r = 0.0;
  double phi = 0.0;
};

inline PhaseCoords phase_coords(const World& world, const LineElement& x) {
  const ArcPiece& arc = world.config_at(x.cell).arcs()[std::size_t(x.arc)];
  const Vec2 radial = x.q - arc.center;
  const double theta = wrap_angle(std::atan2(radial.y, radial.x), arc.theta0);
  const UnitVector n = arc.normal_at(x.q);
  return {arc.radius * (theta - arc.theta0), std::atan2(cross(n, x.v), dot(n, x.v))};
}

/// Inverse of phase_coords on the arc of x.
inline LineElement from_phase_coords(const World& world, const LineElement& x, PhaseCoords c) {
  const ArcPiece& arc = world.config_at(x.cell).arcs()[std::size_t(x.arc)];
  const double theta = arc.theta0 + c.r / arc.radius;
  LineElement y = x;
  y.q = arc.point_at(theta);
  y.v = UnitVector::from_angle(theta).rotated(c.phi);
  return y;
}

}  // namespace lorentz
