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

// Planar primitives for dispersing billiards: points, unit vectors, circular
// arcs, flat wall segments, exact ray/arc intersection and specular
// reflection. Everything here is a pure function of its arguments.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace lorentz {

/// Distance (cell units) below which a ray is considered to graze a circle.
inline constexpr double kTangencyTol = 1e-9;
/// Minimum flight length; keeps the departing contact from being re-detected.
inline constexpr double kMinFlight = 1e-12;
/// Slack applied to arc angular intervals so that pieces of one circle split
/// across cells leave no numerical gap at their shared endpoint.
inline constexpr double kAngleSlack = 1e-12;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

using Point = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of a x b; positive when b is counter-clockwise from a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// A direction of length one. Construction always normalizes, so the
/// |‖v‖ - 1| <= 1e-12 invariant holds for every instance.
class UnitVector {
 public:
  constexpr UnitVector() = default;

  static UnitVector normalize(Vec2 v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("UnitVector::normalize: zero or non-finite vector");
    }
    return UnitVector(v.x / n, v.y / n);
  }
  static UnitVector from_angle(double angle) {
    return UnitVector(std::cos(angle), std::sin(angle));
  }

  constexpr double x() const { return v_.x; }
  constexpr double y() const { return v_.y; }
  constexpr Vec2 vec() const { return v_; }
  constexpr operator Vec2() const { return v_; }  // NOLINT(google-explicit-constructor)
  constexpr UnitVector operator-() const { return UnitVector(-v_.x, -v_.y); }

  /// Counter-clockwise rotation by `angle` radians.
  UnitVector rotated(double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return normalize({c * v_.x - s * v_.y, s * v_.x + c * v_.y});
  }
  double angle() const { return std::atan2(v_.y, v_.x); }

 private:
  constexpr UnitVector(double x, double y) : v_{x, y} {}
  Vec2 v_{1.0, 0.0};
};

/// Maps an angle into [base, base + 2π).
inline double wrap_angle(double angle, double base) {
  double a = std::fmod(angle - base, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return base + a;
}

/// A piece of a circle bounding a dispersing scatterer. The angular interval
/// [theta0, theta1) is measured counter-clockwise around `center`, with
/// 0 < theta1 - theta0 <= 2π. `disc` names the generating disc inside the
/// owning configuration.
struct ArcPiece {
  Point center;
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = kTwoPi;
  int disc = 0;

  double span() const { return theta1 - theta0; }
  double length() const { return radius * span(); }
  bool full_circle() const { return span() >= kTwoPi - 1e-15; }

  bool contains_angle(double angle, double slack = kAngleSlack) const {
    if (full_circle()) return true;
    const double a = wrap_angle(angle, theta0 - slack);
    return a <= theta1 + slack;
  }
  Point point_at(double angle) const {
    return center + radius * Vec2{std::cos(angle), std::sin(angle)};
  }
  /// Outward normal of the disc, which is the inward normal of the billiard
  /// domain at `p`.
  UnitVector normal_at(Point p) const { return UnitVector::normalize(p - center); }

  ArcPiece translated(Vec2 offset) const {
    ArcPiece a = *this;
    a.center += offset;
    return a;
  }
};

/// A flat piece of the cell boundary belonging to the scatterer. Valid
/// configurations keep these out of reach of every trajectory.
struct WallSegment {
  Point a;
  Point b;

  double length() const { return distance(a, b); }
};

struct ArcHit {
  double t = 0.0;
  Point point;
  UnitVector inward_normal;
  bool tangential = false;
};

/// First point of `arc` met by the ray origin + t·dir with t > t_min.
///
/// The ray is tested against the full circle and both roots are considered in
/// increasing order, so a ray starting inside the disc reports the exit point.
/// A ray whose line passes within kTangencyTol of the circle is reported as a
/// tangential hit at the foot of the perpendicular from the centre.
inline std::optional<ArcHit> ray_arc_intersection(Point origin, UnitVector dir,
                                                  const ArcPiece& arc,
                                                  double t_min = kMinFlight) {
  const Vec2 oc = arc.center - origin;
  const double foot = dot(oc, dir);
  const double h = std::abs(cross(dir, oc));
  const double r = arc.radius;
  if (h > r + kTangencyTol) return std::nullopt;

  auto accept = [&](double t, bool tangential) -> std::optional<ArcHit> {
    if (!(t > t_min)) return std::nullopt;
    const Point p = origin + t * dir.vec();
    const Vec2 radial = p - arc.center;
    if (!arc.contains_angle(std::atan2(radial.y, radial.x))) return std::nullopt;
    return ArcHit{t, p, UnitVector::normalize(radial), tangential};
  };

  if (h >= r) return accept(foot, true);
  const double half_chord = std::sqrt((r - h) * (r + h));
  const bool tangential = (r - h) <= kTangencyTol;
  if (auto hit = accept(foot - half_chord, tangential)) return hit;
  return accept(foot + half_chord, tangential);
}

/// True when `v` meets a boundary with normal `n` at grazing incidence.
inline bool grazing(UnitVector v, UnitVector n) {
  return std::abs(dot(v, n)) <= kTangencyTol;
}

/// Specular reflection v - 2<v,n>n. Returns nullopt for grazing incidence,
/// which callers treat as a singular collision.
inline std::optional<UnitVector> reflect(UnitVector v, UnitVector n) {
  if (grazing(v, n)) return std::nullopt;
  const double vn = dot(v, n);
  return UnitVector::normalize(v.vec() - 2.0 * vn * n.vec());
}

/// Parameter t >= t_min at which the ray crosses the closed segment, if any.
inline std::optional<double> ray_segment_intersection(Point origin, UnitVector dir,
                                                      const WallSegment& seg,
                                                      double t_min = kMinFlight) {
  const Vec2 e = seg.b - seg.a;
  const double denom = cross(dir, e);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 w = seg.a - origin;
  const double t = cross(w, e) / denom;
  const double s = cross(w, dir) / denom;
  if (t < t_min || s < -1e-12 || s > 1.0 + 1e-12) return std::nullopt;
  return t;
}

/// Distance from point p to the closed segment [a, b].
inline double segment_point_distance(Point a, Point b, Point p) {
  const Vec2 e = b - a;
  const double len2 = dot(e, e);
  double s = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return distance(a + s * e, p);
}

}  // namespace lorentz
