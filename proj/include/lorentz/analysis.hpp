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

// Estimators built on the billiard map: invariant-measure sampling, escape
// and return statistics, Lyapunov exponents, free-flight sweeps and
// singularity counting.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "lorentz/dynamics.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/stats.hpp"
#include "lorentz/world.hpp"

namespace lorentz {

class EmptyBoundary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class InsufficientOrbits : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// invariant measure

/// Arcs of a set of cells, weighted by length, for drawing from μ.
class BoundarySampler {
 public:
  BoundarySampler(const World& world, const std::vector<CellIndex>& cells) {
    double total = 0.0;
    for (const CellIndex c : cells) {
      const auto arcs = world.config_at(c).arcs();
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        total += arcs[a].length();
        entries_.push_back({c, int(a), &arcs[a], total});
      }
    }
    if (!(total > 0.0)) throw EmptyBoundary("sample_mu: boundary set has zero arc length");
  }

  double total_length() const { return entries_.back().cumulative; }

  /// Position uniform in arclength, φ with density cos φ / 2.
  LineElement draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * total_length();
    auto it = std::upper_bound(entries_.begin(), entries_.end(), u,
                               [](double x, const Entry& e) { return x < e.cumulative; });
    if (it == entries_.end()) --it;
    const ArcPiece& arc = *it->arc;
    const double theta = arc.theta0 + arc.span() * uniform01(rng);
    const double phi = std::asin(2.0 * uniform01(rng) - 1.0);
    LineElement x;
    x.cell = it->cell;
    x.arc = it->index;
    x.q = arc.point_at(theta);
    x.v = UnitVector::from_angle(theta).rotated(phi);
    return x;
  }

 private:
  struct Entry {
    CellIndex cell;
    int index;
    const ArcPiece* arc;
    double cumulative;
  };
  std::vector<Entry> entries_;
};

struct MuSample {
  std::vector<LineElement> elements;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
};

inline MuSample sample_mu(const World& world, const std::vector<CellIndex>& cells, std::int64_t n,
                          std::uint64_t seed) {
  BoundarySampler sampler(world, cells);
  MuSample s;
  s.seed = seed;
  s.n = n;
  s.elements.reserve(std::size_t(std::max<std::int64_t>(n, 0)));
  for (std::int64_t i = 0; i < n; ++i) {
    auto rng = substream(seed, std::uint64_t(i));
    s.elements.push_back(sampler.draw(rng));
  }
  return s;
}

/// Signed incidence angle φ of a post-collision element.
inline double incidence_angle(const World& world, const LineElement& x) {
  const UnitVector n = normal_at(world, x);
  return std::atan2(cross(n, x.v), dot(n, x.v));
}

/// Cells at distance exactly r from `center` (‖·‖₁ for gases).
inline std::vector<CellIndex> ring_cells(TableKind kind, CellIndex center, std::int64_t r) {
  std::vector<CellIndex> out;
  if (kind == TableKind::tube) {
    out.push_back({center.x - r, 0});
    if (r > 0) out.push_back({center.x + r, 0});
    return out;
  }
  for (CellIndex n : rhombus(r)) out.push_back(center + n);
  return out;
}

inline std::int64_t cell_distance(TableKind kind, CellIndex a, CellIndex b) {
  if (kind == TableKind::tube) return a.x > b.x ? a.x - b.x : b.x - a.x;
  return l1_norm(a - b);
}

// ---------------------------------------------------------------------------
// escape

struct EscapeOptions {
  std::int64_t n = 100'000;
  std::uint64_t seed = 1;
  Guards guards;
  std::int64_t max_steps = 1'000'000;  // unresolved orbits count as escapes
  int workers = 1;
};

struct EscapeEstimate {
  double p_hat = 1.0;
  double se = 0.0;
  std::int64_t n = 0;
  std::int64_t escapes = 0;
  std::int64_t conservative = 0;  // guard, singular or unresolved terminations
  std::int64_t rho1 = 0;
  std::int64_t rho2 = 0;
  CellIndex center;
};

/// Fraction of μ-distributed elements on the ring ‖n - center‖ = ρ₁ whose
/// trajectory reaches a cell with ‖n - center‖ >= ρ₂ before coming back to
/// the ball ‖n - center‖ <= ρ₁.
inline EscapeEstimate escape_measure(const World& world, std::int64_t rho1, std::int64_t rho2,
                                     CellIndex center, const EscapeOptions& opt) {
  if (rho1 < 0 || opt.n < 1) throw std::invalid_argument("escape_measure: need rho1 >= 0 and N >= 1");
  EscapeEstimate est;
  est.rho1 = rho1;
  est.rho2 = rho2;
  est.center = center;
  est.n = opt.n;
  if (rho2 <= rho1) {
    est.p_hat = 1.0;
    est.escapes = opt.n;
    return est;
  }
  const TableKind kind = world.kind();
  BoundarySampler sampler(world, ring_cells(kind, center, rho1));

  enum Outcome : unsigned char { returned, escaped, conservative };
  std::vector<unsigned char> outcome(std::size_t(opt.n), returned);
  parallel_for(opt.n, opt.workers, [&](std::int64_t i) {
    auto rng = substream(opt.seed, std::uint64_t(i));
    LineElement x = sampler.draw(rng);
    bool outside = false;
    Outcome result = conservative;
    std::int64_t step = 0;
    for (; step < opt.max_steps; ++step) {
      FlightResult r = next_collision(world, x, opt.guards);
      if (!r.ok()) break;
      std::optional<Outcome> decided;
      bool first = true;
      for_each_flight_cell(r.event, [&](CellIndex c) {
        if (first) {
          first = false;
          return true;
        }
        const std::int64_t d = cell_distance(kind, c, center);
        if (d >= rho2) {
          decided = escaped;
        } else if (d <= rho1) {
          if (outside) decided = returned;
        } else {
          outside = true;
        }
        return !decided;
      });
      if (!decided && cell_distance(kind, r.event.to.cell, center) <= rho1) decided = returned;
      if (decided) {
        result = *decided;
        break;
      }
      x = r.event.to;
    }
    outcome[std::size_t(i)] = result;
  });
  for (unsigned char o : outcome) {
    if (o == escaped) ++est.escapes;
    if (o == conservative) ++est.conservative;
  }
  est.p_hat = double(est.escapes + est.conservative) / double(opt.n);
  est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(opt.n));
  return est;
}

// ---------------------------------------------------------------------------
// recurrence

struct RecurrenceOptions {
  std::int64_t n = 1000;
  std::int64_t t_max = 1000;
  std::uint64_t seed = 1;
  Guards guards;
  int workers = 1;
  const GapProfile* profile = nullptr;  // enables the confinement check (tubes)
};

struct RecurrenceStats {
  std::vector<double> r;  // r[t], t = 0..t_max
  std::int64_t confinement_violations = 0;
  std::int64_t terminated = 0;  // orbits stopped early by guards or singularities
  std::int64_t n = 0;
};

/// Return curve r(t): fraction of μ-distributed orbits from `start` whose
/// collision cell is back in `start` at some time 1 <= s <= t.
inline RecurrenceStats recurrence_stats(const World& world, const std::vector<CellIndex>& start,
                                        const RecurrenceOptions& opt) {
  if (start.empty()) throw EmptyBoundary("recurrence_stats: empty start region");
  if (opt.profile && opt.profile->J() < opt.t_max)
    throw std::invalid_argument("recurrence_stats: gap profile shorter than t_max");
  BoundarySampler sampler(world, start);
  const std::set<CellIndex> region(start.begin(), start.end());

  struct Orbit {
    std::int64_t first_return = -1;
    std::int64_t violations = 0;
    bool terminated = false;
  };
  std::vector<Orbit> orbits(std::size_t(opt.n));
  parallel_for(opt.n, opt.workers, [&](std::int64_t i) {
    auto rng = substream(opt.seed, std::uint64_t(i));
    const LineElement x = sampler.draw(rng);
    Orbit& o = orbits[std::size_t(i)];
    std::int64_t t = 0;
    const auto s = run_orbit(world, x, opt.t_max, [&](const CollisionEvent& e) {
      ++t;
      const CellIndex c = world.kind() == TableKind::tube ? CellIndex{e.to.cell.x, 0} : e.to.cell;
      if (o.first_return < 0 && region.count(c)) o.first_return = t;
      if (opt.profile) {
        const auto [lo, hi] = opt.profile->confinement(t);
        if (c.x < lo || c.x > hi) ++o.violations;
      }
      return true;
    }, opt.guards);
    o.terminated = s.status != FlightStatus::ok;
  });

  RecurrenceStats st;
  st.n = opt.n;
  std::vector<std::int64_t> hist(std::size_t(opt.t_max + 1), 0);
  for (const Orbit& o : orbits) {
    if (o.first_return >= 0) ++hist[std::size_t(o.first_return)];
    st.confinement_violations += o.violations;
    st.terminated += o.terminated ? 1 : 0;
  }
  st.r.resize(std::size_t(opt.t_max + 1));
  std::int64_t acc = 0;
  for (std::size_t t = 0; t < hist.size(); ++t) {
    acc += hist[t];
    st.r[t] = double(acc) / double(opt.n);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Lyapunov exponent

struct LyapunovOptions {
  std::int64_t n_orbits = 100;
  std::int64_t n_steps = 10'000;
  std::uint64_t seed = 1;
  bool reversed = false;  // run T^{-1} = ι T ι from the same draws
  Guards guards;
  int workers = 1;
  int max_attempts = 64;  // per orbit
};

struct LyapunovEstimate {
  double lambda = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double sd = 0.0;
  std::int64_t resampled = 0;
  std::vector<double> per_orbit;
};

/// Mean growth rate of the tangent cocycle per collision, with a 95% normal
/// interval from the spread across orbits.
inline LyapunovEstimate lyapunov_estimate(const World& world, const std::vector<CellIndex>& start,
                                          const LyapunovOptions& opt) {
  if (opt.n_orbits < 2 || opt.n_steps < 1)
    throw std::invalid_argument("lyapunov_estimate: need >= 2 orbits and >= 1 step");
  BoundarySampler sampler(world, start);
  std::vector<double> rate(std::size_t(opt.n_orbits), std::nan(""));
  std::vector<std::int64_t> retries(std::size_t(opt.n_orbits), 0);

  parallel_for(opt.n_orbits, opt.workers, [&](std::int64_t i) {
    auto rng = substream(opt.seed, std::uint64_t(i));
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
      LineElement x = sampler.draw(rng);
      if (opt.reversed) {
        if (grazing(x.v, normal_at(world, x))) {
          ++retries[std::size_t(i)];
          continue;
        }
        x = reverse(world, x);
      }
      CocycleState state;
      bool failed = false;
      const auto s = run_orbit(world, x, opt.n_steps, [&](const CollisionEvent& e) {
        if (!(e.cos_to > kTangencyTol)) {
          failed = true;
          return false;
        }
        state = tangent_step(e, state);
        return true;
      }, opt.guards);
      if (failed || s.status != FlightStatus::ok || s.steps < opt.n_steps) {
        ++retries[std::size_t(i)];
        continue;
      }
      rate[std::size_t(i)] = state.log_norm / double(opt.n_steps);
      return;
    }
  });

  LyapunovEstimate est;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    est.resampled += retries[i];
    if (!std::isnan(rate[i])) est.per_orbit.push_back(rate[i]);
  }
  if (2 * est.resampled > opt.n_orbits + est.resampled || est.per_orbit.size() < 2)
    throw InsufficientOrbits("lyapunov_estimate: more than half of the orbits terminated early");
  const auto ms = stats::mean_sd(est.per_orbit);
  est.lambda = ms.mean;
  est.sd = ms.sd;
  const double half = 1.96 * ms.sd / std::sqrt(double(ms.n));
  est.ci_low = ms.mean - half;
  est.ci_high = ms.mean + half;
  return est;
}

// ---------------------------------------------------------------------------
// horizon

/// Inclusive rectangle of cells; tubes use y0 = y1 = 0.
struct CellWindow {
  std::int64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  std::int64_t cells() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
};

struct FreeChord {
  Point from;
  Point to;
  double length = 0.0;
  bool complete = false;  // both ends on scatterers (or tube walls)
};

struct HorizonResult {
  double max_free_flight = 0.0;  // longest complete chord
  bool exceeds_window = false;   // some sampled line crosses the window untouched
  std::optional<FreeChord> witness;
  std::optional<FreeChord> open_witness;  // line crossing the window, if any
  std::vector<FreeChord> corridors;       // complete chords >= min_witness_length
  std::int64_t lines = 0;
};

/// Sweeps directed lines at angles πm/n_angles and evenly spaced offsets over
/// the window and records the free chords between scatterers.
inline HorizonResult horizon_scan(const World& world, const CellWindow& win, int n_angles,
                                  int n_offsets, double min_witness_length = 0.0,
                                  std::size_t max_witnesses = 100) {
  if (n_angles < 1 || n_offsets < 1) throw std::invalid_argument("horizon_scan: empty sweep");
  if (win.x1 < win.x0 || win.y1 < win.y0) throw std::invalid_argument("horizon_scan: empty window");
  const bool tube = world.kind() == TableKind::tube;
  const double X0 = double(win.x0), X1 = double(win.x1 + 1);
  const double Y0 = tube ? 0.0 : double(win.y0), Y1 = tube ? 1.0 : double(win.y1 + 1);

  struct Obstacle {
    Point center;
    double radius;
    double cx0, cy0;  // owning cell
  };
  std::vector<Obstacle> obstacles;
  for (std::int64_t cy = tube ? 0 : win.y0; cy <= (tube ? 0 : win.y1); ++cy)
    for (std::int64_t cx = win.x0; cx <= win.x1; ++cx)
      for (const Disc& d : world.config_at({cx, cy}).discs())
        obstacles.push_back({d.center + Vec2{double(cx), double(cy)}, d.radius, double(cx), double(cy)});

  HorizonResult res;
  const Point corners[4] = {{X0, Y0}, {X1, Y0}, {X0, Y1}, {X1, Y1}};
  std::vector<std::pair<double, double>> blocked;
  for (int m = 0; m < n_angles; ++m) {
    const double theta = kPi * double(m) / double(n_angles);
    const Vec2 d{std::cos(theta), std::sin(theta)};
    const Vec2 nrm{-d.y, d.x};
    double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
    for (const Point& c : corners) {
      pmin = std::min(pmin, dot(c, nrm));
      pmax = std::max(pmax, dot(c, nrm));
    }
    for (int k = 0; k < n_offsets; ++k) {
      const double p = pmin + (pmax - pmin) * (double(k) + 0.5) / double(n_offsets);
      const Point base = p * nrm;
      // parameter range inside the window rectangle
      double s_lo = -std::numeric_limits<double>::infinity(), s_hi = -s_lo;
      bool lo_wall = false, hi_wall = false;
      auto clip = [&](double b, double dir, double lo, double hi, bool walls) {
        if (std::abs(dir) < 1e-15) {
          if (b < lo || b > hi) {
            s_lo = 0.0;
            s_hi = -1.0;
          }
          return;
        }
        double a0 = (lo - b) / dir, a1 = (hi - b) / dir;
        if (a0 > a1) std::swap(a0, a1);
        if (a0 > s_lo) {
          s_lo = a0;
          lo_wall = walls;
        }
        if (a1 < s_hi) {
          s_hi = a1;
          hi_wall = walls;
        }
      };
      clip(base.x, d.x, X0, X1, false);
      clip(base.y, d.y, Y0, Y1, tube);
      if (!(s_hi > s_lo)) continue;
      ++res.lines;

      blocked.clear();
      for (const Obstacle& o : obstacles) {
        const Vec2 oc = o.center - base;
        const double foot = dot(oc, d);
        const double h = cross(d, oc);
        if (std::abs(h) >= o.radius) continue;
        const double half = std::sqrt(o.radius * o.radius - h * h);
        double a = foot - half, b = foot + half;
        // restrict to the owning cell
        auto restrict = [&](double bb, double dir, double lo, double hi) {
          if (std::abs(dir) < 1e-15) {
            if (bb < lo || bb > hi) b = a - 1.0;
            return;
          }
          double t0 = (lo - bb) / dir, t1 = (hi - bb) / dir;
          if (t0 > t1) std::swap(t0, t1);
          a = std::max(a, t0);
          b = std::min(b, t1);
        };
        restrict(base.x, d.x, o.cx0, o.cx0 + 1.0);
        restrict(base.y, d.y, o.cy0, o.cy0 + 1.0);
        if (b > a) blocked.push_back({a, b});
      }
      std::sort(blocked.begin(), blocked.end());

      auto record = [&](double a, double b, bool a_closed, bool b_closed) {
        if (!(b > a)) return;
        FreeChord c{base + a * d, base + b * d, b - a, a_closed && b_closed};
        if (c.complete) {
          if (c.length > res.max_free_flight) {
            res.max_free_flight = c.length;
            res.witness = c;
          }
          if (min_witness_length > 0.0 && c.length >= min_witness_length &&
              res.corridors.size() < max_witnesses)
            res.corridors.push_back(c);
        } else if (!a_closed && !b_closed) {
          res.exceeds_window = true;
          if (!res.open_witness || c.length > res.open_witness->length) res.open_witness = c;
        }
      };
      double cursor = s_lo;
      bool cursor_closed = lo_wall;
      for (const auto& [a, b] : blocked) {
        if (a > cursor) record(cursor, std::min(a, s_hi), cursor_closed, a < s_hi || hi_wall);
        if (b > cursor) {
          cursor = b;
          cursor_closed = true;
        }
        if (cursor >= s_hi) break;
      }
      if (cursor < s_hi) record(cursor, s_hi, cursor_closed, hi_wall);
    }
  }
  return res;
}

struct LongFlight {
  std::optional<CollisionEvent> event;
  std::int64_t collisions = 0;  // spent before (and including) the long flight
  std::int64_t orbits = 0;
};

/// Runs μ-distributed orbits from `start` one after another, each for at most
/// `orbit_steps` collisions, until a flight of length >= min_tau appears or
/// `budget` collisions have been spent.
inline LongFlight find_long_flight(const World& world, const std::vector<CellIndex>& start, double min_tau,
                                   std::int64_t budget, std::uint64_t seed, std::int64_t orbit_steps = 10'000,
                                   const Guards& guards = {}) {
  BoundarySampler sampler(world, start);
  LongFlight out;
  while (out.collisions < budget) {
    auto rng = substream(seed, std::uint64_t(out.orbits++));
    const LineElement x = sampler.draw(rng);
    const std::int64_t steps = std::min(orbit_steps, budget - out.collisions);
    std::int64_t used = 0;
    run_orbit(world, x, steps, [&](const CollisionEvent& e) {
      ++used;
      if (e.tau >= min_tau) out.event = e;
      return !out.event;
    }, guards);
    // a terminated orbit still spends its attempted collision
    out.collisions += std::max<std::int64_t>(used, 1);
    if (out.event) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// singularities

struct SingularityOptions {
  std::int64_t n_orbits = 100;
  double delta = 1e-4;
  std::uint64_t seed = 1;
  Guards guards;
  int workers = 1;
};

struct SingularityGrowth {
  std::vector<std::int64_t> t;
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> bound;  // 2 x arcs within [f_{t+1}^-, f_{t+1}^+]
  double slope = std::nan("");      // least-squares slope of log c against log t
  std::int64_t terminated = 0;
};

/// Identifies one source of singularity lines: a tangency on (cell, arc,
/// side of the ray) or a corner point (cell, corner).
struct SingularitySource {
  CellIndex cell;
  int kind = 0;  // 0 tangency, 1 corner
  int index = 0;
  int orientation = 0;
  auto operator<=>(const SingularitySource&) const = default;
};

/// Sources of singularity approached within δ by the flight of `e`.
template <class F>
void singularity_sources_near(const World& world, const CollisionEvent& e, double delta, F&& fn) {
  const Point o = e.from.q;
  const Vec2 d = e.from.v;
  const Point end = o + e.tau * d;
  std::set<CellIndex> cells;
  const bool tube = world.kind() == TableKind::tube;
  for_each_flight_cell(e, [&](CellIndex c) {
    for (std::int64_t dy = tube ? 0 : -1; dy <= (tube ? 0 : 1); ++dy)
      for (std::int64_t dx = -1; dx <= 1; ++dx) cells.insert(c + CellIndex{dx, dy});
    return true;
  });
  for (const CellIndex c : cells) {
    const Vec2 off = cell_offset(c - e.from.cell);
    const LocalConfiguration& cfg = world.config_at(c);
    const auto arcs = cfg.arcs();
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const Vec2 oc = arcs[a].center + off - o;
      const double foot = dot(oc, d);
      if (foot < 0.0 || foot > e.tau) continue;
      const double h = cross(d, oc);
      if (std::abs(std::abs(h) - arcs[a].radius) > delta) continue;
      // tangency point lies on the arc?
      const Vec2 radial = (o + foot * d) - (arcs[a].center + off);
      if (!arcs[a].contains_angle(std::atan2(radial.y, radial.x), 1e-9)) continue;
      fn(SingularitySource{c, 0, int(a), h > 0 ? 1 : -1});
    }
    const auto corners = cfg.corners();
    for (std::size_t k = 0; k < corners.size(); ++k)
      if (segment_point_distance(o, end, corners[k] + off) <= delta)
        fn(SingularitySource{c, 1, int(k), 0});
  }
}

/// Counts distinct singularity sources approached within δ by μ-distributed
/// orbits from the origin cell of `profile`, within t collisions.
inline SingularityGrowth singularity_growth(const World& world, const GapProfile& profile,
                                            std::vector<std::int64_t> t_values,
                                            const SingularityOptions& opt) {
  if (world.kind() != TableKind::tube) throw std::invalid_argument("singularity_growth: tube world required");
  std::sort(t_values.begin(), t_values.end());
  t_values.erase(std::unique(t_values.begin(), t_values.end()), t_values.end());
  if (t_values.empty() || t_values.front() < 0) throw std::invalid_argument("singularity_growth: bad t values");
  const std::int64_t t_max = t_values.back();
  if (profile.J() < t_max + 1) throw std::invalid_argument("singularity_growth: gap profile too short");

  BoundarySampler sampler(world, {{profile.origin, 0}});
  std::vector<std::map<SingularitySource, std::int64_t>> seen(std::size_t(opt.n_orbits));
  std::vector<char> terminated(std::size_t(opt.n_orbits), 0);
  parallel_for(opt.n_orbits, opt.workers, [&](std::int64_t i) {
    auto rng = substream(opt.seed, std::uint64_t(i));
    const LineElement x = sampler.draw(rng);
    auto& mine = seen[std::size_t(i)];
    std::int64_t t = 0;
    const auto s = run_orbit(world, x, t_max, [&](const CollisionEvent& e) {
      ++t;
      singularity_sources_near(world, e, opt.delta, [&](const SingularitySource& src) {
        mine.try_emplace(src, t);
      });
      return true;
    }, opt.guards);
    terminated[std::size_t(i)] = s.status != FlightStatus::ok;
  });

  std::map<SingularitySource, std::int64_t> first;
  for (const auto& m : seen)
    for (const auto& [src, t] : m) {
      auto [it, inserted] = first.try_emplace(src, t);
      if (!inserted) it->second = std::min(it->second, t);
    }

  SingularityGrowth g;
  g.t = t_values;
  for (char c : terminated) g.terminated += c;
  std::vector<double> lx, ly;
  for (const std::int64_t t : t_values) {
    std::int64_t c = 0;
    for (const auto& [src, t0] : first) c += t0 <= t ? 1 : 0;
    g.count.push_back(c);
    std::int64_t arcs = 0;
    if (t > 0) {
      const auto [lo, hi] = profile.confinement(t + 1);
      for (std::int64_t n = lo; n <= hi; ++n) arcs += std::int64_t(world.config_at({n, 0}).arcs().size());
    }
    g.bound.push_back(2 * arcs);
    if (t > 0 && c > 0) {
      lx.push_back(std::log(double(t)));
      ly.push_back(std::log(double(c)));
    }
  }
  if (lx.size() >= 2) g.slope = stats::ols_slope(lx, ly);
  return g;
}

}  // namespace lorentz
