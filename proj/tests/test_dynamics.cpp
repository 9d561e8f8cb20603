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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lorentz/analysis.hpp"
#include "lorentz/dynamics.hpp"
#include "lorentz/ensemble.hpp"
#include "support.hpp"

namespace lorentz {
namespace {

using testing::centre_arc;
using testing::facing_discs_catalog;
using testing::march;

World blocking_tube() { return World(TableKind::tube, canonical_tube_catalog(), ConstantSource{1}); }

LineElement gate_element(CellIndex cell, Point q, double angle) {
  LineElement x;
  x.cell = cell;
  x.arc = -1;
  x.q = q;
  x.v = UnitVector::from_angle(angle);
  return x;
}

TEST(NextCollision, PeriodTwoBetweenFacingDiscs) {
  const World w(TableKind::gas, facing_discs_catalog(), ConstantSource{2});
  LineElement x;
  x.cell = {0, 0};
  x.arc = centre_arc(w.config_at({0, 0}));
  x.q = {0.75, 0.5};
  x.v = UnitVector::normalize({1, 0});
  const auto e = next_event(w, x);
  EXPECT_EQ(e.to.cell.x, 1);
  EXPECT_EQ(e.to.cell.y, 0);
  EXPECT_EQ(e.to.arc, x.arc);
  EXPECT_NEAR(e.to.position().x, 1.25, 1e-15);
  EXPECT_NEAR(e.to.position().y, 0.5, 1e-15);
  EXPECT_NEAR(e.tau, 0.5, 1e-15);
  EXPECT_NEAR(e.to.v.x(), -1.0, 1e-15);
  EXPECT_NEAR(e.to.v.y(), 0.0, 1e-15);
  EXPECT_EQ(e.cells_traversed, 2);
  EXPECT_EQ(e.singular, SingularKind::none);
}

TEST(NextCollision, GrazingIsTangential) {
  const World w(TableKind::gas, facing_discs_catalog(), ConstantSource{2});
  const auto r = next_collision(w, gate_element({0, 0}, {0.0, 0.75 + kTangencyTol / 2}, 0.0));
  EXPECT_EQ(r.status, FlightStatus::singular);
  EXPECT_EQ(r.event.singular, SingularKind::tangential);
  EXPECT_THROW(next_event(w, gate_element({0, 0}, {0.0, 0.75 + kTangencyTol / 2}, 0.0)), SingularCollision);
}

TEST(NextCollision, ObliqueShotMatchesMarching) {
  const World w = blocking_tube();
  const LineElement x = gate_element({0, 0}, {0.0, 0.5}, 0.3);
  const auto e = next_event(w, x);
  const auto m = march(w, x.position(), x.v, 1e-5, 5.0);
  ASSERT_TRUE(m);
  EXPECT_NEAR(e.tau, m->t, 1e-6);
  EXPECT_NEAR(e.to.position().x, m->point.x, 1e-6);
  EXPECT_NEAR(e.to.position().y, m->point.y, 1e-6);
}

TEST(NextCollision, VertexPassageIsGateGraze) {
  // full gates: the cell corner is a point of the open table
  const std::vector<GateSpec> gates{{Side::left, 0, 1}, {Side::right, 0, 1}, {Side::bottom, 0, 1}, {Side::top, 0, 1}};
  std::vector<LocalConfiguration> cells;
  cells.push_back(build_local_config(1, {{{0.5, 0.5}, 0.3}}, gates, true));
  cells.push_back(build_local_config(2, {{{0.5, 0.5}, 0.1}}, gates, false));
  const World w(TableKind::gas, std::make_shared<const Catalog>(std::move(cells)), ConstantSource{1});
  LineElement x;
  x.arc = 0;
  x.q = {0.5 - 0.3 * std::sqrt(0.5), 0.5 - 0.3 * std::sqrt(0.5)};
  x.v = UnitVector::normalize({-1, -1});
  const auto r = next_collision(w, x);
  EXPECT_EQ(r.status, FlightStatus::singular);
  EXPECT_EQ(r.event.singular, SingularKind::gate_graze);
}

TEST(NextCollision, GuardsOnAFullFreeLine) {
  const World open(TableKind::tube, canonical_tube_catalog(), ConstantSource{2});
  Guards g;
  g.max_cells = 100;
  const auto r = next_collision(open, gate_element({0, 0}, {0.0, 0.5}, 0.0), g);
  EXPECT_EQ(r.status, FlightStatus::guard_exceeded);
  EXPECT_EQ(r.stop_cell.x, 99);
  EXPECT_THROW(next_event(open, gate_element({0, 0}, {0.0, 0.5}, 0.0), g), GuardExceeded);
  Guards len;
  len.max_length = 20.5;
  EXPECT_EQ(next_collision(open, gate_element({0, 0}, {0.0, 0.5}, 0.0), len).status, FlightStatus::guard_exceeded);
}

TEST(NextCollision, ExposedWallIsReported) {
  const std::vector<Disc> corners{{{0, 0}, 0.3}, {{1, 0}, 0.3}, {{0, 1}, 0.3}, {{1, 1}, 0.3}};
  const std::vector<GateSpec> gates{{Side::left, 0.3, 0.7}, {Side::right, 0.3, 0.7}};
  auto blocking = corners;
  blocking.push_back({{0.5, 0.5}, 0.25});
  std::vector<LocalConfiguration> cells;
  cells.push_back(build_local_config(1, blocking, gates, true));
  cells.push_back(build_local_config(2, corners, gates, false));
  const World w(TableKind::tube, std::make_shared<const Catalog>(std::move(cells)), ConstantSource{2});
  const auto r = next_collision(w, gate_element({3, 0}, {0.0, 0.5}, kPi / 4));
  EXPECT_EQ(r.status, FlightStatus::wall_hit);
  EXPECT_EQ(r.stop_cell.x, 3);
  EXPECT_THROW(next_event(w, gate_element({3, 0}, {0.0, 0.5}, kPi / 4)), WallHit);
}

// Random μ-distributed departures compared against the marching reference.
void compare_with_marching(const World& w, const std::vector<CellIndex>& cells, int n, std::uint64_t seed) {
  const auto sample = sample_mu(w, cells, n, seed);
  int compared = 0;
  for (const auto& x : sample.elements) {
    const auto r = next_collision(w, x);
    if (!r.ok()) continue;
    // grazing arrivals can slip between marching steps
    if (r.event.cos_to < 1e-2) continue;
    const auto m = march(w, x.position(), x.v, 1e-4, r.event.tau + 1.0);
    ASSERT_TRUE(m);
    ++compared;
    EXPECT_NEAR(r.event.tau, m->t, 1e-9);
    EXPECT_NEAR(r.event.to.position().x, m->point.x, 1e-9);
    EXPECT_NEAR(r.event.to.position().y, m->point.y, 1e-9);
  }
  EXPECT_GT(compared, n * 9 / 10);
}

TEST(NextCollisionProperty, AgreesWithMarchingInTubes) {
  compare_with_marching(bernoulli_world({{0.5, 0.5}, 3}, canonical_tube_catalog()), {{0, 0}, {1, 0}, {2, 0}},
                        300, 17);
}

TEST(NextCollisionProperty, AgreesWithMarchingInGases) {
  compare_with_marching(bernoulli_world({{0.6, 0.4}, 5}, canonical_gas_catalog()), {{0, 0}, {1, 0}, {0, 1}}, 300,
                        19);
}

TEST(NextCollisionProperty, FlightAdditivity) {
  const World w = bernoulli_world({{0.5, 0.5}, 21}, canonical_gas_catalog());
  const auto sample = sample_mu(w, {{0, 0}}, 200, 2);
  for (const auto& x : sample.elements) {
    const auto events = iterate_orbit(w, x, 50);
    for (const auto& e : events) {
      const Point expect = e.from.position() + e.tau * e.from.v.vec();
      EXPECT_NEAR(e.to.position().x, expect.x, 1e-12 * std::max(1.0, e.tau));
      EXPECT_NEAR(e.to.position().y, expect.y, 1e-12 * std::max(1.0, e.tau));
      EXPECT_NEAR(distance(e.from.position(), e.to.position()), e.tau, 1e-12 * std::max(1.0, e.tau));
      // arrival lies on the named arc
      const ArcPiece& arc = w.config_at(e.to.cell).arcs()[std::size_t(e.to.arc)];
      EXPECT_NEAR(distance(e.to.q, arc.center), arc.radius, 1e-10);
      EXPECT_GE(dot(arc.normal_at(e.to.q), e.to.v), 0.0);
    }
  }
}

TEST(Reverse, NormalIncidenceIsFixed) {
  const World w = blocking_tube();
  LineElement x;
  x.arc = centre_arc(w.config_at({0, 0}));
  const ArcPiece& arc = w.config_at({0, 0}).arcs()[std::size_t(x.arc)];
  x.q = arc.point_at(1.0);
  x.v = arc.normal_at(x.q);
  const LineElement y = reverse(w, x);
  EXPECT_NEAR(y.v.x(), x.v.x(), 1e-15);
  EXPECT_NEAR(y.v.y(), x.v.y(), 1e-15);
}

TEST(ReverseProperty, Involution) {
  const World w = bernoulli_world({{0.5, 0.5}, 8}, canonical_tube_catalog());
  const auto sample = sample_mu(w, {{0, 0}, {1, 0}}, 10000, 4);
  for (const auto& x : sample.elements) {
    if (std::abs(dot(normal_at(w, x), x.v)) <= kTangencyTol) continue;
    const LineElement y = reverse(w, reverse(w, x));
    EXPECT_NEAR(y.v.x(), x.v.x(), 1e-15);
    EXPECT_NEAR(y.v.y(), x.v.y(), 1e-15);
  }
}

TEST(ReverseProperty, ReversedFlightReturns) {
  for (const World& w : {bernoulli_world({{0.5, 0.5}, 8}, canonical_tube_catalog()),
                         bernoulli_world({{0.5, 0.5}, 9}, canonical_gas_catalog())}) {
    const auto sample = sample_mu(w, {{0, 0}}, 1000, 6);
    int checked = 0;
    for (const auto& x : sample.elements) {
      const auto a = next_collision(w, x);
      if (!a.ok() || a.event.cos_to < 1e-3 || dot(normal_at(w, x), x.v) < 1e-3) continue;
      const auto b = next_collision(w, reverse(w, a.event.to));
      ASSERT_TRUE(b.ok());
      const LineElement back = reverse(w, b.event.to);
      ++checked;
      EXPECT_EQ(back.cell, x.cell);
      EXPECT_EQ(back.arc, x.arc);
      EXPECT_NEAR(back.q.x, x.q.x, 1e-9);
      EXPECT_NEAR(back.q.y, x.q.y, 1e-9);
      EXPECT_NEAR(back.v.x(), x.v.x(), 1e-9);
      EXPECT_NEAR(back.v.y(), x.v.y(), 1e-9);
    }
    EXPECT_GT(checked, 900);
  }
}

TEST(TangentFactor, PeriodTwo) {
  const Mat2 f = tangent_factor(0.5, 4.0, 4.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(f[0], -3.0);
  EXPECT_DOUBLE_EQ(f[1], -0.5);
  EXPECT_DOUBLE_EQ(f[2], -16.0);
  EXPECT_DOUBLE_EQ(f[3], -3.0);
  EXPECT_DOUBLE_EQ(det(f), 1.0);
}

TEST(TangentFactor, ZeroFlight) {
  const Mat2 f = tangent_factor(0.0, 2.0, 5.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(f[0], -1.0);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
  EXPECT_DOUBLE_EQ(f[2], -7.0);
  EXPECT_DOUBLE_EQ(f[3], -1.0);
  EXPECT_THROW(tangent_factor(1.0, 1.0, 1.0, 1.0, 1e-10), NearTangency);
}

// Oracle: central differences of T in (r, φ) coordinates.
std::optional<Mat2> fd_jacobian(const World& w, const LineElement& x, double h) {
  const auto base = next_collision(w, x);
  if (!base.ok()) return std::nullopt;
  const PhaseCoords c = phase_coords(w, x);
  Mat2 j{};
  for (int col = 0; col < 2; ++col) {
    PhaseCoords plus = c, minus = c;
    (col == 0 ? plus.r : plus.phi) += h;
    (col == 0 ? minus.r : minus.phi) -= h;
    const auto a = next_collision(w, from_phase_coords(w, x, plus));
    const auto b = next_collision(w, from_phase_coords(w, x, minus));
    if (!a.ok() || !b.ok()) return std::nullopt;
    if (a.event.to.cell != base.event.to.cell || b.event.to.cell != base.event.to.cell) return std::nullopt;
    if (a.event.to.arc != base.event.to.arc || b.event.to.arc != base.event.to.arc) return std::nullopt;
    const PhaseCoords pa = phase_coords(w, a.event.to), pb = phase_coords(w, b.event.to);
    j[std::size_t(col)] = (pa.r - pb.r) / (2 * h);
    j[std::size_t(2 + col)] = (pa.phi - pb.phi) / (2 * h);
  }
  return j;
}

TEST(TangentFactor, PeriodTwoFiniteDifferences) {
  const World w(TableKind::gas, facing_discs_catalog(), ConstantSource{2});
  LineElement x;
  x.arc = centre_arc(w.config_at({0, 0}));
  x.q = {0.75, 0.5};
  x.v = UnitVector::normalize({1, 0});
  const auto j = fd_jacobian(w, x, 1e-6);
  ASSERT_TRUE(j);
  const Mat2 f = tangent_factor(next_event(w, x));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR((*j)[std::size_t(i)], f[std::size_t(i)], 1e-5);
}

TEST(TangentFactorProperty, MatchesFiniteDifferences) {
  const World w = bernoulli_world({{0.5, 0.5}, 12}, canonical_gas_catalog());
  const auto sample = sample_mu(w, {{0, 0}, {1, 1}}, 400, 31);
  int checked = 0;
  for (const auto& x : sample.elements) {
    const auto r = next_collision(w, x);
    if (!r.ok() || r.event.cos_to < 0.05 || r.event.cos_from < 0.05) continue;
    const auto j = fd_jacobian(w, x, 1e-7);
    if (!j) continue;
    ++checked;
    const Mat2 f = tangent_factor(r.event);
    for (int i = 0; i < 4; ++i)
      EXPECT_NEAR((*j)[std::size_t(i)], f[std::size_t(i)], 1e-4 * std::max(1.0, std::abs(f[std::size_t(i)])));
  }
  EXPECT_GT(checked, 250);
}

TEST(TangentFactorProperty, DeterminantIdentity) {
  const World w = blocking_tube();
  const auto sample = sample_mu(w, {{0, 0}}, 200, 77);
  int checked = 0;
  for (const auto& x : sample.elements) {
    run_orbit(w, x, 50, [&](const CollisionEvent& e) {
      if (e.cos_to <= kTangencyTol) return true;
      const Mat2 f = tangent_factor(e);
      EXPECT_NEAR(det(f), e.cos_from / e.cos_to, 1e-8 * std::max(1.0, e.cos_from / e.cos_to));
      ++checked;
      return true;
    });
  }
  EXPECT_GT(checked, 9000);
}

TEST(Cocycle, RenormalizationKeepsTheProduct) {
  const World w = blocking_tube();
  const auto x = sample_mu(w, {{0, 0}}, 1, 5).elements[0];
  const auto events = iterate_orbit(w, x, 20);
  ASSERT_EQ(events.size(), 20u);
  Mat2 product{1, 0, 0, 1};
  CocycleState s;
  for (const auto& e : events) {
    product = mat_mul(tangent_factor(e), product);
    s = tangent_step(e, s);
  }
  const double scale = std::exp(s.log_norm);
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(s.m[std::size_t(i)] * scale, product[std::size_t(i)], 1e-9 * std::abs(scale));
  EXPECT_EQ(s.steps, 20);
}

TEST(Confinement, OrbitsStayWithinTheGapProfile) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const World w = bernoulli_world({{0.5, 0.5}, seed}, canonical_tube_catalog());
    const auto p = gap_profile(w, 300);
    const auto sample = sample_mu(w, {{p.origin, 0}}, 50, seed);
    for (const auto& x : sample.elements) {
      std::int64_t t = 0;
      run_orbit(w, x, 300, [&](const CollisionEvent& e) {
        ++t;
        const auto [lo, hi] = p.confinement(t);
        EXPECT_GE(e.to.cell.x, lo);
        EXPECT_LE(e.to.cell.x, hi);
        return true;
      });
    }
  }
}

TEST(PhaseCoordsTest, RoundTrip) {
  const World w = blocking_tube();
  const auto sample = sample_mu(w, {{0, 0}}, 500, 3);
  for (const auto& x : sample.elements) {
    const LineElement y = from_phase_coords(w, x, phase_coords(w, x));
    EXPECT_NEAR(y.q.x, x.q.x, 1e-12);
    EXPECT_NEAR(y.q.y, x.q.y, 1e-12);
    EXPECT_NEAR(y.v.x(), x.v.x(), 1e-12);
    EXPECT_NEAR(y.v.y(), x.v.y(), 1e-12);
  }
}

}  // namespace
}  // namespace lorentz
