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

#include "lorentz/analysis.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/stats.hpp"

namespace lorentz {
namespace {

TEST(Bernoulli, RejectsDegenerateSpecs) {
  const auto cat = canonical_tube_catalog();
  EXPECT_THROW(bernoulli_world({{1.0, 0.0}, 1}, cat), DegenerateSpec);
  EXPECT_THROW(bernoulli_world({{0.5, 0.5, 0.0}, 1}, cat), DegenerateSpec);
  EXPECT_THROW(bernoulli_world({{0.5, 0.6}, 1}, cat), DegenerateSpec);
  EXPECT_NO_THROW(bernoulli_world({{0.25, 0.75}, 1}, cat));
  EXPECT_DOUBLE_EQ(blocking_probability({{0.25, 0.75}, 1}, *cat), 0.25);
}

TEST(Bernoulli, NearDegenerateLimit) {
  const World w = bernoulli_world({{1 - 1e-6, 1e-6}, 42}, canonical_tube_catalog());
  for (std::int64_t n = 0; n < 1000; ++n) EXPECT_EQ(w.cell_at(n), 1);
}

TEST(Bernoulli, MarginalFrequencies) {
  const World w = bernoulli_world({{0.2, 0.8}, 5}, canonical_gas_catalog());
  int ones = 0;
  const int n = 200 * 200;
  for (int x = 0; x < 200; ++x)
    for (int y = 0; y < 200; ++y) ones += w.cell_at({x, y}) == 1;
  const double sigma = std::sqrt(0.2 * 0.8 / n);
  EXPECT_NEAR(double(ones) / n, 0.2, 4 * sigma);
}

TEST(GapLaw, GeometricChiSquare) {
  // oracle: Π(g = k) = p_B p_NB^{k-1}
  const World w = bernoulli_world({{0.5, 0.5}, 2024}, canonical_tube_catalog());
  const auto p = gap_profile(w, 100000);
  std::vector<std::int64_t> g(p.g_plus.begin() + 1, p.g_plus.end());
  const auto r = stats::chi_square_gof(g, [](std::int64_t k) { return std::ldexp(1.0, -int(k)); });
  EXPECT_GT(r.p_value, 0.001) << "chi2 = " << r.statistic << " dof = " << r.dof;
  EXPECT_GT(r.bins, 10);
}

TEST(GapLaw, ChiSquareRejectsTheWrongLaw) {
  const World w = bernoulli_world({{0.3, 0.7}, 2024}, canonical_tube_catalog());
  const auto p = gap_profile(w, 100000);
  std::vector<std::int64_t> g(p.g_plus.begin() + 1, p.g_plus.end());
  const auto r = stats::chi_square_gof(g, [](std::int64_t k) { return std::ldexp(1.0, -int(k)); });
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(GapLaw, BorelCantelliCount) {
  const double p_nb = 0.5;
  const int J = 10000;
  std::vector<double> ps;
  for (int j = 1; j <= J; ++j) ps.push_back(std::pow(p_nb, j - 1));
  const auto moments = stats::poisson_binomial(ps);
  double total = 0.0;
  const int tubes = 40;
  for (int s = 1; s <= tubes; ++s) {
    const auto p = gap_profile(bernoulli_world({{0.5, 0.5}, std::uint64_t(s)}, canonical_tube_catalog()), J);
    for (int j = 1; j <= J; ++j) total += p.g_plus[std::size_t(j)] >= j;
  }
  EXPECT_NEAR(total, tubes * moments.mean, 3 * std::sqrt(tubes * moments.variance));
}

TEST(Eta, OuterRadius) {
  for (int i = 1; i <= 4; ++i)
    for (int k = 1; k <= 8; ++k)
      for (std::int64_t rho2 = 1; rho2 <= 40; ++rho2) {
        const std::int64_t rho = outer_radius(rho2, k, i);
        EXPECT_GE(rho - rho2, k);
        // k consecutive radii off the blocking circles end at rho
        for (std::int64_t r = rho - k + 1; r <= rho; ++r) EXPECT_FALSE(on_blocking_radius(r, i));
        // and no smaller choice works
        for (std::int64_t cand = rho2 + k; cand < rho; ++cand) {
          bool run = true;
          for (std::int64_t r = cand - k + 1; r <= cand; ++r) run = run && !on_blocking_radius(r, i);
          EXPECT_FALSE(run) << "rho2=" << rho2 << " k=" << k << " i=" << i << " cand=" << cand;
        }
      }
}

TEST(Eta, RejectsXiOffZi) {
  const auto cat = canonical_gas_catalog();
  GasPatch xi(4, 1);
  xi.set({4, 0}, 2);  // ‖n‖ = 4 = 2², a blocking circle for i <= 2
  EXPECT_THROW(validate_xi(xi, 2, *cat), std::invalid_argument);
  EXPECT_NO_THROW(validate_xi(xi, 3, *cat));
  GasPatch bad(1, 7);
  EXPECT_THROW(validate_xi(bad, 1, *cat), std::invalid_argument);
}

TEST(Eta, KOneAcceptsImmediately) {
  const auto cat = canonical_gas_catalog();
  EtaOptions opt;
  opt.n = 1000;
  const auto eta = construct_eta(cat, 2, 1, GasPatch(2, 1), opt);
  EXPECT_EQ(eta.rho1, 2);
  EXPECT_EQ(eta.rho2, 3);
  EXPECT_TRUE(check_eta_invariants(eta, *cat).ok) << check_eta_invariants(eta, *cat).message;
  const World w(TableKind::gas, cat, eta.block.source(1));
  EXPECT_TRUE(verify_blocking_circles(w, 2, eta.rho).pass);
}

TEST(Eta, KFourMeetsTheBoundOnAFreshSeed) {
  const auto cat = canonical_gas_catalog();
  GasPatch xi(2, 1);
  xi.set({1, 0}, 2);
  xi.set({0, 1}, 2);
  EtaOptions opt;
  opt.n = 20000;
  opt.seed = 77;
  opt.workers = 4;
  const auto eta = construct_eta(cat, 2, 4, xi, opt);
  ASSERT_FALSE(eta.estimates.empty());
  const auto& acc = eta.estimates.back();
  EXPECT_LE(acc.p_hat + 2 * acc.se, 0.25);
  for (std::size_t s = 0; s + 1 < eta.estimates.size(); ++s)
    EXPECT_GT(eta.estimates[s].p_hat + 2 * eta.estimates[s].se, 0.25);

  // independent re-estimate on the probe world
  const World probe(TableKind::gas, cat, xi.source(1));
  EscapeOptions eo;
  eo.n = 20000;
  eo.seed = 991;
  eo.workers = 4;
  const auto fresh = escape_measure(probe, eta.rho1, eta.rho2, {0, 0}, eo);
  EXPECT_LE(fresh.p_hat + 2 * fresh.se, 0.25);

  const auto inv = check_eta_invariants(eta, *cat);
  EXPECT_TRUE(inv.ok) << inv.message;
  const World w(TableKind::gas, cat, eta.block.source(1));
  EXPECT_TRUE(verify_blocking_circles(w, 2, eta.rho).pass);
  for (std::int64_t y = -2; y <= 2; ++y)
    for (std::int64_t x = -2; x <= 2; ++x)
      if (std::abs(x) + std::abs(y) <= 2) EXPECT_EQ(w.cell_at({x, y}), xi.at({x, y}));
}

TEST(Eta, WorkerCountDoesNotMatter) {
  const auto cat = canonical_gas_catalog();
  EtaOptions a;
  a.n = 5000;
  a.seed = 3;
  a.workers = 1;
  EtaOptions b = a;
  b.workers = 5;
  const auto ea = construct_eta(cat, 2, 3, GasPatch(1, 1), a);
  const auto eb = construct_eta(cat, 2, 3, GasPatch(1, 1), b);
  EXPECT_EQ(ea.rho2, eb.rho2);
  ASSERT_EQ(ea.estimates.size(), eb.estimates.size());
  for (std::size_t i = 0; i < ea.estimates.size(); ++i) EXPECT_EQ(ea.estimates[i].p_hat, eb.estimates[i].p_hat);
  EXPECT_EQ(ea.block.ids(), eb.block.ids());
}

TEST(Eta, BudgetExceeded) {
  const auto cat = canonical_gas_catalog();
  EtaOptions opt;
  opt.n = 2000;
  opt.max_rho2 = 2;
  EXPECT_THROW(construct_eta(cat, 2, 50, GasPatch(1, 1), opt), BudgetExceeded);
}

TEST(Eta, InvariantCheckCatchesTampering) {
  const auto cat = canonical_gas_catalog();
  EtaOptions opt;
  opt.n = 1000;
  auto eta = construct_eta(cat, 2, 1, GasPatch(1, 1), opt);
  ASSERT_TRUE(check_eta_invariants(eta, *cat).ok);
  auto broken = eta;
  broken.block.set({eta.rho2, 0}, 2);
  EXPECT_FALSE(check_eta_invariants(broken, *cat).ok);
  broken = eta;
  broken.block.set({0, eta.rho}, 1);  // outer annulus point, not on a circle when rho is not a square
  if (!on_blocking_radius(eta.rho, 2)) EXPECT_FALSE(check_eta_invariants(broken, *cat).ok);
}

TEST(RiWindow, SingleStage) {
  const auto cat = canonical_gas_catalog();
  EtaOptions opt;
  opt.n = 1000;
  const auto ri = construct_ri_window(cat, 2, {1}, 10, GasPatch(1, 1), opt);
  ASSERT_EQ(ri.stages.size(), 1u);
  EXPECT_EQ(ri.block.ids(), ri.stages[0].block.ids());
  EXPECT_TRUE(verify_blocking_circles(ri_world(cat, ri), 2, 10).pass);
}

TEST(RiWindow, NestedStages) {
  const auto cat = canonical_gas_catalog();
  EtaOptions opt;
  opt.n = 20000;
  opt.seed = 2026;
  opt.workers = 4;
  const auto ri = construct_ri_window(cat, 2, {2, 4}, 60, GasPatch(1, 1), opt);
  ASSERT_EQ(ri.stages.size(), 2u);
  const auto& inner = ri.stages[0];
  const auto& outer = ri.stages[1];
  EXPECT_EQ(outer.rho1, inner.rho);
  EXPECT_GE(outer.rho - outer.rho2, 4);
  for (const auto& s : ri.stages) EXPECT_TRUE(check_eta_invariants(s, *cat).ok);
  const World w = ri_world(cat, ri);
  for (std::int64_t y = -inner.rho; y <= inner.rho; ++y)
    for (std::int64_t x = -inner.rho; x <= inner.rho; ++x)
      if (std::abs(x) + std::abs(y) <= inner.rho) EXPECT_EQ(w.cell_at({x, y}), inner.block.at({x, y}));
  EXPECT_TRUE(verify_blocking_circles(w, 2, 60).pass);

  // a horizontal corridor through the outer non-blocking annulus
  const CellWindow win{outer.rho2 - 1, outer.rho + 2, -1, 1};
  const auto h = horizon_scan(w, win, 64, 256);
  EXPECT_GE(h.max_free_flight, 4.0);
  ASSERT_TRUE(h.witness);
  EXPECT_TRUE(h.witness->complete);
}

TEST(RiWindow, ScheduleMustIncrease) {
  const auto cat = canonical_gas_catalog();
  EXPECT_THROW(construct_ri_window(cat, 2, {3, 3}, 40, GasPatch(1, 1), EtaOptions{}), std::invalid_argument);
  EXPECT_THROW(construct_ri_window(cat, 2, {}, 40, GasPatch(1, 1), EtaOptions{}), std::invalid_argument);
  EtaOptions opt;
  opt.n = 1000;
  EXPECT_THROW(construct_ri_window(cat, 2, {1}, 2, GasPatch(1, 1), opt), std::invalid_argument);
}

}  // namespace
}  // namespace lorentz
