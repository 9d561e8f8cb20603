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

// Random environments: i.i.d. (Bernoulli) words and the nested recurrent gas
// blocks η_k built around a seed window.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorentz/analysis.hpp"
#include "lorentz/world.hpp"

namespace lorentz {

class DegenerateSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BernoulliSpec {
  std::vector<double> probabilities;
  std::uint64_t seed = 0;
};

inline World bernoulli_world(const BernoulliSpec& spec, std::shared_ptr<const Catalog> catalog) {
  if (!catalog) throw std::invalid_argument("bernoulli_world: null catalog");
  if (int(spec.probabilities.size()) != catalog->size())
    throw DegenerateSpec("bernoulli_world: need one probability per configuration (" +
                         std::to_string(catalog->size()) + ")");
  for (double p : spec.probabilities)
    if (!(p > 0.0)) throw DegenerateSpec("bernoulli_world: every probability must be positive");
  const double total = std::accumulate(spec.probabilities.begin(), spec.probabilities.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw DegenerateSpec("bernoulli_world: probabilities must sum to 1");
  BernoulliSource src;
  src.probabilities = spec.probabilities;
  src.seed = spec.seed;
  double acc = 0.0;
  for (double p : spec.probabilities) src.cumulative.push_back(acc += p);
  src.cumulative.back() = 1.0;
  const TableKind kind = catalog->kind();
  return World(kind, std::move(catalog), std::move(src));
}

/// Blocking probability p_B = Σ_{a <= m'} p_a.
inline double blocking_probability(const BernoulliSpec& spec, const Catalog& catalog) {
  double p = 0.0;
  for (int a = 1; a <= catalog.blocking_count(); ++a) p += spec.probabilities.at(std::size_t(a - 1));
  return p;
}

/// Gas configuration on the ball ‖n‖ <= radius, stored in its bounding square.
class GasPatch {
 public:
  GasPatch() : GasPatch(0, 1) {}
  GasPatch(std::int64_t radius, ConfigId fill)
      : radius_(radius), ids_(std::size_t((2 * radius + 1) * (2 * radius + 1)), fill) {
    if (radius < 0) throw std::invalid_argument("GasPatch: negative radius");
  }

  std::int64_t radius() const { return radius_; }
  bool contains(CellIndex n) const { return l1_norm(n) <= radius_; }
  ConfigId at(CellIndex n) const { return ids_[index(n)]; }
  void set(CellIndex n, ConfigId id) { ids_[index(n)] = id; }
  const std::vector<ConfigId>& ids() const { return ids_; }

  /// Source agreeing with the patch on its ball and equal to `fill` elsewhere.
  BlockSource source(ConfigId fill = 1) const {
    BlockSource b;
    b.origin = {-radius_, -radius_};
    b.width = b.height = 2 * radius_ + 1;
    b.ids = ids_;
    b.fill = fill;
    for (std::int64_t y = -radius_; y <= radius_; ++y)
      for (std::int64_t x = -radius_; x <= radius_; ++x)
        if (!contains({x, y})) b.ids[index({x, y})] = fill;
    return b;
  }

 private:
  std::size_t index(CellIndex n) const {
    if (std::abs(n.x) > radius_ || std::abs(n.y) > radius_)
      throw std::out_of_range("GasPatch: cell outside the patch");
    const std::int64_t w = 2 * radius_ + 1;
    return std::size_t((n.y + radius_) * w + (n.x + radius_));
  }
  std::int64_t radius_;
  std::vector<ConfigId> ids_;
};

/// Per-candidate record of the ρ₂ search.
struct RhoEstimate {
  std::int64_t rho2 = 0;
  double p_hat = 1.0;
  double se = 0.0;
};

struct EtaBlock {
  int i = 1;
  int k = 1;
  std::int64_t rho1 = 0;
  std::int64_t rho2 = 0;
  std::int64_t rho = 0;
  GasPatch block;
  std::vector<RhoEstimate> estimates;
};

struct EtaOptions {
  std::int64_t n = 100'000;  // escape estimator sample size
  std::uint64_t seed = 1;
  std::int64_t max_rho2 = 64;
  Guards guards;
  int workers = 1;
};

/// True when ‖n‖ = j² for some j >= i.
inline bool on_blocking_radius(std::int64_t r, int i) { return on_blocking_circle({r, 0}, i); }

/// Smallest ρ >= ρ₂ + k such that (ρ₂, ρ] contains k consecutive radii that
/// are not blocking circles.
inline std::int64_t outer_radius(std::int64_t rho2, int k, int i) {
  std::int64_t run = 0;
  std::int64_t r = rho2;
  while (run < k) {
    ++r;
    run = on_blocking_radius(r, i) ? 0 : run + 1;
  }
  return std::max(r, rho2 + k);
}

/// Rejects seed windows that are not supported on Z_i.
inline void validate_xi(const GasPatch& xi, int i, const Catalog& catalog) {
  for (std::int64_t y = -xi.radius(); y <= xi.radius(); ++y)
    for (std::int64_t x = -xi.radius(); x <= xi.radius(); ++x) {
      const CellIndex n{x, y};
      if (!xi.contains(n)) continue;
      const ConfigId id = xi.at(n);
      if (id < 1 || id > catalog.size())
        throw std::invalid_argument("xi: configuration id out of range at (" + std::to_string(x) +
                                    ", " + std::to_string(y) + ")");
      if (on_blocking_circle(n, i) && id != 1)
        throw std::invalid_argument("xi: blocking circle cell (" + std::to_string(x) + ", " +
                                    std::to_string(y) + ") must have type 1");
    }
}

inline EtaBlock construct_eta(std::shared_ptr<const Catalog> catalog, int i, int k,
                              const GasPatch& xi, const EtaOptions& opt) {
  if (!catalog || catalog->kind() != TableKind::gas)
    throw std::invalid_argument("construct_eta: gas catalog required");
  if (i < 1 || k < 1) throw std::invalid_argument("construct_eta: i and k must be positive");
  validate_xi(xi, i, *catalog);

  EtaBlock eta;
  eta.i = i;
  eta.k = k;
  eta.rho1 = xi.radius();

  // inner ball ξ, everything else blocking until ρ₂ is fixed
  const World probe(TableKind::gas, catalog, xi.source(1));
  for (std::int64_t rho2 = eta.rho1 + 1;; ++rho2) {
    if (rho2 > opt.max_rho2)
      throw BudgetExceeded("construct_eta: no rho2 <= " + std::to_string(opt.max_rho2) +
                           " meets the escape bound 1/" + std::to_string(k));
    if (k == 1) {
      eta.rho2 = rho2;
      eta.estimates.push_back({rho2, 1.0, 0.0});
      break;
    }
    EscapeOptions eo;
    eo.n = opt.n;
    eo.seed = hash_combine(opt.seed, std::uint64_t(rho2));
    eo.guards = opt.guards;
    eo.workers = opt.workers;
    const EscapeEstimate e = escape_measure(probe, eta.rho1, rho2, {0, 0}, eo);
    eta.estimates.push_back({rho2, e.p_hat, e.se});
    if (e.p_hat + 2.0 * e.se <= 1.0 / double(k)) {
      eta.rho2 = rho2;
      break;
    }
  }

  eta.rho = outer_radius(eta.rho2, k, i);
  const ConfigId m = catalog->size();
  eta.block = GasPatch(eta.rho, 1);
  for (std::int64_t y = -eta.rho; y <= eta.rho; ++y)
    for (std::int64_t x = -eta.rho; x <= eta.rho; ++x) {
      const CellIndex n{x, y};
      const std::int64_t r = l1_norm(n);
      if (r > eta.rho) continue;
      if (r <= eta.rho1)
        eta.block.set(n, xi.at(n));
      else if (r <= eta.rho2 || on_blocking_circle(n, i))
        eta.block.set(n, 1);
      else
        eta.block.set(n, m);
    }
  return eta;
}

struct InvariantReport {
  bool ok = true;
  std::string message;
};

/// Structural checks on an η block: radii ordering, annulus contents, and
/// type 1 on every blocking circle of the ball.
inline InvariantReport check_eta_invariants(const EtaBlock& eta, const Catalog& catalog) {
  auto fail = [](std::string m) { return InvariantReport{false, std::move(m)}; };
  if (!(eta.rho1 < eta.rho2 && eta.rho2 < eta.rho)) return fail("radii not ordered rho1 < rho2 < rho");
  if (eta.rho - eta.rho2 < eta.k) return fail("outer annulus thinner than k");
  if (eta.block.radius() != eta.rho) return fail("block radius differs from rho");
  if (eta.k > 1) {
    if (eta.estimates.empty() || eta.estimates.back().rho2 != eta.rho2) return fail("missing rho2 estimate");
    const auto& e = eta.estimates.back();
    if (!(e.p_hat + 2.0 * e.se <= 1.0 / double(eta.k))) return fail("rho2 estimate above 1/k");
  }
  const ConfigId m = catalog.size();
  for (std::int64_t y = -eta.rho; y <= eta.rho; ++y)
    for (std::int64_t x = -eta.rho; x <= eta.rho; ++x) {
      const CellIndex n{x, y};
      const std::int64_t r = l1_norm(n);
      if (r > eta.rho) continue;
      const ConfigId id = eta.block.at(n);
      const std::string where = " at (" + std::to_string(x) + ", " + std::to_string(y) + ")";
      if (on_blocking_circle(n, eta.i)) {
        if (id != 1) return fail("blocking circle cell not type 1" + where);
      } else if (r > eta.rho1 && r <= eta.rho2) {
        if (id != 1) return fail("blocking annulus cell not type 1" + where);
      } else if (r > eta.rho2) {
        if (id != m) return fail("outer annulus cell not type m" + where);
      }
    }
  return {};
}

struct RiWindow {
  std::vector<EtaBlock> stages;
  GasPatch block;
};

/// Nests η blocks for each k of the schedule; each stage's full block is the
/// seed window of the next one.
inline RiWindow construct_ri_window(std::shared_ptr<const Catalog> catalog, int i,
                                    const std::vector<int>& schedule, std::int64_t window,
                                    const GasPatch& seed_patch, const EtaOptions& opt) {
  if (schedule.empty()) throw std::invalid_argument("construct_ri_window: empty schedule");
  for (std::size_t s = 1; s < schedule.size(); ++s)
    if (schedule[s] <= schedule[s - 1])
      throw std::invalid_argument("construct_ri_window: schedule must be strictly increasing");
  RiWindow out;
  GasPatch xi = seed_patch;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    EtaOptions o = opt;
    o.seed = hash_combine(opt.seed, s);
    EtaBlock eta = construct_eta(catalog, i, schedule[s], xi, o);
    xi = eta.block;
    out.stages.push_back(std::move(eta));
  }
  if (window < xi.radius())
    throw std::invalid_argument("construct_ri_window: window " + std::to_string(window) +
                                " smaller than the final radius " + std::to_string(xi.radius()));
  out.block = std::move(xi);
  return out;
}

inline World ri_world(std::shared_ptr<const Catalog> catalog, const RiWindow& ri) {
  return World(TableKind::gas, std::move(catalog), ri.block.source(1));
}

}  // namespace lorentz
