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

// Infinite tables assembled from words over a catalog.
//
// A World never materializes its cells. The configuration of cell n is a pure
// function of n, so orbits can wander arbitrarily far without precomputation
// and any number of threads may query the same world.

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lorentz/config.hpp"

namespace lorentz {

/// Lattice index of a cell; tubes use y == 0.
struct CellIndex {
  std::int64_t x = 0;
  std::int64_t y = 0;

  constexpr CellIndex operator+(CellIndex o) const { return {x + o.x, y + o.y}; }
  constexpr CellIndex operator-(CellIndex o) const { return {x - o.x, y - o.y}; }
  constexpr auto operator<=>(const CellIndex&) const = default;
};

/// ‖n‖ = |n1| + |n2|.
constexpr std::int64_t l1_norm(CellIndex n) {
  return (n.x < 0 ? -n.x : n.x) + (n.y < 0 ? -n.y : n.y);
}

inline Vec2 cell_offset(CellIndex n) { return {double(n.x), double(n.y)}; }

/// Stateless 64-bit mixer (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ mix64(v + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit_interval(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

struct ConstantSource {
  ConfigId id = 1;
};

/// A finite rectangular block of ids anchored at `origin`, extended either by
/// a constant fill or periodically. Tubes use height 1.
struct BlockSource {
  enum class Extension { constant, periodic };

  CellIndex origin;
  std::int64_t width = 1;
  std::int64_t height = 1;
  std::vector<ConfigId> ids;  // row-major, ids[y * width + x]
  Extension extension = Extension::constant;
  ConfigId fill = 1;

  ConfigId at(CellIndex n) const {
    std::int64_t dx = n.x - origin.x;
    std::int64_t dy = n.y - origin.y;
    if (extension == Extension::periodic) {
      dx = ((dx % width) + width) % width;
      dy = ((dy % height) + height) % height;
    } else if (dx < 0 || dx >= width || dy < 0 || dy >= height) {
      return fill;
    }
    return ids[std::size_t(dy * width + dx)];
  }
};

/// i.i.d. configurations: the id of cell n is the inverse CDF of `cumulative`
/// evaluated at a hash of (seed, n).
struct BernoulliSource {
  std::vector<double> probabilities;
  std::vector<double> cumulative;
  std::uint64_t seed = 0;

  ConfigId at(CellIndex n) const {
    const std::uint64_t h =
        hash_combine(hash_combine(mix64(seed), std::uint64_t(n.x)), std::uint64_t(n.y));
    const double u = to_unit_interval(h);
    for (std::size_t a = 0; a + 1 < cumulative.size(); ++a)
      if (u < cumulative[a]) return ConfigId(a + 1);
    return ConfigId(cumulative.size());
  }
};

using CellSource = std::variant<ConstantSource, BlockSource, BernoulliSource>;

/// Periodic identification of cells for finite-measure approximants. This is
/// a testing device, not part of the tube/gas model.
struct TorusWrap {
  std::int64_t period_x = 1;
  std::int64_t period_y = 1;
};

class World {
 public:
  World(TableKind kind, std::shared_ptr<const Catalog> catalog, CellSource source,
        std::optional<TorusWrap> wrap = std::nullopt)
      : kind_(kind), catalog_(std::move(catalog)), source_(std::move(source)), wrap_(wrap) {
    if (!catalog_) throw std::invalid_argument("World: null catalog");
    if (catalog_->kind() != kind_) throw std::invalid_argument("World: catalog kind mismatch");
    if (wrap_ && (wrap_->period_x < 1 || wrap_->period_y < 1))
      throw std::invalid_argument("World: torus periods must be positive");
    if (kind_ == TableKind::tube && wrap_) wrap_->period_y = 1;
  }

  TableKind kind() const { return kind_; }
  const Catalog& catalog() const { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const { return catalog_; }
  const CellSource& source() const { return source_; }
  const std::optional<TorusWrap>& wrap() const { return wrap_; }

  /// Representative of n in the fundamental domain when wrapped, else n.
  CellIndex canonical(CellIndex n) const {
    if (kind_ == TableKind::tube) n.y = 0;
    if (!wrap_) return n;
    auto mod = [](std::int64_t a, std::int64_t p) { return ((a % p) + p) % p; };
    return {mod(n.x, wrap_->period_x), mod(n.y, wrap_->period_y)};
  }

  ConfigId cell_at(CellIndex n) const {
    const CellIndex c = canonical(n);
    return std::visit([&](const auto& s) -> ConfigId {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ConstantSource>) {
        return s.id;
      } else {
        return s.at(c);
      }
    }, source_);
  }
  ConfigId cell_at(std::int64_t n) const { return cell_at(CellIndex{n, 0}); }

  const LocalConfiguration& config_at(CellIndex n) const { return catalog_->at(cell_at(n)); }
  bool blocking_at(CellIndex n) const { return catalog_->blocking(cell_at(n)); }

 private:
  TableKind kind_;
  std::shared_ptr<const Catalog> catalog_;
  CellSource source_;
  std::optional<TorusWrap> wrap_;
};

/// Tube over an explicit finite word starting at cell `offset`.
inline World make_word_world(std::shared_ptr<const Catalog> catalog, std::vector<ConfigId> word,
                             std::int64_t offset = 0, ConfigId fill = 1, bool periodic = false) {
  if (word.empty()) throw std::invalid_argument("make_word_world: empty word");
  BlockSource b;
  b.origin = {offset, 0};
  b.width = std::int64_t(word.size());
  b.height = 1;
  b.ids = std::move(word);
  b.fill = fill;
  b.extension = periodic ? BlockSource::Extension::periodic : BlockSource::Extension::constant;
  return World(TableKind::tube, std::move(catalog), std::move(b));
}

class UnboundedSearch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gap sequences of a tube around its shifted origin cell (first blocking cell n >= 0).
/// Index 0 holds g_0 = f_0 = 0; entries 1..J follow the recursion.
struct GapProfile {
  std::int64_t origin = 0;  // absolute index of the blocking cell used as C_0
  std::vector<std::int64_t> g_plus;
  std::vector<std::int64_t> g_minus;
  std::vector<std::int64_t> f_plus;   // f_j^+ = +sum_{i<=j} g_i^+
  std::vector<std::int64_t> f_minus;  // f_j^- = -sum_{i<=j} g_i^-
  double K = 0.0;                     // max_j max(g_j^+, g_j^-) / j

  std::int64_t J() const { return std::int64_t(g_plus.size()) - 1; }
  /// Absolute cell range [origin + f_t^-, origin + f_t^+].
  std::pair<std::int64_t, std::int64_t> confinement(std::int64_t t) const {
    return {origin + f_minus.at(std::size_t(t)), origin + f_plus.at(std::size_t(t))};
  }
};

inline constexpr std::int64_t kDefaultScanLimit = 1'000'000;

/// Computes g_j^± for j = 0..J. The origin is the first blocking cell at or to
/// the right of cell 0; a word whose cell 0 is already blocking is unchanged.
inline GapProfile gap_profile(const World& world, std::int64_t J,
                              std::int64_t scan_limit = kDefaultScanLimit) {
  if (world.kind() != TableKind::tube) throw std::invalid_argument("gap_profile: tube world required");
  if (J < 0) throw std::invalid_argument("gap_profile: J must be non-negative");
  GapProfile p;
  std::int64_t origin = 0;
  while (!world.blocking_at({origin, 0})) {
    if (++origin > scan_limit) throw UnboundedSearch("no blocking cell to the right of cell 0");
  }
  p.origin = origin;

  auto fill = [&](int sign, std::vector<std::int64_t>& g, std::vector<std::int64_t>& f) {
    g.assign(std::size_t(J + 1), 0);
    f.assign(std::size_t(J + 1), 0);
    std::int64_t sum = 0;
    for (std::int64_t j = 1; j <= J; ++j) {
      std::int64_t k = 1;
      while (!world.blocking_at({origin + sign * (sum + k), 0})) {
        if (++k > scan_limit)
          throw UnboundedSearch("no blocking cell within the scan limit after f_" +
                                std::to_string(j - 1));
      }
      g[std::size_t(j)] = k;
      sum += k;
      f[std::size_t(j)] = sign * sum;
    }
  };
  fill(+1, p.g_plus, p.f_plus);
  fill(-1, p.g_minus, p.f_minus);
  for (std::int64_t j = 1; j <= J; ++j) {
    const auto jj = std::size_t(j);
    p.K = std::max(p.K, double(std::max(p.g_plus[jj], p.g_minus[jj])) / double(j));
  }
  return p;
}

struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Σ_{‖n‖>R} 2^{-‖n‖} over Z^2. There are 4k cells with ‖n‖ = k >= 1 and
/// Σ_{k>R} k 2^{-k} = (R + 2) 2^{-R}.
inline double metric_tail(int R) { return 4.0 * double(R + 2) * std::ldexp(1.0, -R); }

/// Bounds on dist(λ, λ') = Σ_n 2^{-‖n‖}|λ_n - λ'_n| from the window ‖n‖ <= R.
inline DistanceBounds dist_truncated(const World& a, const World& b, int R) {
  if (R < 0) throw std::invalid_argument("dist_truncated: R must be non-negative");
  if (a.kind() != TableKind::gas || b.kind() != TableKind::gas)
    throw std::invalid_argument("dist_truncated: gas worlds required");
  DistanceBounds d;
  for (int r = 0; r <= R; ++r) {
    const double w = std::ldexp(1.0, -r);
    double ring = 0.0;
    for (int x = -r; x <= r; ++x) {
      const int yabs = r - std::abs(x);
      for (int y : {yabs, -yabs}) {
        ring += std::abs(a.cell_at({x, y}) - b.cell_at({x, y}));
        if (yabs == 0) break;
      }
    }
    d.lower += w * ring;
  }
  const int m = std::max(a.catalog().size(), b.catalog().size());
  d.upper = d.lower + double(m - 1) * metric_tail(R);
  return d;
}

/// Cells of the ‖n‖ = r rhombus, starting at (r, 0) and running
/// counter-clockwise.
inline std::vector<CellIndex> rhombus(std::int64_t r) {
  if (r == 0) return {{0, 0}};
  std::vector<CellIndex> out;
  out.reserve(std::size_t(4 * r));
  for (std::int64_t k = 0; k < r; ++k) out.push_back({r - k, k});
  for (std::int64_t k = 0; k < r; ++k) out.push_back({-k, r - k});
  for (std::int64_t k = 0; k < r; ++k) out.push_back({-(r - k), -k});
  for (std::int64_t k = 0; k < r; ++k) out.push_back({k, -(r - k)});
  return out;
}

/// True when ‖n‖ = j^2 for some j >= i, i.e. n lies outside Z_i.
inline bool on_blocking_circle(CellIndex n, int i) {
  const std::int64_t r = l1_norm(n);
  const auto j = std::int64_t(std::llround(std::sqrt(double(r))));
  for (std::int64_t c = std::max<std::int64_t>(j - 1, 1); c <= j + 1; ++c)
    if (c * c == r) return c >= i;
  return false;
}

struct CircleVerdict {
  bool pass = true;
  std::optional<CellIndex> violation;
  std::int64_t checked = 0;
};

/// Checks λ_n = 1 at every n outside Z_i with ‖n‖ <= window, in order of
/// increasing radius.
inline CircleVerdict verify_blocking_circles(const World& world, int i, std::int64_t window) {
  if (world.kind() != TableKind::gas) throw std::invalid_argument("verify_blocking_circles: gas world required");
  if (i < 1) throw std::invalid_argument("verify_blocking_circles: i must be positive");
  CircleVerdict v;
  for (std::int64_t j = i; j * j <= window; ++j) {
    for (const CellIndex n : rhombus(j * j)) {
      ++v.checked;
      if (world.cell_at(n) != 1) {
        v.pass = false;
        v.violation = n;
        return v;
      }
    }
  }
  return v;
}

}  // namespace lorentz
