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

// File formats: catalogs, worlds and R_i construction specs as JSON, plus
// number formatting and hashing shared by every output.

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorentz/config.hpp"
#include "lorentz/dynamics.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/world.hpp"

namespace lorentz::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kCatalogFormat = "lorentz-catalog/1";
inline constexpr const char* kWorldFormat = "lorentz-world/1";
inline constexpr const char* kRiFormat = "lorentz-ri/1";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Malformed or unknown content in an input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << content;
  if (!out) throw IoError("write failed for " + p.string());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[std::size_t(i)] = digits[h & 15];
  return s;
}

inline std::string file_hash(const fs::path& p) { return hex64(fnv1a64(read_file(p))); }

/// Shortest decimal form that round-trips.
inline std::string fmt(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("fmt: to_chars failed");
  return std::string(buf, end);
}
inline std::string fmt(std::int64_t x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }

// ---------------------------------------------------------------------------
// strict JSON helpers

inline void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw FormatError(where + ": unknown key '" + it.key() + "'");
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline TableKind parse_kind(const json& j, const std::string& where) {
  const auto s = get_as<std::string>(j, where);
  if (s == "tube") return TableKind::tube;
  if (s == "gas") return TableKind::gas;
  throw FormatError(where + ": kind must be 'tube' or 'gas'");
}

// ---------------------------------------------------------------------------
// catalogs

inline json tolerances_json() {
  return {{"eps_tan", kTangencyTol},   {"t_min", kMinFlight},      {"eps_angle", kMinMeetingAngle},
          {"eps_clear", kClearanceTol}, {"r_min", kMinRadius}};
}

inline json catalog_to_json(const Catalog& cat) {
  json cells = json::array();
  for (const auto& c : cat.cells()) {
    json discs = json::array();
    for (const auto& d : c.discs()) discs.push_back({d.center.x, d.center.y, d.radius});
    json gates = json::array();
    for (const auto& g : c.gates()) gates.push_back({{"side", std::string(to_string(g.side))}, {"a", g.a}, {"b", g.b}});
    cells.push_back({{"id", c.id()}, {"blocking", c.blocking()}, {"discs", discs}, {"gates", gates}});
  }
  return {{"format", kCatalogFormat},
          {"kind", std::string(to_string(cat.kind()))},
          {"tolerances", tolerances_json()},
          {"cells", cells}};
}

/// Parses and builds a catalog (static conditions only; see validate_catalog).
inline std::shared_ptr<const Catalog> catalog_from_json(const json& j, const std::string& where = "catalog") {
  expect_keys(j, {"format", "kind", "tolerances", "cells", "comment"}, where);
  if (get_as<std::string>(require(j, "format", where), where + ".format") != kCatalogFormat)
    throw FormatError(where + ": format must be '" + std::string(kCatalogFormat) + "'");
  const TableKind kind = parse_kind(require(j, "kind", where), where + ".kind");
  if (auto it = j.find("tolerances"); it != j.end()) {
    const json expected = tolerances_json();
    expect_keys(*it, {"eps_tan", "t_min", "eps_angle", "eps_clear", "r_min"}, where + ".tolerances");
    for (auto t = it->begin(); t != it->end(); ++t)
      if (get_as<double>(*t, where + ".tolerances") != expected[t.key()].get<double>())
        throw FormatError(where + ".tolerances: '" + t.key() + "' differs from the built-in value " +
                          fmt(expected[t.key()].get<double>()));
  }
  const json& cells = require(j, "cells", where);
  if (!cells.is_array()) throw FormatError(where + ".cells: expected an array");
  std::vector<LocalConfiguration> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string w = where + ".cells[" + std::to_string(i) + "]";
    const json& c = cells[i];
    expect_keys(c, {"id", "blocking", "discs", "gates", "comment"}, w);
    const int id = get_as<int>(require(c, "id", w), w + ".id");
    const bool blocking = get_as<bool>(require(c, "blocking", w), w + ".blocking");
    std::vector<Disc> discs;
    for (const json& d : require(c, "discs", w)) {
      const auto v = get_as<std::vector<double>>(d, w + ".discs");
      if (v.size() != 3) throw FormatError(w + ".discs: each disc is [cx, cy, r]");
      discs.push_back({{v[0], v[1]}, v[2]});
    }
    std::vector<GateSpec> gates;
    for (const json& g : require(c, "gates", w)) {
      expect_keys(g, {"side", "a", "b"}, w + ".gates");
      const auto side = side_from_string(get_as<std::string>(require(g, "side", w), w + ".gates.side"));
      if (!side) throw FormatError(w + ".gates: unknown side");
      gates.push_back({*side, get_as<double>(require(g, "a", w), w + ".gates.a"),
                       get_as<double>(require(g, "b", w), w + ".gates.b")});
    }
    out.push_back(build_local_config(id, std::move(discs), std::move(gates), blocking));
    if (out.back().kind() != kind) throw FormatError(w + ": gate count does not match kind");
  }
  return std::make_shared<const Catalog>(std::move(out));
}

inline std::shared_ptr<const Catalog> load_catalog(const fs::path& p) {
  return catalog_from_json(parse_json(read_file(p), p.string()), p.string());
}

struct CellReport {
  ConfigId id = 0;
  bool claim = false;
  BlockingVerdict verdict;
  ShadowingVerdict shadow;
  bool ok = false;
};

/// Runs check_blocking and check_shadowing on every cell; a cell is ok when
/// the verdict matches its claim and its walls are shadowed.
inline std::vector<CellReport> validate_catalog(const Catalog& cat, int n_angles = 512,
                                                int n_offsets = 512, int n_shadow = 128) {
  std::vector<CellReport> out;
  for (const auto& c : cat.cells()) {
    CellReport r;
    r.id = c.id();
    r.claim = c.blocking();
    r.verdict = check_blocking(c, n_angles, n_offsets);
    r.shadow = check_shadowing(c, n_shadow);
    const BlockingKind want = r.claim ? BlockingKind::blocking : BlockingKind::non_blocking;
    r.ok = r.verdict.kind == want && r.shadow.shadowed;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// worlds

struct LoadedWorld {
  World world;
  fs::path catalog_path;
  fs::path world_path;
};

inline BlockSource::Extension parse_extension(const json& j, const std::string& where) {
  const auto s = get_as<std::string>(j, where);
  if (s == "constant") return BlockSource::Extension::constant;
  if (s == "periodic") return BlockSource::Extension::periodic;
  throw FormatError(where + ": extension must be 'constant' or 'periodic'");
}

inline CellSource source_from_json(const json& s, TableKind kind, const Catalog& cat,
                                   const std::string& where) {
  const auto type = get_as<std::string>(require(s, "type", where), where + ".type");
  auto check_id = [&](ConfigId id) {
    if (id < 1 || id > cat.size()) throw FormatError(where + ": configuration id " + std::to_string(id) + " out of range");
    return id;
  };
  if (type == "constant") {
    expect_keys(s, {"type", "id"}, where);
    return ConstantSource{check_id(get_as<int>(require(s, "id", where), where + ".id"))};
  }
  if (type == "word" || type == "block") {
    BlockSource b;
    if (type == "word") {
      if (kind != TableKind::tube) throw FormatError(where + ": 'word' sources are for tubes");
      expect_keys(s, {"type", "origin", "ids", "extension", "fill"}, where);
      b.origin = {get_as<std::int64_t>(require(s, "origin", where), where + ".origin"), 0};
      b.ids = get_as<std::vector<int>>(require(s, "ids", where), where + ".ids");
      b.width = std::int64_t(b.ids.size());
      b.height = 1;
    } else {
      expect_keys(s, {"type", "origin", "width", "height", "ids", "extension", "fill"}, where);
      const auto o = get_as<std::vector<std::int64_t>>(require(s, "origin", where), where + ".origin");
      if (o.size() != 2) throw FormatError(where + ".origin: expected [x, y]");
      b.origin = {o[0], o[1]};
      b.width = get_as<std::int64_t>(require(s, "width", where), where + ".width");
      b.height = get_as<std::int64_t>(require(s, "height", where), where + ".height");
      b.ids = get_as<std::vector<int>>(require(s, "ids", where), where + ".ids");
      if (b.width < 1 || b.height < 1 || std::int64_t(b.ids.size()) != b.width * b.height)
        throw FormatError(where + ": ids must hold width x height entries");
    }
    if (b.ids.empty()) throw FormatError(where + ".ids: empty");
    for (ConfigId id : b.ids) check_id(id);
    b.extension = s.contains("extension") ? parse_extension(s["extension"], where + ".extension")
                                          : BlockSource::Extension::constant;
    b.fill = s.contains("fill") ? check_id(get_as<int>(s["fill"], where + ".fill")) : 1;
    return b;
  }
  if (type == "bernoulli") {
    expect_keys(s, {"type", "probabilities", "seed"}, where);
    BernoulliSpec spec;
    spec.probabilities = get_as<std::vector<double>>(require(s, "probabilities", where), where + ".probabilities");
    spec.seed = get_as<std::uint64_t>(require(s, "seed", where), where + ".seed");
    auto shared = std::shared_ptr<const Catalog>(&cat, [](const Catalog*) {});
    return bernoulli_world(spec, shared).source();
  }
  throw FormatError(where + ": unknown source type '" + type + "'");
}

inline json source_to_json(const CellSource& src) {
  return std::visit([](const auto& s) -> json {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ConstantSource>) {
      return {{"type", "constant"}, {"id", s.id}};
    } else if constexpr (std::is_same_v<T, BlockSource>) {
      const std::string ext = s.extension == BlockSource::Extension::periodic ? "periodic" : "constant";
      return {{"type", "block"}, {"origin", {s.origin.x, s.origin.y}}, {"width", s.width},
              {"height", s.height}, {"ids", s.ids}, {"extension", ext}, {"fill", s.fill}};
    } else {
      return {{"type", "bernoulli"}, {"probabilities", s.probabilities}, {"seed", s.seed}};
    }
  }, src);
}

/// World file JSON; `catalog_ref` is stored verbatim (usually a relative path).
inline json world_to_json(const World& w, const std::string& catalog_ref) {
  json j = {{"format", kWorldFormat},
            {"catalog", catalog_ref},
            {"kind", std::string(to_string(w.kind()))},
            {"source", source_to_json(w.source())}};
  if (w.wrap()) j["wrap"] = {{"period_x", w.wrap()->period_x}, {"period_y", w.wrap()->period_y}};
  return j;
}

/// Loads a world file; its catalog path is resolved relative to the file.
inline LoadedWorld load_world(const fs::path& p) {
  const std::string where = p.string();
  const json j = parse_json(read_file(p), where);
  expect_keys(j, {"format", "catalog", "kind", "source", "wrap", "comment"}, where);
  if (get_as<std::string>(require(j, "format", where), where + ".format") != kWorldFormat)
    throw FormatError(where + ": format must be '" + std::string(kWorldFormat) + "'");
  const fs::path cat_path = p.parent_path() / get_as<std::string>(require(j, "catalog", where), where + ".catalog");
  auto cat = load_catalog(cat_path);
  const TableKind kind = parse_kind(require(j, "kind", where), where + ".kind");
  if (cat->kind() != kind) throw FormatError(where + ": world kind does not match its catalog");
  CellSource src = source_from_json(require(j, "source", where), kind, *cat, where + ".source");
  std::optional<TorusWrap> wrap;
  if (auto it = j.find("wrap"); it != j.end()) {
    expect_keys(*it, {"period_x", "period_y"}, where + ".wrap");
    wrap = TorusWrap{get_as<std::int64_t>(require(*it, "period_x", where), where + ".wrap.period_x"),
                     it->contains("period_y") ? get_as<std::int64_t>((*it)["period_y"], where + ".wrap.period_y") : 1};
  }
  return {World(kind, cat, std::move(src), wrap), cat_path, p};
}

// ---------------------------------------------------------------------------
// R_i construction specs

struct RiSpec {
  fs::path catalog_path;
  int i = 1;
  std::vector<int> schedule;
  std::int64_t window = 0;
  GasPatch xi;
  EtaOptions options;
};

inline RiSpec load_ri_spec(const fs::path& p) {
  const std::string where = p.string();
  const json j = parse_json(read_file(p), where);
  expect_keys(j, {"format", "catalog", "i", "schedule", "window", "seed", "n", "max_rho2", "xi", "comment"}, where);
  if (get_as<std::string>(require(j, "format", where), where + ".format") != kRiFormat)
    throw FormatError(where + ": format must be '" + std::string(kRiFormat) + "'");
  RiSpec s;
  s.catalog_path = p.parent_path() / get_as<std::string>(require(j, "catalog", where), where + ".catalog");
  s.i = get_as<int>(require(j, "i", where), where + ".i");
  s.schedule = get_as<std::vector<int>>(require(j, "schedule", where), where + ".schedule");
  s.window = get_as<std::int64_t>(require(j, "window", where), where + ".window");
  s.options.seed = get_as<std::uint64_t>(require(j, "seed", where), where + ".seed");
  if (j.contains("n")) s.options.n = get_as<std::int64_t>(j["n"], where + ".n");
  if (j.contains("max_rho2")) s.options.max_rho2 = get_as<std::int64_t>(j["max_rho2"], where + ".max_rho2");
  const json& xi = require(j, "xi", where);
  expect_keys(xi, {"radius", "fill", "cells"}, where + ".xi");
  const auto radius = get_as<std::int64_t>(require(xi, "radius", where), where + ".xi.radius");
  const int fill = xi.contains("fill") ? get_as<int>(xi["fill"], where + ".xi.fill") : 1;
  s.xi = GasPatch(radius, fill);
  if (xi.contains("cells")) {
    for (const json& c : xi["cells"]) {
      const auto v = get_as<std::vector<std::int64_t>>(c, where + ".xi.cells");
      if (v.size() != 3) throw FormatError(where + ".xi.cells: each entry is [x, y, id]");
      if (!s.xi.contains({v[0], v[1]})) throw FormatError(where + ".xi.cells: cell outside the radius");
      s.xi.set({v[0], v[1]}, ConfigId(v[2]));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// orbit log

inline constexpr const char* kOrbitHeader = "# step cell_x cell_y arc qx qy vx vy tau singular\n";

inline std::string orbit_row(std::int64_t step, const LineElement& x, double tau, SingularKind s) {
  std::string r;
  r += fmt(step) + ' ' + fmt(x.cell.x) + ' ' + fmt(x.cell.y) + ' ' + fmt(x.arc) + ' ';
  r += fmt(x.q.x) + ' ' + fmt(x.q.y) + ' ' + fmt(x.v.x()) + ' ' + fmt(x.v.y()) + ' ';
  r += fmt(tau) + ' ' + std::string(to_string(s)) + '\n';
  return r;
}

}  // namespace lorentz::io
