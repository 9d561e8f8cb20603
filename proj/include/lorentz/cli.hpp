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

// Command-line front end. Every run writes its tables into --out together
// with manifest.json, which `replay` can re-execute.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lorentz/analysis.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/io.hpp"
#include "lorentz/parallel.hpp"

#ifndef LORENTZ_VERSION
#define LORENTZ_VERSION "0.0.0"
#endif

namespace lorentz::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using io::fmt;

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsage = 2,
  kGuardExhausted = 3,
  kIoError = 4,
};

inline constexpr const char* kManifestFormat = "lorentz-manifest/1";

/// Options that name input files; stored as absolute paths in manifests.
inline const std::vector<std::string>& path_options() {
  static const std::vector<std::string> v{"--world", "--other", "--catalog", "--spec"};
  return v;
}

/// Accumulates what a run read and wrote.
struct Run {
  fs::path out;
  int workers = 1;
  Guards guards;
  json parameters = json::object();
  json inputs = json::object();  // path -> hash
  std::vector<std::string> outputs;
  std::ostream* log = nullptr;

  void input(const fs::path& p) { inputs[fs::absolute(p).lexically_normal().string()] = io::file_hash(p); }
  void write(const std::string& name, const std::string& content) {
    io::write_file(out / name, content);
    outputs.push_back(name);
  }
};

inline CellIndex parse_cell(const std::string& s) {
  CellIndex c;
  const auto comma = s.find(',');
  try {
    c.x = std::stoll(s.substr(0, comma));
    if (comma != std::string::npos) c.y = std::stoll(s.substr(comma + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad cell '" + s + "' (expected x or x,y)");
  }
  return c;
}

inline void add_guards(CLI::App* sub, Guards& g) {
  sub->add_option("--max-cells", g.max_cells, "cells a single free flight may cross")->capture_default_str();
  sub->add_option("--max-length", g.max_length, "longest free flight, cell units")->capture_default_str();
}

inline json guards_json(const Guards& g) { return {{"max_cells", g.max_cells}, {"max_length", g.max_length}}; }

// ---------------------------------------------------------------------------
// subcommands

inline int run_validate(Run& run, const std::string& catalog, int angles, int offsets, int shadow) {
  run.input(catalog);
  auto cat = io::load_catalog(catalog);
  const auto reports = io::validate_catalog(*cat, angles, offsets, shadow);
  std::string csv = "id,claim,verdict,clearance,shadowed,ok\n";
  bool all_ok = true;
  for (const auto& r : reports) {
    csv += fmt(r.id) + ',' + (r.claim ? "blocking" : "non_blocking") + ',' +
           std::string(to_string(r.verdict.kind)) + ',' + fmt(r.verdict.clearance) + ',' +
           (r.shadow.shadowed ? "yes" : "no") + ',' + (r.ok ? "yes" : "no") + '\n';
    *run.log << "cell " << r.id << ": " << to_string(r.verdict.kind) << " clearance " << fmt(r.verdict.clearance)
             << (r.shadow.shadowed ? ", shadowed" : ", NOT shadowed") << (r.ok ? "" : "  <-- mismatch") << '\n';
    all_ok = all_ok && r.ok;
  }
  run.write("validate.csv", csv);
  return all_ok ? kOk : kValidationFailure;
}

inline int run_gaps(Run& run, const std::string& world_file, std::int64_t J, std::int64_t scan_limit) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  const GapProfile p = gap_profile(lw.world, J, scan_limit);
  std::string csv = "j,g_plus,g_minus,f_plus,f_minus\n";
  for (std::int64_t j = 0; j <= J; ++j) {
    const auto jj = std::size_t(j);
    csv += fmt(j) + ',' + fmt(p.g_plus[jj]) + ',' + fmt(p.g_minus[jj]) + ',' + fmt(p.f_plus[jj]) + ',' +
           fmt(p.f_minus[jj]) + '\n';
  }
  run.write("gaps.csv", csv);
  run.write("gaps_summary.json", json{{"origin", p.origin}, {"J", J}, {"K", p.K}}.dump(2) + "\n");
  *run.log << "origin " << p.origin << ", K = " << fmt(p.K) << '\n';
  return kOk;
}

inline int run_dist(Run& run, const std::string& a, const std::string& b, const std::vector<int>& radii) {
  run.input(a);
  run.input(b);
  const auto wa = io::load_world(a);
  const auto wb = io::load_world(b);
  std::string csv = "R,lower,upper\n";
  for (int R : radii) {
    const auto d = dist_truncated(wa.world, wb.world, R);
    csv += fmt(R) + ',' + fmt(d.lower) + ',' + fmt(d.upper) + '\n';
    *run.log << "R = " << R << ": " << fmt(d.lower) << " <= dist <= " << fmt(d.upper) << '\n';
  }
  run.write("dist.csv", csv);
  return kOk;
}

inline int run_bernoulli(Run& run, const std::string& catalog, const std::vector<double>& p,
                         std::uint64_t seed, std::int64_t window) {
  run.input(catalog);
  auto cat = io::load_catalog(catalog);
  const World w = bernoulli_world({p, seed}, cat);
  const fs::path rel = fs::relative(fs::absolute(catalog), fs::absolute(run.out));
  run.write("world.json", io::world_to_json(w, rel.generic_string()).dump(2) + "\n");
  std::string csv;
  if (w.kind() == TableKind::tube) {
    csv = "x,id\n";
    for (std::int64_t x = -window; x <= window; ++x) csv += fmt(x) + ',' + fmt(w.cell_at(x)) + '\n';
  } else {
    csv = "x,y,id\n";
    for (std::int64_t y = -window; y <= window; ++y)
      for (std::int64_t x = -window; x <= window; ++x)
        csv += fmt(x) + ',' + fmt(y) + ',' + fmt(w.cell_at({x, y})) + '\n';
  }
  run.write("cells.csv", csv);
  return kOk;
}

inline int run_construct_ri(Run& run, const std::string& spec_file) {
  run.input(spec_file);
  io::RiSpec spec = io::load_ri_spec(spec_file);
  run.input(spec.catalog_path);
  auto cat = io::load_catalog(spec.catalog_path);
  spec.options.workers = run.workers;
  spec.options.guards = run.guards;
  const RiWindow ri = construct_ri_window(cat, spec.i, spec.schedule, spec.window, spec.xi, spec.options);
  std::string stages = "stage,k,rho1,rho2,rho,invariants\n";
  std::string estimates = "stage,k,rho2,p_hat,se\n";
  bool ok = true;
  for (std::size_t s = 0; s < ri.stages.size(); ++s) {
    const EtaBlock& e = ri.stages[s];
    const auto inv = check_eta_invariants(e, *cat);
    ok = ok && inv.ok;
    stages += fmt(std::int64_t(s)) + ',' + fmt(e.k) + ',' + fmt(e.rho1) + ',' + fmt(e.rho2) + ',' + fmt(e.rho) + ',' +
              (inv.ok ? "ok" : inv.message) + '\n';
    for (const auto& r : e.estimates)
      estimates += fmt(std::int64_t(s)) + ',' + fmt(e.k) + ',' + fmt(r.rho2) + ',' + fmt(r.p_hat) + ',' + fmt(r.se) + '\n';
    *run.log << "stage " << s << " (k = " << e.k << "): rho1 " << e.rho1 << ", rho2 " << e.rho2 << ", rho " << e.rho
             << '\n';
  }
  const World w = ri_world(cat, ri);
  const auto circles = verify_blocking_circles(w, spec.i, spec.window);
  ok = ok && circles.pass;
  const fs::path rel = fs::relative(fs::absolute(spec.catalog_path), fs::absolute(run.out));
  run.write("world.json", io::world_to_json(w, rel.generic_string()).dump(2) + "\n");
  run.write("stages.csv", stages);
  run.write("estimates.csv", estimates);
  *run.log << "blocking circles: " << (circles.pass ? "pass" : "FAIL") << " (" << circles.checked << " cells)\n";
  return ok ? kOk : kValidationFailure;
}

inline int flight_exit(FlightStatus s) {
  switch (s) {
    case FlightStatus::guard_exceeded: return kGuardExhausted;
    case FlightStatus::wall_hit: return kValidationFailure;
    default: return kOk;
  }
}

inline int run_orbit_cmd(Run& run, const std::string& world_file, std::int64_t steps, std::uint64_t seed,
                         const std::string& cell) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  const World& w = lw.world;
  const auto sample = sample_mu(w, {parse_cell(cell)}, 1, seed);
  std::string log = io::kOrbitHeader;
  log += io::orbit_row(0, sample.elements[0], 0.0, SingularKind::none);
  std::int64_t t = 0;
  auto summary = run_orbit(w, sample.elements[0], steps, [&](const CollisionEvent& e) {
    log += io::orbit_row(++t, e.to, e.tau, e.singular);
    return true;
  }, run.guards);
  if (summary.status == FlightStatus::singular) {
    // record the offending flight
    const FlightResult r = next_collision(w, summary.last, run.guards);
    log += io::orbit_row(t + 1, r.event.to, r.event.tau, r.event.singular);
  }
  run.write("orbit.txt", log);
  run.write("orbit_summary.json",
            json{{"steps", summary.steps}, {"status", std::string(to_string(summary.status))}}.dump(2) + "\n");
  *run.log << summary.steps << " collisions, status " << to_string(summary.status) << '\n';
  return flight_exit(summary.status);
}

inline int run_recurrence(Run& run, const std::string& world_file, std::int64_t n, std::int64_t t_max,
                          std::uint64_t seed, const std::string& cell) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  const World& w = lw.world;
  RecurrenceOptions o;
  o.n = n;
  o.t_max = t_max;
  o.seed = seed;
  o.guards = run.guards;
  o.workers = run.workers;
  std::optional<GapProfile> profile;
  CellIndex start = cell.empty() ? CellIndex{0, 0} : parse_cell(cell);
  if (w.kind() == TableKind::tube && cell.empty()) {
    profile = gap_profile(w, t_max);
    o.profile = &*profile;
    start = {profile->origin, 0};
  }
  const auto st = recurrence_stats(w, {start}, o);
  std::string csv = "t,r\n";
  for (std::size_t t = 0; t < st.r.size(); ++t) csv += fmt(std::int64_t(t)) + ',' + fmt(st.r[t]) + '\n';
  run.write("recurrence.csv", csv);
  json summary = {{"start", {start.x, start.y}},
                  {"orbits", st.n},
                  {"terminated", st.terminated},
                  {"confinement_checked", bool(profile)},
                  {"confinement_violations", st.confinement_violations}};
  run.write("recurrence_summary.json", summary.dump(2) + "\n");
  *run.log << "r(" << t_max << ") = " << fmt(st.r.back()) << ", confinement violations "
           << st.confinement_violations << '\n';
  return kOk;
}

inline int run_escape(Run& run, const std::string& world_file, std::int64_t rho1, const std::vector<std::int64_t>& rho2s,
                      const std::string& center, std::int64_t n, std::uint64_t seed, std::int64_t max_steps) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  EscapeOptions o;
  o.n = n;
  o.seed = seed;
  o.guards = run.guards;
  o.workers = run.workers;
  o.max_steps = max_steps;
  std::string csv = "rho1,rho2,p_hat,se,n,escapes,conservative\n";
  for (std::int64_t r2 : rho2s) {
    const auto e = escape_measure(lw.world, rho1, r2, parse_cell(center), o);
    csv += fmt(rho1) + ',' + fmt(r2) + ',' + fmt(e.p_hat) + ',' + fmt(e.se) + ',' + fmt(e.n) + ',' + fmt(e.escapes) +
           ',' + fmt(e.conservative) + '\n';
    *run.log << "rho2 = " << r2 << ": p_hat " << fmt(e.p_hat) << " +- " << fmt(e.se) << '\n';
  }
  run.write("escape.csv", csv);
  return kOk;
}

inline int run_lyapunov(Run& run, const std::string& world_file, std::int64_t orbits, std::int64_t steps,
                        std::uint64_t seed, const std::string& cell, bool reversed) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  LyapunovOptions o;
  o.n_orbits = orbits;
  o.n_steps = steps;
  o.seed = seed;
  o.reversed = reversed;
  o.guards = run.guards;
  o.workers = run.workers;
  const auto e = lyapunov_estimate(lw.world, {parse_cell(cell)}, o);
  run.write("lyapunov.csv", "lambda,ci_low,ci_high,sd,orbits,resampled\n" + fmt(e.lambda) + ',' + fmt(e.ci_low) + ',' +
                                fmt(e.ci_high) + ',' + fmt(e.sd) + ',' + fmt(std::int64_t(e.per_orbit.size())) + ',' +
                                fmt(e.resampled) + '\n');
  std::string per = "orbit,lambda\n";
  for (std::size_t i = 0; i < e.per_orbit.size(); ++i) per += fmt(std::int64_t(i)) + ',' + fmt(e.per_orbit[i]) + '\n';
  run.write("lyapunov_orbits.csv", per);
  *run.log << "lambda_hat = " << fmt(e.lambda) << " [" << fmt(e.ci_low) << ", " << fmt(e.ci_high) << "]\n";
  return kOk;
}

inline int run_horizon(Run& run, const std::string& world_file, const std::vector<std::int64_t>& window, int angles,
                       int offsets, double min_witness) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  if (window.size() != 2 && window.size() != 4) throw std::invalid_argument("--window expects x0,x1 or x0,x1,y0,y1");
  CellWindow win{window[0], window[1], window.size() == 4 ? window[2] : 0, window.size() == 4 ? window[3] : 0};
  const auto h = horizon_scan(lw.world, win, angles, offsets, min_witness);
  std::string csv = "max_free_flight,exceeds_window,lines,wx0,wy0,wx1,wy1\n";
  csv += fmt(h.max_free_flight) + ',' + (h.exceeds_window ? "yes" : "no") + ',' + fmt(h.lines);
  if (h.witness)
    csv += ',' + fmt(h.witness->from.x) + ',' + fmt(h.witness->from.y) + ',' + fmt(h.witness->to.x) + ',' +
           fmt(h.witness->to.y);
  else
    csv += ",,,,";
  csv += '\n';
  run.write("horizon.csv", csv);
  std::string cor = "x0,y0,x1,y1,length\n";
  for (const auto& c : h.corridors)
    cor += fmt(c.from.x) + ',' + fmt(c.from.y) + ',' + fmt(c.to.x) + ',' + fmt(c.to.y) + ',' + fmt(c.length) + '\n';
  run.write("corridors.csv", cor);
  *run.log << "max free flight " << fmt(h.max_free_flight) << (h.exceeds_window ? " (a line crosses the window)" : "")
           << '\n';
  return kOk;
}

inline int run_singularities(Run& run, const std::string& world_file, const std::vector<std::int64_t>& ts,
                             double delta, std::int64_t orbits, std::uint64_t seed) {
  run.input(world_file);
  const auto lw = io::load_world(world_file);
  run.input(lw.catalog_path);
  SingularityOptions o;
  o.delta = delta;
  o.n_orbits = orbits;
  o.seed = seed;
  o.guards = run.guards;
  o.workers = run.workers;
  if (ts.empty()) throw std::invalid_argument("--t needs at least one value");
  const auto profile = gap_profile(lw.world, *std::max_element(ts.begin(), ts.end()) + 1);
  const auto g = singularity_growth(lw.world, profile, ts, o);
  std::string csv = "t,count,bound\n";
  bool within = true;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    csv += fmt(g.t[i]) + ',' + fmt(g.count[i]) + ',' + fmt(g.bound[i]) + '\n';
    within = within && g.count[i] <= g.bound[i];
  }
  run.write("singularities.csv", csv);
  run.write("singularities_summary.json",
            json{{"slope", std::isnan(g.slope) ? json(nullptr) : json(g.slope)},
                 {"terminated", g.terminated},
                 {"within_bound", within}}
                    .dump(2) + "\n");
  *run.log << "log-log slope " << (std::isnan(g.slope) ? std::string("n/a") : fmt(g.slope)) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// driver

int execute(std::vector<std::string> args, std::ostream& out, std::ostream& err);

inline json load_manifest(const fs::path& p) { return io::parse_json(io::read_file(p), p.string()); }

inline int run_replay(const std::string& manifest_file, const fs::path& out_dir, int workers, bool workers_set,
                      std::ostream& out, std::ostream& err) {
  const json m = load_manifest(manifest_file);
  if (m.value("format", "") != kManifestFormat) throw io::FormatError(manifest_file + ": not a run manifest");
  for (auto it = m.at("inputs").begin(); it != m.at("inputs").end(); ++it) {
    if (io::file_hash(it.key()) != it.value().get<std::string>()) {
      err << "replay: input " << it.key() << " changed since the manifest was written\n";
      return kIoError;
    }
  }
  std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
  args.push_back("--out");
  args.push_back(fs::absolute(out_dir).string());
  args.push_back("--workers");
  args.push_back(std::to_string(workers_set ? workers : m.at("workers").get<int>()));
  const int code = execute(args, out, err);
  if (code != m.at("exit_code").get<int>()) {
    err << "replay: exit code " << code << " differs from the recorded " << m.at("exit_code").get<int>() << '\n';
    return kValidationFailure;
  }
  int mismatches = 0;
  for (auto it = m.at("outputs").begin(); it != m.at("outputs").end(); ++it) {
    const fs::path p = out_dir / it.key();
    if (!fs::exists(p) || io::file_hash(p) != it.value().get<std::string>()) {
      err << "replay: " << it.key() << " differs\n";
      ++mismatches;
    }
  }
  out << "replay: " << m.at("outputs").size() - std::size_t(mismatches) << " of " << m.at("outputs").size()
      << " outputs identical\n";
  return mismatches == 0 ? kOk : kValidationFailure;
}

inline int execute(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and construction kit for aperiodic Lorentz tubes and gases", "lorentz"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LORENTZ_VERSION);

  std::string out_dir;
  int workers = default_workers();
  Guards guards;
  auto common = [&](CLI::App* sub, bool guards_too) {
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--workers", workers, "worker threads (default $LORENTZ_WORKERS or all cores)");
    if (guards_too) add_guards(sub, guards);
  };

  std::string world, other, catalog, spec, cell = "0,0", center = "0,0", manifest;
  int angles = 512, offsets = 512, shadow = 128;
  std::int64_t J = 1000, scan_limit = kDefaultScanLimit, window_r = 10, steps = 1000, n = 1000, t_max = 1000;
  std::int64_t orbits = 100, rho1 = 0, max_steps = 1'000'000;
  std::vector<int> radii{4, 8, 16};
  std::vector<double> probs;
  std::vector<std::int64_t> rho2s, window, ts{100, 1000};
  std::uint64_t seed = 1;
  bool reversed = false;
  double delta = 1e-4, min_witness = 0.0;

  auto* validate = app.add_subcommand("validate", "check a catalog against conditions A1-A5 and shadowing");
  validate->add_option("--catalog", catalog, "catalog file")->required();
  validate->add_option("--angles", angles)->capture_default_str();
  validate->add_option("--offsets", offsets)->capture_default_str();
  validate->add_option("--shadow", shadow, "shadowing samples per gate/arc")->capture_default_str();
  common(validate, false);

  auto* gaps = app.add_subcommand("gaps", "gap sequences g_j, f_j and K of a tube");
  gaps->add_option("--world", world)->required();
  gaps->add_option("--J", J)->capture_default_str();
  gaps->add_option("--scan-limit", scan_limit)->capture_default_str();
  common(gaps, false);

  auto* dist = app.add_subcommand("dist", "truncated distance between two gas worlds");
  dist->add_option("--world", world)->required();
  dist->add_option("--other", other)->required();
  dist->add_option("--R", radii, "window radii")->delimiter(',')->capture_default_str();
  common(dist, false);

  auto* bern = app.add_subcommand("bernoulli", "write an i.i.d. world file");
  bern->add_option("--catalog", catalog)->required();
  bern->add_option("--p", probs, "probabilities, one per configuration")->delimiter(',')->required();
  bern->add_option("--seed", seed)->capture_default_str();
  bern->add_option("--window", window_r, "preview radius")->capture_default_str();
  common(bern, false);

  auto* ri = app.add_subcommand("construct-ri", "nested eta_k construction from an R_i spec file");
  ri->add_option("--spec", spec)->required();
  common(ri, true);

  auto* orbit = app.add_subcommand("orbit", "log one mu-sampled orbit");
  orbit->add_option("--world", world)->required();
  orbit->add_option("--steps", steps)->capture_default_str();
  orbit->add_option("--seed", seed)->capture_default_str();
  orbit->add_option("--cell", cell, "start cell x or x,y")->capture_default_str();
  common(orbit, true);

  std::string rec_cell;
  auto* rec = app.add_subcommand("recurrence", "return curves r(t) and confinement check");
  rec->add_option("--world", world)->required();
  rec->add_option("--n", n, "orbits")->capture_default_str();
  rec->add_option("--t-max", t_max)->capture_default_str();
  rec->add_option("--seed", seed)->capture_default_str();
  rec->add_option("--cell", rec_cell, "start cell (tubes default to the gap-profile origin)");
  common(rec, true);

  auto* esc = app.add_subcommand("escape", "escape measure from the ring rho1 to rho2");
  esc->add_option("--world", world)->required();
  esc->add_option("--rho1", rho1)->capture_default_str();
  esc->add_option("--rho2", rho2s, "outer radii")->delimiter(',')->required();
  esc->add_option("--center", center)->capture_default_str();
  esc->add_option("--n", n)->capture_default_str();
  esc->add_option("--seed", seed)->capture_default_str();
  esc->add_option("--max-steps", max_steps)->capture_default_str();
  common(esc, true);

  auto* lyap = app.add_subcommand("lyapunov", "tangent-cocycle growth rate");
  lyap->add_option("--world", world)->required();
  lyap->add_option("--orbits", orbits)->capture_default_str();
  lyap->add_option("--steps", steps)->capture_default_str();
  lyap->add_option("--seed", seed)->capture_default_str();
  lyap->add_option("--cell", cell)->capture_default_str();
  lyap->add_flag("--reversed", reversed, "iterate the inverse map");
  common(lyap, true);

  auto* hor = app.add_subcommand("horizon", "sweep straight lines for free chords");
  hor->add_option("--world", world)->required();
  hor->add_option("--window", window, "x0,x1 or x0,x1,y0,y1")->delimiter(',')->required();
  hor->add_option("--angles", angles)->capture_default_str();
  hor->add_option("--offsets", offsets)->capture_default_str();
  hor->add_option("--min-witness", min_witness, "list complete chords at least this long")->capture_default_str();
  common(hor, false);

  auto* sing = app.add_subcommand("singularities", "singularity-source counts c(t)");
  sing->add_option("--world", world)->required();
  sing->add_option("--t", ts)->delimiter(',')->capture_default_str();
  sing->add_option("--delta", delta)->capture_default_str();
  sing->add_option("--orbits", orbits)->capture_default_str();
  sing->add_option("--seed", seed)->capture_default_str();
  common(sing, true);

  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare its outputs");
  replay->add_option("--manifest", manifest)->required();
  replay->add_option("--out", out_dir)->required();
  auto* replay_workers = replay->add_option("--workers", workers);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << LORENTZ_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }
  if (workers < 1) {
    err << "error: --workers must be positive\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  try {
    if (sub == replay) return run_replay(manifest, out_dir, workers, replay_workers->count() > 0, out, err);

    Run run;
    run.out = out_dir;
    run.workers = workers;
    run.guards = guards;
    run.log = &out;
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) throw io::IoError("cannot create " + run.out.string());

    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    if (sub == validate) code = run_validate(run, catalog, angles, offsets, shadow);
    else if (sub == gaps) code = run_gaps(run, world, J, scan_limit);
    else if (sub == dist) code = run_dist(run, world, other, radii);
    else if (sub == bern) code = run_bernoulli(run, catalog, probs, seed, window_r);
    else if (sub == ri) code = run_construct_ri(run, spec);
    else if (sub == orbit) code = run_orbit_cmd(run, world, steps, seed, cell);
    else if (sub == rec) code = run_recurrence(run, world, n, t_max, seed, rec_cell);
    else if (sub == esc) code = run_escape(run, world, rho1, rho2s, center, n, seed, max_steps);
    else if (sub == lyap) code = run_lyapunov(run, world, orbits, steps, seed, cell, reversed);
    else if (sub == hor) code = run_horizon(run, world, window, angles, offsets, min_witness);
    else if (sub == sing) code = run_singularities(run, world, ts, delta, orbits, seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // argv without --out/--workers, input paths made absolute
    std::vector<std::string> argv;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if ((a == "--out" || a == "--workers") && i + 1 < args.size()) {
        ++i;
        continue;
      }
      if (a.rfind("--out=", 0) == 0 || a.rfind("--workers=", 0) == 0) continue;
      argv.push_back(a);
      if (std::find(path_options().begin(), path_options().end(), a) != path_options().end() && i + 1 < args.size())
        argv.push_back(fs::absolute(args[++i]).lexically_normal().string());
    }
    json outputs = json::object();
    for (const auto& f : run.outputs) outputs[f] = io::file_hash(run.out / f);
    json params = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
      const std::string key = opt->get_name(false, true);
      if (key.empty() || key == "--help" || key == "-h" || key == "--out" || key == "--workers") continue;
      auto res = opt->results();
      params[key] = res.size() == 1 ? json(res.front()) : json(res);
    }
    json manifest_json = {{"format", kManifestFormat},
                          {"tool", "lorentz"},
                          {"version", LORENTZ_VERSION},
                          {"subcommand", name},
                          {"argv", argv},
                          {"parameters", params},
                          {"inputs", run.inputs},
                          {"guards", guards_json(guards)},
                          {"tolerances", io::tolerances_json()},
                          {"workers", workers},
                          {"outputs", outputs},
                          {"exit_code", code},
                          {"wall_clock_seconds", wall}};
    if (params.contains("--seed")) manifest_json["seeds"] = {params["--seed"]};
    io::write_file(run.out / "manifest.json", manifest_json.dump(2) + "\n");
    return code;
  } catch (const io::IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const io::FormatError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const UnboundedSearch& e) {
    err << "guard exhausted: " << e.what() << '\n';
    return kGuardExhausted;
  } catch (const BudgetExceeded& e) {
    err << "guard exhausted: " << e.what() << '\n';
    return kGuardExhausted;
  } catch (const InsufficientOrbits& e) {
    err << "guard exhausted: " << e.what() << '\n';
    return kGuardExhausted;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace lorentz::cli
