// Command-line driver: simulate / analyze / verify-moments / hydro.
// One JSON config format (comments allowed); every run writes its outputs
// plus a manifest.json listing each file with a content digest. Exit codes:
// 0 success, 1 runtime or tolerance failure, 2 usage/config error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "randgas/dynamics.hpp"
#include "randgas/geometry.hpp"
#include "randgas/hydro.hpp"
#include "randgas/manifest.hpp"
#include "randgas/moments.hpp"
#include "randgas/rng.hpp"
#include "randgas/statistics.hpp"

namespace {

using nlohmann::json;
using namespace randgas;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json parse_config_text(const std::string& text, const std::string& name) {
  try {
    return json::parse(text, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + name + ": " + e.what());
  }
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = parse_config_text(ss.str(), path);
  if (!j.is_object()) throw ConfigError("config must be a JSON object: " + path);
  return j;
}

json merge_config(json base, const json& overlay) {
  for (const auto& [key, value] : overlay.items()) base[key] = value;
  return base;
}

double get_num(const json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number())
    throw ConfigError("config field '" + key + "' must be a number");
  return j[key].get<double>();
}

std::int64_t get_int(const json& j, const std::string& key,
                     std::int64_t dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer())
    throw ConfigError("config field '" + key + "' must be an integer");
  return j[key].get<std::int64_t>();
}

std::string get_str(const json& j, const std::string& key,
                    const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string())
    throw ConfigError("config field '" + key + "' must be a string");
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean())
    throw ConfigError("config field '" + key + "' must be a boolean");
  return j[key].get<bool>();
}

struct CommonArgs {
  std::string config;
  std::string output = ".";
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0; // 0 -> hardware_concurrency
};

int effective_threads(const CommonArgs& args) {
  if (args.threads > 0) return args.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

RunManifest start_manifest(const char* command, const CommonArgs& args,
                           std::uint64_t seed) {
  std::filesystem::create_directories(args.output);
  RunManifest manifest;
  manifest.command = command;
  manifest.config_path = args.config.empty() ? ("<preset:" + args.preset + ">")
                                             : args.config;
  manifest.seed = seed;
  manifest.output_dir = args.output;
  manifest.started_at = iso8601_utc_now();
  return manifest;
}

json resolve_config(const CommonArgs& args, json (*preset_fn)(const std::string&),
                    const char* command) {
  json cfg = json::object();
  if (!args.preset.empty()) cfg = preset_fn(args.preset);
  if (!args.config.empty()) cfg = merge_config(cfg, load_config_file(args.config));
  if (cfg.empty())
    throw ConfigError(std::string(command) + ": provide --config or --preset");
  return cfg;
}

// ---------------------------------------------------------------- simulate

json simulate_preset(const std::string& name) {
  if (name == "smoke") {
    return json{{"K", 32},        {"sigma", 1.0},  {"alpha", 0.1},
                {"lambda", 1.0},  {"box_side", 9.435}, {"energy", 48.0},
                {"t_end", 1.0},   {"ensemble_size", 2}, {"seed", 7},
                {"init", "maxwell"}};
  }
  if (name == "lambda-zero") {
    return json{{"K", 16},        {"sigma", 1.0},  {"alpha", 0.1},
                {"lambda", 0.0},  {"box_side", 8.0}, {"energy", 24.0},
                {"t_end", 0.5},   {"ensemble_size", 1}, {"seed", 3},
                {"init", "maxwell"}};
  }
  if (name == "two-speed") {
    return json{{"K", 16},        {"sigma", 1.0},  {"alpha", 0.1},
                {"lambda", 1.0},  {"box_side", 8.0}, {"energy", 24.0},
                {"t_end", 2.0},   {"ensemble_size", 2}, {"seed", 11},
                {"init", "two_speed"}};
  }
  throw ConfigError("unknown simulate preset: " + name +
                    " (available: smoke, lambda-zero, two-speed)");
}

int cmd_simulate(const CommonArgs& args) {
  const json cfg = resolve_config(args, simulate_preset, "simulate");

  SimConfig sim;
  sim.K = static_cast<int>(get_int(cfg, "K", 32));
  sim.contact.sigma = get_num(cfg, "sigma", 1.0);
  sim.contact.alpha = get_num(cfg, "alpha", 0.1);
  sim.contact.lambda = get_num(cfg, "lambda", 1.0);
  if (cfg.contains("box") && cfg["box"].is_array()) {
    const auto& b = cfg["box"];
    if (b.size() != 3) throw ConfigError("config field 'box' needs 3 entries");
    sim.box.side_lengths =
        Vec3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
  } else {
    const double side = get_num(cfg, "box_side", 10.0);
    sim.box.side_lengths = Vec3(side, side, side);
  }
  sim.energy_E = get_num(cfg, "energy", 1.0);
  sim.dt_max = get_num(cfg, "dt_max", 0.0);
  sim.t_end = get_num(cfg, "t_end", 1.0);
  sim.ensemble_size = static_cast<int>(get_int(cfg, "ensemble_size", 1));
  sim.seed = args.seed_given
                 ? args.seed
                 : static_cast<std::uint64_t>(get_int(cfg, "seed", 0));
  const std::string init = get_str(cfg, "init", "maxwell");
  if (init == "maxwell")
    sim.init = InitKind::maxwell_shell;
  else if (init == "two_speed")
    sim.init = InitKind::two_speed;
  else
    throw ConfigError("config field 'init' must be 'maxwell' or 'two_speed'");
  const double snapshot_interval = get_num(cfg, "snapshot_interval", 0.0);
  try {
    validate(sim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid simulate config: ") + e.what());
  }

  RunManifest manifest = start_manifest("simulate", args, sim.seed);
  const std::uint64_t digest = fnv1a64(cfg.dump());
  manifest.config_digest = hex64(digest);

  // Buffer rows per realization so output order (and digests) do not depend
  // on the worker count.
  const int R = sim.ensemble_size;
  std::vector<std::string> state_rows(static_cast<std::size_t>(R));
  std::vector<int> snap_count(static_cast<std::size_t>(R), 0);
  auto append_state = [&](int r, const ParticleSet& s) {
    const int snap = snap_count[static_cast<std::size_t>(r)]++;
    std::ostringstream os;
    for (int i = 0; i < s.K(); ++i) {
      os << r << ' ' << snap << ' ' << fmt(s.time) << ' ' << i;
      for (int c = 0; c < 3; ++c) os << ' ' << fmt(s.positions[i](c));
      for (int c = 0; c < 3; ++c) os << ' ' << fmt(s.velocities[i](c));
      os << '\n';
    }
    state_rows[static_cast<std::size_t>(r)] += os.str();
  };

  std::vector<Observer> observers;
  if (snapshot_interval > 0.0)
    observers.push_back(Observer{snapshot_interval, append_state});

  std::ostringstream event_rows; // event_sink delivers in realization order
  const auto sink = [&](int r, const CollisionEvent& ev) {
    event_rows << r << ' ' << fmt(ev.t) << ' ' << ev.i << ' ' << ev.j << ' '
               << fmt(ev.n.x()) << ' ' << fmt(ev.n.y()) << ' '
               << fmt(ev.n.z()) << '\n';
  };

  log_info("simulate: K=" + std::to_string(sim.K) +
           " ensemble=" + std::to_string(R));
  const RunRecord record = run(sim, observers, sink, effective_threads(args));
  for (int r = 0; r < R; ++r)
    append_state(r, record.realizations[static_cast<std::size_t>(r)].final_state);

  std::ostringstream states;
  states << "# box " << fmt(sim.box.side_lengths.x()) << ' '
         << fmt(sim.box.side_lengths.y()) << ' '
         << fmt(sim.box.side_lengths.z()) << '\n'
         << "# columns: realization snap t particle x y z vx vy vz\n";
  for (const auto& rows : state_rows) states << rows;

  std::ostringstream events;
  events << "# columns: realization t i j nx ny nz\n" << event_rows.str();

  std::ostringstream summary;
  summary << "# columns: realization stream_seed event_count energy_drift\n";
  for (int r = 0; r < R; ++r) {
    const auto& rec = record.realizations[static_cast<std::size_t>(r)];
    summary << r << ' ' << hex64(rec.stream_seed) << ' ' << rec.event_count
            << ' ' << fmt(rec.final_energy_drift) << '\n';
  }
  summary << "total_events " << record.total_events << '\n';

  write_artifact(manifest, "states.txt", digest, states.str());
  write_artifact(manifest, "events.txt", digest, events.str());
  write_artifact(manifest, "summary.txt", digest, summary.str());
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest);
  return 0;
}

// ----------------------------------------------------------------- analyze

json analyze_preset(const std::string& name) {
  throw ConfigError("analyze has no presets (got: " + name + ")");
}

int cmd_analyze(const CommonArgs& args) {
  const json cfg = resolve_config(args, analyze_preset, "analyze");

  const std::string states_path = get_str(cfg, "states", "");
  if (states_path.empty())
    throw ConfigError("analyze config needs 'states' (path to states.txt)");
  ContactParams contact;
  contact.sigma = get_num(cfg, "sigma", 1.0);
  contact.alpha = get_num(cfg, "alpha", 0.1);
  const double r_max = get_num(cfg, "r_max", 2.0 * contact.sigma);
  const int g_bins = static_cast<int>(get_int(cfg, "g_bins", 40));
  const int kl_bins = static_cast<int>(get_int(cfg, "kl_bins", 64));

  std::ifstream in(states_path);
  if (!in) throw ConfigError("cannot open states file: " + states_path);

  Box3 box;
  bool have_box = false;
  // (realization, snap) -> particle rows
  std::map<std::pair<int, int>, ParticleSet> sets;
  std::map<int, double> snap_times;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tag;
      ls >> tag;
      if (tag == "box") {
        double lx, ly, lz;
        if (ls >> lx >> ly >> lz) {
          box.side_lengths = Vec3(lx, ly, lz);
          have_box = true;
        }
      }
      continue;
    }
    std::istringstream ls(line);
    int r, snap, i;
    double t, x, y, z, vx, vy, vz;
    if (!(ls >> r >> snap >> t >> i >> x >> y >> z >> vx >> vy >> vz))
      throw ConfigError("malformed states row: " + line);
    ParticleSet& s = sets[{r, snap}];
    if (static_cast<int>(s.positions.size()) <= i) {
      s.positions.resize(static_cast<std::size_t>(i) + 1);
      s.velocities.resize(static_cast<std::size_t>(i) + 1);
    }
    s.positions[static_cast<std::size_t>(i)] = Vec3(x, y, z);
    s.velocities[static_cast<std::size_t>(i)] = Vec3(vx, vy, vz);
    s.time = t;
    snap_times[snap] = t;
  }
  if (sets.empty())
    throw ConfigError("states file has no snapshot rows: " + states_path);
  if (!have_box)
    throw ConfigError("states file is missing the '# box' header line");
  for (auto& [key, s] : sets) {
    (void)key;
    s.box = box;
  }

  std::map<int, std::vector<ParticleSet>> by_snap;
  for (const auto& [key, s] : sets) by_snap[key.second].push_back(s);
  const int final_snap = by_snap.rbegin()->first;
  const std::vector<ParticleSet>& final_states = by_snap[final_snap];

  RunManifest manifest = start_manifest("analyze", args, 0);
  const std::uint64_t digest = fnv1a64(cfg.dump());
  manifest.config_digest = hex64(digest);

  std::ostringstream out;
  double ratio_se = 0.0;
  const double ratio = overlap_ratio(final_states, contact, &ratio_se);
  out << "# overlap: ratio stderr n_states\n";
  out << "overlap " << fmt(ratio) << ' ' << fmt(ratio_se) << ' '
      << final_states.size() << "\n";

  const PairCorrelation gr =
      pair_correlation(final_states, contact, r_max, g_bins);
  out << "# gr: r_lo r_hi g\n";
  for (std::size_t k = 0; k + 1 < gr.r_edges.size(); ++k)
    out << "gr " << fmt(gr.r_edges[k]) << ' ' << fmt(gr.r_edges[k + 1]) << ' '
        << fmt(gr.g_values[k]) << '\n';

  out << "# relax: snap t ks kl n_states\n";
  for (const auto& [snap, states] : by_snap) {
    out << "relax " << snap << ' ' << fmt(snap_times[snap]) << ' '
        << fmt(maxwellian_distance(states)) << ' '
        << fmt(velocity_kl(states, kl_bins)) << ' ' << states.size() << '\n';
  }

  write_artifact(manifest, "analysis.txt", digest, out.str());
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest);
  return 0;
}

// ---------------------------------------------------------- verify-moments

json verify_moments_preset(const std::string& name) {
  if (name == "quick") {
    return json{{"n_samples", 400000}, {"n_points", 1}, {"seed", 2026},
                {"tolerance", 0.05}};
  }
  if (name == "full") {
    return json{{"n_samples", 10000000}, {"n_points", 3}, {"seed", 2026},
                {"tolerance", 0.01}};
  }
  throw ConfigError("unknown verify-moments preset: " + name +
                    " (available: quick, full)");
}

MomentId moment_id_from(const std::string& name) {
  for (MomentId id : all_moment_ids())
    if (to_string(id) == name) return id;
  throw ConfigError("unknown identity name: " + name);
}

int cmd_verify_moments(const CommonArgs& args) {
  const json cfg = resolve_config(args, verify_moments_preset, "verify-moments");

  std::vector<MomentId> ids;
  if (cfg.contains("identities")) {
    if (!cfg["identities"].is_array())
      throw ConfigError("config field 'identities' must be an array");
    for (const auto& name : cfg["identities"])
      ids.push_back(moment_id_from(name.get<std::string>()));
  } else {
    ids = all_moment_ids();
  }
  const std::int64_t n_samples = get_int(cfg, "n_samples", 1000000);
  const std::uint64_t seed =
      args.seed_given ? args.seed
                      : static_cast<std::uint64_t>(get_int(cfg, "seed", 2026));
  const int n_points = static_cast<int>(get_int(cfg, "n_points", 3));
  const double tolerance = get_num(cfg, "tolerance", 0.01);
  const std::string point_mode = get_str(cfg, "point_mode", "random");
  // Negative-control mode: corrupt every closed form by 2% so the tolerance
  // gate must fail; proves the comparison is live.
  const bool corrupt = get_bool(cfg, "corrupt_closed_form", false);

  std::vector<HydroPoint> points;
  if (point_mode == "random") {
    points = make_verification_points(seed, n_points);
  } else if (point_mode == "zero_gradient") {
    points.assign(static_cast<std::size_t>(n_points), HydroPoint{});
  } else {
    throw ConfigError("point_mode must be 'random' or 'zero_gradient'");
  }

  RunManifest manifest = start_manifest("verify-moments", args, seed);
  const std::uint64_t digest = fnv1a64(cfg.dump());
  manifest.config_digest = hex64(digest);

  const int threads = effective_threads(args);
  bool all_pass = true;
  std::ostringstream out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    Rng rng(derive_stream(seed, 1000 + k));
    const auto reports =
        verify_identities(ids, points[k], n_samples, rng, threads);
    for (const auto& rep : reports) {
      Eigen::VectorXd closed = rep.closed_form;
      double rel_err = rep.rel_err;
      if (corrupt) {
        closed *= 1.02;
        const double floor = 1e-8 * points[k].rho * points[k].rho *
                             std::pow(points[k].theta, 1.5);
        rel_err = (rep.mc_value - closed).norm() /
                  std::max(closed.norm(), floor);
      }
      const bool pass = rel_err <= tolerance;
      all_pass = all_pass && pass;
      json jrep;
      jrep["point"] = k;
      jrep["identity"] = to_string(rep.identity_id);
      jrep["n_samples"] = rep.n_samples;
      jrep["rel_err"] = rel_err;
      jrep["pass"] = pass;
      jrep["mc"] = std::vector<double>(rep.mc_value.data(),
                                       rep.mc_value.data() + rep.mc_value.size());
      jrep["closed"] =
          std::vector<double>(closed.data(), closed.data() + closed.size());
      jrep["stderr"] = std::vector<double>(
          rep.stderr_value.data(),
          rep.stderr_value.data() + rep.stderr_value.size());
      out << jrep.dump() << '\n';
      log_info("point " + std::to_string(k) + " " +
               to_string(rep.identity_id) + " rel_err=" + fmt(rel_err) +
               (pass ? " PASS" : " FAIL"));
    }
  }

  write_artifact(manifest, "moment_reports.jsonl", digest, out.str());
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest);
  if (!all_pass) {
    std::cerr << "verify-moments: at least one identity exceeded tolerance "
              << tolerance << "\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------------- hydro

json hydro_preset(const std::string& name) {
  json base{{"cfl", 0.8},       {"sigma", 1.0},  {"mode", "euler"},
            {"minmod", true},   {"bc", "transmissive"},
            {"rho_sp", 1e9},    {"preset", name}};
  if (name == "uniform") {
    base["n_cells"] = 64;
    base["dx"] = 1.0 / 64;
    base["t_end"] = 0.1;
    base["bc"] = "periodic";
    return base;
  }
  if (name == "sod-dilute" || name == "sod-dense") {
    base["n_cells"] = 800;
    base["dx"] = 1.0 / 800;
    base["t_end"] = 0.2;
    if (name == "sod-dense") base["rho_sp"] = 10.0; // x = 0.1 at rho = 1
    return base;
  }
  if (name == "pulse") {
    base["n_cells"] = 512;
    base["dx"] = 1.0 / 512;
    base["t_end"] = 0.1;
    base["bc"] = "periodic";
    return base;
  }
  if (name == "shear") {
    base["n_cells"] = 256;
    base["dx"] = 1.0 / 256;
    base["t_end"] = 0.5;
    base["bc"] = "periodic";
    base["mode"] = "ns";
    base["rho_sp"] = 10.0;
    base["sigma"] = 0.05;
    return base;
  }
  throw ConfigError("unknown hydro preset: " + name +
                    " (available: uniform, sod-dilute, sod-dense, pulse, shear)");
}

HydroState1D hydro_initial_state(const json& cfg) {
  HydroState1D s;
  s.n_cells = static_cast<int>(get_int(cfg, "n_cells", 400));
  s.dx = get_num(cfg, "dx", 1.0 / s.n_cells);
  s.rho_sp = get_num(cfg, "rho_sp", 1e9);
  s.sigma = get_num(cfg, "sigma", 1.0);
  s.R_star = get_num(cfg, "R_star", 0.0);
  const std::string bc = get_str(cfg, "bc", "transmissive");
  if (bc == "periodic")
    s.bc = Boundary::periodic;
  else if (bc == "transmissive")
    s.bc = Boundary::transmissive;
  else
    throw ConfigError("bc must be 'periodic' or 'transmissive'");

  s.rho.resize(s.n_cells);
  s.u.resize(s.n_cells);
  s.theta.resize(s.n_cells);

  if (cfg.contains("cells")) {
    const json& cells = cfg["cells"];
    for (const char* key : {"rho", "u", "theta"}) {
      if (!cells.contains(key) || !cells[key].is_array() ||
          static_cast<int>(cells[key].size()) != s.n_cells)
        throw ConfigError(std::string("cells.") + key +
                          " must be an array of n_cells numbers");
    }
    for (int i = 0; i < s.n_cells; ++i) {
      s.rho(i) = cells["rho"][static_cast<std::size_t>(i)].get<double>();
      s.u(i) = cells["u"][static_cast<std::size_t>(i)].get<double>();
      s.theta(i) = cells["theta"][static_cast<std::size_t>(i)].get<double>();
    }
    return s;
  }

  const std::string preset = get_str(cfg, "preset", "");
  const double length = s.n_cells * s.dx;
  for (int i = 0; i < s.n_cells; ++i) {
    const double x = (i + 0.5) * s.dx;
    if (preset == "uniform") {
      s.rho(i) = 1.0;
      s.u(i) = 0.3;
      s.theta(i) = 1.0;
    } else if (preset == "sod-dilute" || preset == "sod-dense") {
      const bool left = x < 0.5 * length;
      s.rho(i) = left ? 1.0 : 0.125;
      s.u(i) = 0.0;
      s.theta(i) = left ? 1.0 : 0.8;
    } else if (preset == "pulse") {
      const double arg = (x - 0.5 * length) / 0.05;
      s.rho(i) = 1.0 + 1e-3 * std::exp(-arg * arg);
      s.u(i) = 0.0;
      s.theta(i) = 1.0;
    } else if (preset == "shear") {
      s.rho(i) = 1.0;
      s.u(i) = 0.1 * std::sin(2.0 * M_PI * x / length);
      s.theta(i) = 1.0;
    } else {
      throw ConfigError("hydro config needs 'cells' or a known 'preset'");
    }
  }
  return s;
}

int cmd_hydro(const CommonArgs& args) {
  const json cfg = resolve_config(args, hydro_preset, "hydro");

  HydroState1D state = hydro_initial_state(cfg);
  try {
    validate(state);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid hydro config: ") + e.what());
  }
  const double t_end = get_num(cfg, "t_end", 0.2);
  const double cfl = get_num(cfg, "cfl", 0.8);
  const bool minmod = get_bool(cfg, "minmod", true);
  const std::string mode_name = get_str(cfg, "mode", "euler");
  RhsMode mode;
  if (mode_name == "euler")
    mode = RhsMode::euler;
  else if (mode_name == "ns" || mode_name == "navier_stokes")
    mode = RhsMode::navier_stokes;
  else
    throw ConfigError("mode must be 'euler' or 'ns'");

  std::vector<double> snap_times;
  if (cfg.contains("snap_times")) {
    if (!cfg["snap_times"].is_array())
      throw ConfigError("snap_times must be an array of times");
    for (const auto& t : cfg["snap_times"]) snap_times.push_back(t.get<double>());
    std::sort(snap_times.begin(), snap_times.end());
  } else {
    snap_times.push_back(t_end);
  }

  RunManifest manifest = start_manifest("hydro", args, 0);
  const std::uint64_t digest = fnv1a64(cfg.dump());
  manifest.config_digest = hex64(digest);

  int snap_index = 0;
  auto write_snapshot = [&](const HydroState1D& s) {
    std::ostringstream out;
    out << "# t " << fmt(s.time) << '\n'
        << "# columns: x rho u theta p\n";
    for (int i = 0; i < s.n_cells; ++i) {
      const double pf = coeffs(s.rho(i), s.theta(i), s.rho_sp, s.sigma)
                            .pressure_factor;
      out << fmt((i + 0.5) * s.dx) << ' ' << fmt(s.rho(i)) << ' '
          << fmt(s.u(i)) << ' ' << fmt(s.theta(i)) << ' '
          << fmt(s.rho(i) * s.theta(i) * pf) << '\n';
    }
    char name[48];
    std::snprintf(name, sizeof(name), "snapshot_%03d.txt", snap_index++);
    write_artifact(manifest, name, digest, out.str());
  };

  log_info("hydro: " + std::to_string(state.n_cells) + " cells to t=" +
           fmt(t_end));
  for (double t_snap : snap_times) {
    state = advance(std::move(state), std::min(t_snap, t_end), cfl, mode,
                    minmod);
    write_snapshot(state);
  }
  if (state.time < t_end) {
    state = advance(std::move(state), t_end, cfl, mode, minmod);
    write_snapshot(state);
  }

  if (get_str(cfg, "preset", "") == "sod-dilute") {
    // Dilute regression: L1(rho) against the exact solution of the
    // classical Riemann problem, interface at the domain midpoint.
    const double length = state.n_cells * state.dx;
    std::vector<double> xs(static_cast<std::size_t>(state.n_cells));
    for (int i = 0; i < state.n_cells; ++i)
      xs[static_cast<std::size_t>(i)] = (i + 0.5) * state.dx - 0.5 * length;
    const RiemannProfile exact = riemann_exact_dilute(
        {1.0, 0.0, 1.0}, {0.125, 0.0, 0.8}, state.time, xs);
    double l1 = 0.0;
    for (int i = 0; i < state.n_cells; ++i)
      l1 += std::abs(state.rho(i) - exact.rho[static_cast<std::size_t>(i)]) *
            state.dx;
    std::ostringstream out;
    out << "l1_rho " << fmt(l1) << '\n';
    write_artifact(manifest, "l1_error.txt", digest, out.str());
    std::cout << "sod-dilute L1(rho) = " << fmt(l1) << "\n";
  }

  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest);
  return 0;
}

// -------------------------------------------------------------------- main

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "JSON config file (// comments ok)");
  sub->add_option("--output", args.output, "output directory")
      ->default_val(".");
  sub->add_option("--seed", args.seed, "seed override");
  sub->add_option("--threads", args.threads,
                  "worker threads (default: hardware concurrency)");
  sub->add_option("--preset", args.preset, "named built-in config");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"random hard-sphere gas: simulation, analysis, verification"};
  app.require_subcommand(1);

  CommonArgs sim_args, ana_args, mom_args, hyd_args;
  CLI::App* sim = app.add_subcommand("simulate", "run particle ensembles");
  add_common(sim, sim_args);
  CLI::App* ana = app.add_subcommand("analyze", "statistics over snapshots");
  add_common(ana, ana_args);
  CLI::App* mom =
      app.add_subcommand("verify-moments", "Monte-Carlo moment identities");
  add_common(mom, mom_args);
  CLI::App* hyd = app.add_subcommand("hydro", "1-D dense-gas solver");
  add_common(hyd, hyd_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2; // help/version -> 0, usage errors -> 2
  }

  sim_args.seed_given = sim->count("--seed") > 0;
  mom_args.seed_given = mom->count("--seed") > 0;

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (ana->parsed()) return cmd_analyze(ana_args);
    if (mom->parsed()) return cmd_verify_moments(mom_args);
    if (hyd->parsed()) return cmd_hydro(hyd_args);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}
