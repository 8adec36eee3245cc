// Copyright 2026 The uavicic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario configuration (JSON) and per-snapshot problem construction.

#pragma once

#include "uavicic/channel.hpp"
#include "uavicic/common.hpp"
#include "uavicic/decentral.hpp"
#include "uavicic/pathloss.hpp"
#include "uavicic/rng.hpp"
#include "uavicic/scheduler.hpp"
#include "uavicic/topology.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#ifndef UAVICIC_DEFAULT_TABLE
#define UAVICIC_DEFAULT_TABLE "data/pathloss.table"
#endif

namespace uavicic {

inline const std::vector<std::string>& all_schemes() {
  static const std::vector<std::string> kSchemes{"egoistic", "altruistic",    "terrestrial",
                                                 "sca",      "decentralized", "decentralized_iterative"};
  return kSchemes;
}

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t snapshots = 50;

  double cell_radius_m = 500.0;
  int tiers = 5;
  double bs_height_m = 25.0;

  std::size_t num_ues = 60;
  double ue_height_m = 1.5;
  double ue_tx_power_dbm = 23.0;
  int q = 2;
  std::size_t num_rbs = 30;
  std::vector<std::size_t> per_cell;
  std::size_t rbs_per_ue = 1;
  AssignOrder assign_order = AssignOrder::sequential;

  double uav_x_m = 150.0;
  double uav_y_m = 420.0;
  double uav_height_m = 60.0;
  double uav_pmax_dbm = 23.0;
  UavAntenna uav_antenna;

  double carrier_freq_hz = 2e9;
  double noise_psd_dbm_hz = -164.0;
  double rb_bandwidth_hz = 180e3;
  std::string terrestrial_model = "uma";
  std::string aerial_model = "uma_av";
  std::string table_path;  // empty: bundled table
  bool shadowing = true;
  bool fading = true;
  UlaPattern bs_antenna;

  Weights weights;
  std::vector<std::string> schemes = all_schemes();
  bool bound = true;

  double epsilon = 1e-6;
  std::size_t max_iters = 200;
  double opa_epsilon = 1e-6;
  std::size_t opa_max_iters = 1000000;
  double gain_floor = 0.0;
  ScaInit sca_init = ScaInit::automatic;

  std::size_t cluster_size = 4;

  void validate() const {
    auto positive = [](double v, const char* path) {
      if (!(v > 0.0)) throw ConfigError(std::string(path) + " must be > 0");
    };
    positive(cell_radius_m, "grid.cell_radius_m");
    positive(bs_height_m, "grid.bs_height_m");
    positive(ue_height_m, "ues.height_m");
    positive(uav_height_m, "uav.height_m");
    positive(carrier_freq_hz, "channel.carrier_freq_hz");
    positive(rb_bandwidth_hz, "channel.rb_bandwidth_hz");
    positive(epsilon, "solver.epsilon");
    positive(opa_epsilon, "solver.opa_epsilon");
    if (tiers < 0) throw ConfigError("grid.tiers must be >= 0");
    if (q < 0) throw ConfigError("ues.q must be >= 0");
    if (num_ues == 0) throw ConfigError("ues.count must be >= 1");
    if (num_rbs == 0) throw ConfigError("ues.num_rbs must be >= 1");
    if (rbs_per_ue == 0 || rbs_per_ue > num_rbs) throw ConfigError("ues.rbs_per_ue must lie in [1, ues.num_rbs]");
    if (snapshots == 0) throw ConfigError("snapshots must be >= 1");
    if (max_iters == 0) throw ConfigError("solver.max_iters must be >= 1");
    if (opa_max_iters == 0) throw ConfigError("solver.opa_max_iters must be >= 1");
    if (cluster_size == 0) throw ConfigError("decentral.cluster_size must be >= 1");
    if (gain_floor < 0.0) throw ConfigError("solver.gain_floor must be >= 0");
    try {
      weights.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("weights: ") + e.what());
    }
    try {
      uav_antenna.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("uav.antenna: ") + e.what());
    }
    try {
      bs_antenna.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("channel.bs_antenna: ") + e.what());
    }
    for (const std::string& s : schemes) {
      if (std::find(all_schemes().begin(), all_schemes().end(), s) == all_schemes().end()) {
        throw ConfigError("schemes: unknown scheme '" + s + "'");
      }
    }
  }
};

namespace detail {

/// JSON object reader that tracks the field path and rejects unknown keys.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  ConfigReader child(const char* key) {
    seen_.insert(key);
    static const nlohmann::json kEmpty = nlohmann::json::object();
    return ConfigReader(j_.contains(key) ? j_.at(key) : kEmpty, field(key));
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline ScenarioConfig parse_config(const nlohmann::json& root) {
  ScenarioConfig c;
  detail::ConfigReader r(root, "");
  r.read("seed", c.seed);
  r.read("snapshots", c.snapshots);
  r.read("schemes", c.schemes);
  r.read("bound", c.bound);

  auto grid = r.child("grid");
  grid.read("cell_radius_m", c.cell_radius_m);
  grid.read("tiers", c.tiers);
  grid.read("bs_height_m", c.bs_height_m);
  grid.finish();

  auto ues = r.child("ues");
  ues.read("count", c.num_ues);
  ues.read("height_m", c.ue_height_m);
  ues.read("tx_power_dbm", c.ue_tx_power_dbm);
  ues.read("q", c.q);
  ues.read("num_rbs", c.num_rbs);
  ues.read("per_cell", c.per_cell);
  ues.read("rbs_per_ue", c.rbs_per_ue);
  std::string order = "sequential";
  ues.read("assign_order", order);
  if (order == "sequential") {
    c.assign_order = AssignOrder::sequential;
  } else if (order == "random") {
    c.assign_order = AssignOrder::random;
  } else {
    throw ConfigError("ues.assign_order: expected 'sequential' or 'random', got '" + order + "'");
  }
  ues.finish();

  auto uav = r.child("uav");
  uav.read("x_m", c.uav_x_m);
  uav.read("y_m", c.uav_y_m);
  uav.read("height_m", c.uav_height_m);
  uav.read("pmax_dbm", c.uav_pmax_dbm);
  {
    auto ant = uav.child("antenna");
    std::string kind = "isotropic";
    ant.read("kind", kind);
    if (kind == "isotropic") {
      c.uav_antenna.kind = UavAntennaKind::isotropic;
    } else if (kind == "directional") {
      c.uav_antenna.kind = UavAntennaKind::directional;
    } else {
      throw ConfigError("uav.antenna.kind: expected 'isotropic' or 'directional', got '" + kind + "'");
    }
    ant.read("half_beamwidth_deg", c.uav_antenna.half_beamwidth_deg);
    ant.read("main_gain_const", c.uav_antenna.main_gain_const);
    ant.read("side_gain", c.uav_antenna.side_gain);
    ant.finish();
  }
  uav.finish();

  auto ch = r.child("channel");
  ch.read("carrier_freq_hz", c.carrier_freq_hz);
  ch.read("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  ch.read("rb_bandwidth_hz", c.rb_bandwidth_hz);
  ch.read("terrestrial_model", c.terrestrial_model);
  ch.read("aerial_model", c.aerial_model);
  ch.read("table", c.table_path);
  ch.read("shadowing", c.shadowing);
  ch.read("fading", c.fading);
  {
    auto bs = ch.child("bs_antenna");
    bs.read("num_elements", c.bs_antenna.num_elements);
    bs.read("spacing", c.bs_antenna.spacing);
    bs.read("downtilt_deg", c.bs_antenna.downtilt_deg);
    bs.finish();
  }
  ch.finish();

  auto w = r.child("weights");
  w.read("mu_u", c.weights.mu_u);
  w.read("mu_g", c.weights.mu_g);
  w.finish();

  auto solver = r.child("solver");
  solver.read("epsilon", c.epsilon);
  solver.read("max_iters", c.max_iters);
  solver.read("opa_epsilon", c.opa_epsilon);
  solver.read("opa_max_iters", c.opa_max_iters);
  solver.read("gain_floor", c.gain_floor);
  std::string init = "automatic";
  solver.read("init", init);
  if (init == "automatic") {
    c.sca_init = ScaInit::automatic;
  } else if (init == "altruistic") {
    c.sca_init = ScaInit::altruistic;
  } else if (init == "egoistic") {
    c.sca_init = ScaInit::egoistic;
  } else if (init == "zero") {
    c.sca_init = ScaInit::zero;
  } else {
    throw ConfigError("solver.init: expected automatic, altruistic, egoistic or zero, got '" + init + "'");
  }
  solver.finish();

  auto dec = r.child("decentral");
  dec.read("cluster_size", c.cluster_size);
  dec.finish();

  r.finish();
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

/// Scenario pieces shared by every snapshot.
struct Scenario {
  ScenarioConfig config;
  HexGrid grid;
  NeighborSets neighbors;
  ChannelParams channel;
  ClusterPartition clusters;
  std::vector<std::size_t> region;  // cells the UAV reaches through its main lobe

  Point3 uav_position() const { return {config.uav_x_m, config.uav_y_m, config.uav_height_m}; }
  double p_max_watts() const { return dbm_to_watts(config.uav_pmax_dbm); }
};

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario s;
  s.config = cfg;
  s.grid = build_grid(cfg.cell_radius_m, cfg.tiers, cfg.bs_height_m);
  s.neighbors = neighbor_sets(s.grid, std::max(cfg.q, 1));
  if (!cfg.per_cell.empty() && cfg.per_cell.size() != s.grid.size()) {
    throw ConfigError("ues.per_cell: expected " + std::to_string(s.grid.size()) + " entries, got " +
                      std::to_string(cfg.per_cell.size()));
  }

  const PathlossTable table = load_pathloss_table(cfg.table_path.empty() ? UAVICIC_DEFAULT_TABLE : cfg.table_path);
  auto model = [&](const std::string& name, const char* field) {
    if (!table.contains(name)) throw ConfigError(std::string("channel.") + field + ": unknown model '" + name + "'");
    return table.at(name);
  };
  s.channel.carrier_freq_hz = cfg.carrier_freq_hz;
  s.channel.noise_psd_dbm_hz = cfg.noise_psd_dbm_hz;
  s.channel.rb_bandwidth_hz = cfg.rb_bandwidth_hz;
  s.channel.bs_antenna = cfg.bs_antenna;
  s.channel.uav_antenna = cfg.uav_antenna;
  s.channel.terrestrial = model(cfg.terrestrial_model, "terrestrial_model");
  s.channel.aerial = model(cfg.aerial_model, "aerial_model");
  s.channel.shadowing = cfg.shadowing;
  s.channel.fading = cfg.fading;
  s.channel.validate();

  s.region = icic_region(s.grid, {cfg.uav_x_m, cfg.uav_y_m}, cfg.uav_antenna, cfg.uav_height_m);
  s.clusters = make_clusters(s.grid, cfg.cluster_size);
  return s;
}

/// The optimization problem of one snapshot, restricted to the UAV's region.
struct Problem {
  ChannelState channel;
  RbOccupancy occupancy;
  NeighborSets neighbors;
  ClusterPartition clusters;        // heads chosen by UAV link strength
  std::vector<std::size_t> cell_ids;  // original index of each local cell
};

struct SnapshotDiagnostics {
  std::size_t blocked_ues = 0;
  std::size_t clamped_links = 0;
  std::size_t extrapolated_links = 0;
  std::size_t uav_los_links = 0;
  std::size_t region_cells = 0;
  std::size_t unserved_rbs = 0;  // RBs used in every region cell
};

struct Snapshot {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<GroundUe> ues;
  RbOccupancy occupancy;  // whole grid
  ChannelBuild channel;   // whole grid
  Problem problem;
  SnapshotDiagnostics diagnostics;
};

inline std::uint64_t snapshot_seed(std::uint64_t master, std::size_t index) {
  return derive_key(master, {static_cast<std::uint64_t>(Stream::snapshot), static_cast<std::uint64_t>(index)});
}

inline Snapshot build_snapshot(const Scenario& sc, std::size_t index) {
  const ScenarioConfig& cfg = sc.config;
  Snapshot snap;
  snap.index = index;
  snap.seed = snapshot_seed(cfg.seed, index);

  PlacementSpec spec;
  spec.count = cfg.num_ues;
  spec.per_cell = cfg.per_cell;
  spec.height = cfg.ue_height_m;
  spec.tx_power = dbm_to_watts(cfg.ue_tx_power_dbm);
  std::vector<GroundUe> placed = place_ues(sc.grid, spec, snap.seed);
  if (cfg.rbs_per_ue > 1) {
    for (const GroundUe& ue : placed) {
      auto virt = virtualize_multi_rb_ue(ue, cfg.rbs_per_ue, cfg.num_rbs, snap.ues.size());
      snap.ues.insert(snap.ues.end(), virt.begin(), virt.end());
    }
  } else {
    snap.ues = std::move(placed);
  }

  snap.occupancy = assign_rbs(snap.ues, sc.neighbors, cfg.q, cfg.num_rbs, cfg.assign_order, snap.seed);
  ChannelParams params = sc.channel;
  params.seed = snap.seed;
  snap.channel = build_channel_state(params, sc.grid, snap.ues, snap.occupancy, sc.neighbors, cfg.q, sc.uav_position());
  snap.occupancy.gamma = compute_ground_sinrs(snap.occupancy, snap.channel.state);

  Problem& pr = snap.problem;
  pr.cell_ids = sc.region;
  pr.channel = snap.channel.state.restrict_to(sc.region);
  pr.occupancy = snap.occupancy.restrict_to(sc.region);
  pr.neighbors = sc.neighbors.restrict_to(sc.region);
  pr.clusters = sc.clusters.restrict_to(sc.region);
  select_heads(pr.clusters, pr.channel.F_tilde);

  auto& d = snap.diagnostics;
  d.blocked_ues = snap.occupancy.blocked.size();
  d.clamped_links = snap.channel.diagnostics.clamped;
  d.extrapolated_links = snap.channel.diagnostics.extrapolated;
  d.uav_los_links = snap.channel.diagnostics.uav_los;
  d.region_cells = sc.region.size();
  for (std::size_t n = 0; n < pr.occupancy.num_rbs; ++n) d.unserved_rbs += pr.occupancy.free[n].empty() ? 1 : 0;
  return snap;
}

}  // namespace uavicic
