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

// Experiment orchestration: scenario runs (JSON report), parameter sweeps and
// rate regions (CSV).

#pragma once

#include "uavicic/decentral.hpp"
#include "uavicic/dual_bound.hpp"
#include "uavicic/icic.hpp"
#include "uavicic/scenario.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace uavicic {

inline constexpr const char* kReportSchema = "uavicic.report/1";
inline constexpr const char* kSweepSchema = "uavicic.sweep/1";
inline constexpr const char* kRegionSchema = "uavicic.region/1";

struct SchemeOutcome {
  std::string scheme;
  IcicSolution solution;
  std::optional<MessageLedger> ledger;
};

struct SnapshotResult {
  Snapshot snapshot;
  std::vector<SchemeOutcome> schemes;
  std::optional<DualResult> bound;
};

inline SnapshotResult solve_snapshot(const Scenario& sc, std::size_t index) {
  const ScenarioConfig& cfg = sc.config;
  SnapshotResult res;
  res.snapshot = build_snapshot(sc, index);
  const Problem& pr = res.snapshot.problem;
  const double p_max = sc.p_max_watts();
  const Weights& w = cfg.weights;

  for (const std::string& name : cfg.schemes) {
    SchemeOutcome out;
    out.scheme = name;
    if (name == "egoistic") {
      out.solution = egoistic(pr.channel, pr.occupancy, p_max, w, cfg.gain_floor, true);
    } else if (name == "altruistic") {
      out.solution = altruistic(pr.channel, pr.occupancy, p_max, w, cfg.gain_floor, true);
    } else if (name == "terrestrial") {
      out.solution = terrestrial_icic(pr.channel, pr.occupancy, pr.neighbors, cfg.q, p_max, w, cfg.gain_floor);
    } else if (name == "sca") {
      ScaOptions opt;
      opt.epsilon = cfg.epsilon;
      opt.max_iters = cfg.max_iters;
      opt.init = cfg.sca_init;
      opt.gain_floor = cfg.gain_floor;
      opt.allow_unserved = true;
      out.solution = sca_solve(pr.channel, pr.occupancy, w, p_max, opt);
    } else {
      DecentralOptions opt;
      opt.mode = name == "decentralized" ? DecentralMode::one_round : DecentralMode::iterative;
      opt.epsilon = cfg.epsilon;
      opt.max_rounds = cfg.max_iters;
      opt.gain_floor = cfg.gain_floor;
      DecentralResult d = run_decentralized(pr.channel, pr.occupancy, pr.clusters, w, p_max, opt);
      out.solution = std::move(d.solution);
      out.ledger = std::move(d.ledger);
    }
    out.solution.scheme = name;
    res.schemes.push_back(std::move(out));
  }

  if (cfg.bound) {
    DualOptions opt;
    opt.opa.epsilon = cfg.opa_epsilon;
    opt.opa.max_iters = cfg.opa_max_iters;
    DualResult b = dual_minimize(pr.channel, pr.occupancy, w, p_max, opt, true);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : res.schemes) best = std::max(best, s.solution.rates.weighted);
    b.gap_vs_primal = res.schemes.empty() || b.g_value == 0.0 ? 0.0 : (b.g_value - best) / b.g_value;
    res.bound = std::move(b);
  }
  return res;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads; the first
/// exception is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct RunOptions {
  std::size_t parallel = 1;
};

struct MeanStat {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half-width
};

inline MeanStat mean_stat(const std::vector<double>& xs) {
  MeanStat m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    m.half_width = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return m;
}

inline nlohmann::ordered_json to_json(const MeanStat& m) { return {{"mean", m.mean}, {"half_width", m.half_width}}; }

inline nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  auto a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::ordered_json to_json(const MessageLedger& l) {
  return {{"uplink_params", l.uplink_params},
          {"downlink_params", l.downlink_params},
          {"beacons", l.beacons},
          {"total", l.total()},
          {"uplink_per_round", l.uplink_per_round},
          {"downlink_per_round", l.downlink_per_round}};
}

inline nlohmann::ordered_json to_json(const SchemeOutcome& o, const std::vector<std::size_t>& cell_ids) {
  const IcicSolution& s = o.solution;
  auto assoc = nlohmann::ordered_json::array();
  for (const auto& j : s.association.j_star) {
    if (j) {
      assoc.push_back(cell_ids[*j] + 1);
    } else {
      assoc.push_back(nullptr);
    }
  }
  nlohmann::ordered_json j{{"scheme", o.scheme},
                           {"uav_rate", s.rates.uav_rate},
                           {"ground_rate", s.rates.ground_rate},
                           {"ground_rate_no_uav", s.rates.ground_rate_no_uav},
                           {"weighted", s.rates.weighted},
                           {"total_power_w", s.total_power()},
                           {"denied", s.denied},
                           {"power_w", to_json(s.p)},
                           {"serving_cell", assoc},
                           {"iterations", s.diagnostics.iterations},
                           {"converged", s.diagnostics.converged},
                           {"objective_trace", s.diagnostics.objective_trace}};
  if (o.ledger) j["ledger"] = to_json(*o.ledger);
  return j;
}

inline nlohmann::ordered_json to_json(const SnapshotResult& r) {
  const auto& d = r.snapshot.diagnostics;
  nlohmann::ordered_json j{{"index", r.snapshot.index},
                           {"seed", r.snapshot.seed},
                           {"diagnostics",
                            {{"blocked_ues", d.blocked_ues},
                             {"clamped_links", d.clamped_links},
                             {"extrapolated_links", d.extrapolated_links},
                             {"uav_los_links", d.uav_los_links},
                             {"region_cells", d.region_cells},
                             {"unserved_rbs", d.unserved_rbs}}}};
  auto schemes = nlohmann::ordered_json::object();
  for (const auto& s : r.schemes) schemes[s.scheme] = to_json(s, r.snapshot.problem.cell_ids);
  j["schemes"] = std::move(schemes);
  if (r.bound) {
    j["bound"] = {{"value", r.bound->g_value},
                  {"nu_star", r.bound->nu_star},
                  {"gap_vs_best_scheme", r.bound->gap_vs_primal},
                  {"evaluations", r.bound->evaluations}};
  }
  return j;
}

struct RunReport {
  ScenarioConfig config;
  std::vector<SnapshotResult> snapshots;

  /// Per-snapshot values of one scheme field ("uav_rate", "ground_rate", "weighted").
  std::vector<double> series(const std::string& scheme, const std::string& field) const {
    std::vector<double> xs;
    for (const auto& s : snapshots) {
      for (const auto& o : s.schemes) {
        if (o.scheme != scheme) continue;
        const RateReport& r = o.solution.rates;
        xs.push_back(field == "uav_rate" ? r.uav_rate : field == "ground_rate" ? r.ground_rate : r.weighted);
      }
    }
    return xs;
  }

  std::vector<double> bound_series() const {
    std::vector<double> xs;
    for (const auto& s : snapshots) {
      if (s.bound) xs.push_back(s.bound->g_value);
    }
    return xs;
  }
};

inline RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
  const Scenario sc = build_scenario(cfg);
  RunReport rep;
  rep.config = cfg;
  rep.snapshots.resize(cfg.snapshots);
  parallel_for(cfg.snapshots, opt.parallel, [&](std::size_t i) { rep.snapshots[i] = solve_snapshot(sc, i); });
  return rep;
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  auto per_cell = nlohmann::ordered_json::array();
  for (auto k : c.per_cell) per_cell.push_back(k);
  const char* init = c.sca_init == ScaInit::automatic    ? "automatic"
                     : c.sca_init == ScaInit::altruistic ? "altruistic"
                     : c.sca_init == ScaInit::egoistic   ? "egoistic"
                                                         : "zero";
  return {{"seed", c.seed},
          {"snapshots", c.snapshots},
          {"schemes", c.schemes},
          {"bound", c.bound},
          {"grid", {{"cell_radius_m", c.cell_radius_m}, {"tiers", c.tiers}, {"bs_height_m", c.bs_height_m}}},
          {"ues",
           {{"count", c.num_ues},
            {"height_m", c.ue_height_m},
            {"tx_power_dbm", c.ue_tx_power_dbm},
            {"q", c.q},
            {"num_rbs", c.num_rbs},
            {"per_cell", per_cell},
            {"rbs_per_ue", c.rbs_per_ue},
            {"assign_order", c.assign_order == AssignOrder::sequential ? "sequential" : "random"}}},
          {"uav",
           {{"x_m", c.uav_x_m},
            {"y_m", c.uav_y_m},
            {"height_m", c.uav_height_m},
            {"pmax_dbm", c.uav_pmax_dbm},
            {"antenna",
             {{"kind", c.uav_antenna.kind == UavAntennaKind::isotropic ? "isotropic" : "directional"},
              {"half_beamwidth_deg", c.uav_antenna.half_beamwidth_deg},
              {"main_gain_const", c.uav_antenna.main_gain_const},
              {"side_gain", c.uav_antenna.side_gain}}}}},
          {"channel",
           {{"carrier_freq_hz", c.carrier_freq_hz},
            {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
            {"rb_bandwidth_hz", c.rb_bandwidth_hz},
            {"terrestrial_model", c.terrestrial_model},
            {"aerial_model", c.aerial_model},
            {"table", c.table_path},
            {"shadowing", c.shadowing},
            {"fading", c.fading},
            {"bs_antenna",
             {{"num_elements", c.bs_antenna.num_elements},
              {"spacing", c.bs_antenna.spacing},
              {"downtilt_deg", c.bs_antenna.downtilt_deg}}}}},
          {"weights", {{"mu_u", c.weights.mu_u}, {"mu_g", c.weights.mu_g}}},
          {"solver",
           {{"epsilon", c.epsilon},
            {"max_iters", c.max_iters},
            {"opa_epsilon", c.opa_epsilon},
            {"opa_max_iters", c.opa_max_iters},
            {"gain_floor", c.gain_floor},
            {"init", init}}},
          {"decentral", {{"cluster_size", c.cluster_size}}}};
}

inline nlohmann::ordered_json to_json(const RunReport& rep) {
  nlohmann::ordered_json j{{"schema", kReportSchema}, {"config", config_to_json(rep.config)}};
  auto summary = nlohmann::ordered_json::object();
  for (const std::string& s : rep.config.schemes) {
    summary[s] = {{"uav_rate", to_json(mean_stat(rep.series(s, "uav_rate")))},
                  {"ground_rate", to_json(mean_stat(rep.series(s, "ground_rate")))},
                  {"weighted", to_json(mean_stat(rep.series(s, "weighted")))}};
  }
  if (rep.config.bound) summary["bound"] = {{"weighted", to_json(mean_stat(rep.bound_series()))}};
  j["summary"] = std::move(summary);
  auto snaps = nlohmann::ordered_json::array();
  for (const auto& s : rep.snapshots) snaps.push_back(to_json(s));
  j["snapshots"] = std::move(snaps);
  return j;
}

/// Shortest round-trip decimal form, identical to the JSON report's.
inline std::string csv_number(double x) { return nlohmann::json(x).dump(); }

enum class SweepAxis { pmax, num_ues, altitude, beamwidth };

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "pmax") return SweepAxis::pmax;
  if (s == "num_ues") return SweepAxis::num_ues;
  if (s == "altitude") return SweepAxis::altitude;
  if (s == "beamwidth") return SweepAxis::beamwidth;
  throw ConfigError("sweep axis: expected pmax, num_ues, altitude or beamwidth, got '" + s + "'");
}

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::pmax: return "pmax";
    case SweepAxis::num_ues: return "num_ues";
    case SweepAxis::altitude: return "altitude";
    case SweepAxis::beamwidth: return "beamwidth";
  }
  return "?";
}

inline ScenarioConfig apply_axis(ScenarioConfig c, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::pmax:
      c.uav_pmax_dbm = value;
      break;
    case SweepAxis::num_ues:
      if (!(value >= 1.0) || value != std::floor(value)) throw ConfigError("sweep num_ues values must be integers >= 1");
      c.num_ues = static_cast<std::size_t>(value);
      c.per_cell.clear();
      break;
    case SweepAxis::altitude:
      c.uav_height_m = value;
      break;
    case SweepAxis::beamwidth:
      c.uav_antenna.half_beamwidth_deg = value;
      if (value < 90.0) c.uav_antenna.kind = UavAntennaKind::directional;
      break;
  }
  return c;
}

struct SweepResult {
  SweepAxis axis;
  std::vector<double> values;
  std::vector<RunReport> runs;
};

inline SweepResult sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                         const RunOptions& opt = {}) {
  if (values.empty()) throw ConfigError("sweep: values must be nonempty");
  const bool up = std::is_sorted(values.begin(), values.end());
  const bool down = std::is_sorted(values.rbegin(), values.rend());
  if (!up && !down) throw ConfigError("sweep: values must be monotone");
  SweepResult res{axis, values, {}};
  for (double v : values) res.runs.push_back(run_scenario(apply_axis(base, axis, v), opt));
  return res;
}

inline void write_sweep_csv(const SweepResult& s, std::ostream& os) {
  os << "schema,axis,value,scheme,snapshots,uav_rate,uav_rate_hw,ground_rate,ground_rate_hw,weighted,weighted_hw,"
        "bound,gap\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const RunReport& rep = s.runs[i];
    const MeanStat bound = mean_stat(rep.bound_series());
    for (const std::string& scheme : rep.config.schemes) {
      const MeanStat u = mean_stat(rep.series(scheme, "uav_rate"));
      const MeanStat g = mean_stat(rep.series(scheme, "ground_rate"));
      const MeanStat q = mean_stat(rep.series(scheme, "weighted"));
      os << kSweepSchema << ',' << axis_name(s.axis) << ',' << csv_number(s.values[i]) << ',' << scheme << ','
         << rep.snapshots.size() << ',' << csv_number(u.mean) << ',' << csv_number(u.half_width) << ','
         << csv_number(g.mean) << ',' << csv_number(g.half_width) << ',' << csv_number(q.mean) << ','
         << csv_number(q.half_width) << ',';
      if (rep.config.bound) {
        os << csv_number(bound.mean) << ',' << csv_number(bound.mean > 0.0 ? (bound.mean - q.mean) / bound.mean : 0.0);
      } else {
        os << ',';
      }
      os << '\n';
    }
  }
}

struct RegionPoint {
  std::string label;
  std::string scheme;
  double mu_u = 0.0;
  double mu_g = 0.0;
  MeanStat uav_rate;
  MeanStat ground_rate;
};

/// SCA operating points for each mu_g / mu_u ratio plus both extremes, and the
/// egoistic and altruistic reference points.
inline std::vector<RegionPoint> rate_region(const ScenarioConfig& base, const std::vector<double>& ratios,
                                            const RunOptions& opt = {}) {
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("region: weight ratios must be > 0");
  }
  std::vector<RegionPoint> out;
  auto run = [&](const std::string& label, double mu_u, double mu_g, std::vector<std::string> schemes) {
    ScenarioConfig c = base;
    c.weights = {mu_u, mu_g};
    c.schemes = std::move(schemes);
    c.bound = false;
    const RunReport rep = run_scenario(c, opt);
    for (const std::string& s : c.schemes) {
      out.push_back({label, s, mu_u, mu_g, mean_stat(rep.series(s, "uav_rate")), mean_stat(rep.series(s, "ground_rate"))});
    }
  };
  run("mu_g=0", 1.0, 0.0, {"sca", "egoistic", "altruistic"});
  for (double r : ratios) run("ratio=" + csv_number(r), 1.0, r, {"sca"});
  run("mu_u=0", 0.0, 1.0, {"sca"});
  return out;
}

inline void write_region_csv(const std::vector<RegionPoint>& pts, std::ostream& os) {
  os << "schema,label,scheme,mu_u,mu_g,uav_rate,uav_rate_hw,ground_rate,ground_rate_hw\n";
  for (const auto& p : pts) {
    os << kRegionSchema << ',' << p.label << ',' << p.scheme << ',' << csv_number(p.mu_u) << ',' << csv_number(p.mu_g)
       << ',' << csv_number(p.uav_rate.mean) << ',' << csv_number(p.uav_rate.half_width) << ','
       << csv_number(p.ground_rate.mean) << ',' << csv_number(p.ground_rate.half_width) << '\n';
  }
}

}  // namespace uavicic
