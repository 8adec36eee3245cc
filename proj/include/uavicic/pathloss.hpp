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

// Table-driven path-loss models.
//
// Each model has a LoS and an NLoS branch sharing one formula family
// (all logs base 10, distances in m, frequency in GHz, h = transmitter height):
//
//   PL = intercept + (distance_slope + distance_height_slope * log h) * log d3d
//        + frequency_slope * log fc + height_slope * (h - height_reference)
//
// A branch with `breakpoint_far_slope` switches beyond the breakpoint distance
// d_bp = 4 (h_bs - h_e)(h - h_e) fc / c to
//
//   PL = intercept + breakpoint_far_slope * log d3d + frequency_slope * log fc
//        + breakpoint_coef * log(d_bp^2 + (h_bs - h)^2)
//
// Shadowing sigma is `shadowing_sigma_db * exp(-shadowing_sigma_height_decay * h)`.
// The coefficients live in a flat `model.key = value` text file; see
// data/pathloss.table for the grammar and the bundled models.

#pragma once

#include "uavicic/common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace uavicic {

enum class LosProbabilityKind { fixed, uma, uma_aerial, logistic_elevation };
enum class FadingKind { none, rayleigh };

struct LosProbabilityParams {
  LosProbabilityKind kind = LosProbabilityKind::fixed;
  double value = 1.0;
  // Terrestrial UMa: 1 below d1, then d1/d + exp(-d/d2)(1 - d1/d), with the
  // height correction for h > 13 m.
  double d1 = 18.0;
  double d2 = 63.0;
  // Aerial UMa: d1 = max(d1_log_coef log h + d1_offset, d1_min),
  // p1 = p1_log_coef log h + p1_offset, LoS certain above certain_height.
  double d1_log_coef = 460.0;
  double d1_offset = -700.0;
  double d1_min = 18.0;
  double p1_log_coef = 4300.0;
  double p1_offset = -3800.0;
  double certain_height = 100.0;
  // Logistic in the elevation angle (degrees): 1 / (1 + a exp(-b (theta - a))).
  double a = 9.61;
  double b = 0.16;
};

struct PathlossBranch {
  double intercept = 0.0;
  double distance_slope = 0.0;
  double distance_height_slope = 0.0;
  double frequency_slope = 0.0;
  double height_slope = 0.0;
  double height_reference = 0.0;
  double shadowing_sigma_db = 0.0;
  double shadowing_sigma_height_decay = 0.0;
  std::optional<double> breakpoint_far_slope;
  double breakpoint_coef = 0.0;
  double effective_env_height = 1.0;
};

struct LinkGeometry {
  double distance_2d = 0.0;   // m
  double tx_height = 0.0;     // UE or UAV height, m
  double bs_height = 0.0;     // m
  double carrier_freq_hz = 2e9;

  double distance_3d() const { return std::hypot(distance_2d, tx_height - bs_height); }
  double elevation_deg() const { return rad_to_deg(std::atan2(tx_height - bs_height, distance_2d)); }
};

struct PathlossModel {
  std::string name;
  LosProbabilityParams los_probability;
  PathlossBranch los;
  PathlossBranch nlos;
  bool nlos_floor_by_los = false;
  FadingKind fading = FadingKind::none;
  double min_distance_2d = 0.0;
  double max_distance_2d = std::numeric_limits<double>::infinity();
  double min_height = 0.0;
  double max_height = std::numeric_limits<double>::infinity();
  double fallback_below_height = -std::numeric_limits<double>::infinity();
  std::string fallback_name;
  std::shared_ptr<const PathlossModel> fallback;

  /// Model that actually applies at transmitter height h (follows the fallback chain).
  const PathlossModel& resolve(double h) const {
    if (fallback && h <= fallback_below_height) return fallback->resolve(h);
    if (h < min_height || h > max_height) {
      std::ostringstream os;
      os << "path-loss model '" << name << "': transmitter height " << h << " m outside the valid range ["
         << min_height << ", " << max_height << "] m";
      throw GeometryError(os.str());
    }
    return *this;
  }
};

/// LoS probability of `model` (already resolved for the height) for the geometry.
inline double los_probability(const PathlossModel& model, const LinkGeometry& g) {
  const auto& lp = model.los_probability;
  const double d = g.distance_2d;
  const double h = g.tx_height;
  switch (lp.kind) {
    case LosProbabilityKind::fixed:
      return std::clamp(lp.value, 0.0, 1.0);
    case LosProbabilityKind::uma: {
      if (d <= lp.d1) return 1.0;
      const double c = h <= 13.0 ? 0.0 : std::pow((h - 13.0) / 10.0, 1.5);
      const double base = lp.d1 / d + std::exp(-d / lp.d2) * (1.0 - lp.d1 / d);
      return std::clamp(base * (1.0 + c * 1.25 * std::pow(d / 100.0, 3.0) * std::exp(-d / 150.0)), 0.0, 1.0);
    }
    case LosProbabilityKind::uma_aerial: {
      if (h > lp.certain_height) return 1.0;
      const double lh = std::log10(h);
      const double d1 = std::max(lp.d1_log_coef * lh + lp.d1_offset, lp.d1_min);
      const double p1 = lp.p1_log_coef * lh + lp.p1_offset;
      if (d <= d1) return 1.0;
      return std::clamp(d1 / d + std::exp(-d / p1) * (1.0 - d1 / d), 0.0, 1.0);
    }
    case LosProbabilityKind::logistic_elevation: {
      const double theta = g.elevation_deg();
      return 1.0 / (1.0 + lp.a * std::exp(-lp.b * (theta - lp.a)));
    }
  }
  return 1.0;
}

inline double branch_pathloss_db(const PathlossBranch& br, const LinkGeometry& g) {
  const double h = g.tx_height;
  const double d3 = g.distance_3d();
  const double fc_ghz = g.carrier_freq_hz / 1e9;
  if (br.breakpoint_far_slope) {
    const double d_bp =
        4.0 * (g.bs_height - br.effective_env_height) * (h - br.effective_env_height) * g.carrier_freq_hz / kSpeedOfLight;
    if (d_bp > 0.0 && g.distance_2d > d_bp) {
      const double dh = g.bs_height - h;
      return br.intercept + *br.breakpoint_far_slope * std::log10(d3) + br.frequency_slope * std::log10(fc_ghz) +
             br.breakpoint_coef * std::log10(d_bp * d_bp + dh * dh);
    }
  }
  return br.intercept + (br.distance_slope + br.distance_height_slope * std::log10(h)) * std::log10(d3) +
         br.frequency_slope * std::log10(fc_ghz) + br.height_slope * (h - br.height_reference);
}

inline double pathloss_db(const PathlossModel& model, bool los, const LinkGeometry& g) {
  const double pl_los = branch_pathloss_db(model.los, g);
  if (los) return pl_los;
  const double pl_nlos = branch_pathloss_db(model.nlos, g);
  return model.nlos_floor_by_los ? std::max(pl_los, pl_nlos) : pl_nlos;
}

inline double shadowing_sigma_db(const PathlossModel& model, bool los, const LinkGeometry& g) {
  const PathlossBranch& br = los ? model.los : model.nlos;
  return br.shadowing_sigma_db * std::exp(-br.shadowing_sigma_height_decay * g.tx_height);
}

/// Exponent-alpha model with a logistic LoS probability in the elevation angle,
/// no shadowing and no fading unless requested. Intercept is free-space loss at 1 m.
inline PathlossModel simplified_model(double alpha_los = 2.0, double alpha_nlos = 3.0, double logistic_a = 9.61,
                                      double logistic_b = 0.16) {
  PathlossModel m;
  m.name = "simplified";
  m.los_probability.kind = LosProbabilityKind::logistic_elevation;
  m.los_probability.a = logistic_a;
  m.los_probability.b = logistic_b;
  const double fspl_1m = 20.0 * std::log10(4.0 * kPi * 1e9 / kSpeedOfLight);
  m.los.intercept = fspl_1m;
  m.los.distance_slope = 10.0 * alpha_los;
  m.los.frequency_slope = 20.0;
  m.nlos = m.los;
  m.nlos.distance_slope = 10.0 * alpha_nlos;
  return m;
}

class PathlossTable {
 public:
  const PathlossModel& at(const std::string& name) const {
    auto it = models_.find(name);
    if (it == models_.end()) throw ConfigError("path-loss table has no model named '" + name + "'");
    return *it->second;
  }
  bool contains(const std::string& name) const { return models_.count(name) != 0; }
  std::size_t size() const { return models_.size(); }

  friend PathlossTable parse_pathloss_table(std::istream& in, const std::string& source);

 private:
  std::map<std::string, std::shared_ptr<PathlossModel>> models_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses `model.key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and malformed numbers are errors reported with source:line.
inline PathlossTable parse_pathloss_table(std::istream& in, const std::string& source) {
  PathlossTable table;
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> raw;
  std::string line;
  int lineno = 0;
  auto fail = [&](int at, const std::string& what) -> void {
    throw ConfigError(source + ":" + std::to_string(at) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'model.key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) fail(lineno, "key '" + key + "' lacks a model prefix");
    if (value.empty()) fail(lineno, "empty value for '" + key + "'");
    const std::string model = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    if (!raw[model].emplace(field, std::make_pair(value, lineno)).second) fail(lineno, "duplicate key '" + key + "'");
  }

  for (auto& [name, fields] : raw) {
    auto m = std::make_shared<PathlossModel>();
    m->name = name;
    std::map<std::string, bool> seen;
    for (auto& [field, vl] : fields) {
      const auto& [value, at] = vl;
      auto number = [&]() {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(value, &used);
        } catch (const std::exception&) {
          fail(at, "'" + name + "." + field + "': not a number: '" + value + "'");
        }
        if (used != value.size()) fail(at, "'" + name + "." + field + "': trailing characters in '" + value + "'");
        return v;
      };
      auto boolean = [&]() {
        if (value == "true") return true;
        if (value == "false") return false;
        fail(at, "'" + name + "." + field + "': expected true or false");
        return false;
      };
      auto branch_field = [&](PathlossBranch& br, const std::string& f) {
        if (f == "intercept") br.intercept = number();
        else if (f == "distance_slope") br.distance_slope = number();
        else if (f == "distance_height_slope") br.distance_height_slope = number();
        else if (f == "frequency_slope") br.frequency_slope = number();
        else if (f == "height_slope") br.height_slope = number();
        else if (f == "height_reference") br.height_reference = number();
        else if (f == "shadowing_sigma_db") br.shadowing_sigma_db = number();
        else if (f == "shadowing_sigma_height_decay") br.shadowing_sigma_height_decay = number();
        else if (f == "breakpoint_far_slope") br.breakpoint_far_slope = number();
        else if (f == "breakpoint_coef") br.breakpoint_coef = number();
        else if (f == "effective_env_height") br.effective_env_height = number();
        else return false;
        return true;
      };
      auto& lp = m->los_probability;
      bool known = true;
      if (field == "los_probability") {
        if (value == "fixed") lp.kind = LosProbabilityKind::fixed;
        else if (value == "uma") lp.kind = LosProbabilityKind::uma;
        else if (value == "uma_aerial") lp.kind = LosProbabilityKind::uma_aerial;
        else if (value == "logistic_elevation") lp.kind = LosProbabilityKind::logistic_elevation;
        else fail(at, "unknown los_probability kind '" + value + "'");
      } else if (field == "los_probability.value") lp.value = number();
      else if (field == "los_probability.d1") lp.d1 = number();
      else if (field == "los_probability.d2") lp.d2 = number();
      else if (field == "los_probability.d1_log_coef") lp.d1_log_coef = number();
      else if (field == "los_probability.d1_offset") lp.d1_offset = number();
      else if (field == "los_probability.d1_min") lp.d1_min = number();
      else if (field == "los_probability.p1_log_coef") lp.p1_log_coef = number();
      else if (field == "los_probability.p1_offset") lp.p1_offset = number();
      else if (field == "los_probability.certain_height") lp.certain_height = number();
      else if (field == "los_probability.a") lp.a = number();
      else if (field == "los_probability.b") lp.b = number();
      else if (field.rfind("los.", 0) == 0) known = branch_field(m->los, field.substr(4));
      else if (field.rfind("nlos.", 0) == 0) {
        if (field == "nlos.floor_by_los") m->nlos_floor_by_los = boolean();
        else known = branch_field(m->nlos, field.substr(5));
      } else if (field == "fading") {
        if (value == "none") m->fading = FadingKind::none;
        else if (value == "rayleigh") m->fading = FadingKind::rayleigh;
        else fail(at, "unknown fading kind '" + value + "'");
      } else if (field == "min_distance_2d") m->min_distance_2d = number();
      else if (field == "max_distance_2d") m->max_distance_2d = number();
      else if (field == "min_height") m->min_height = number();
      else if (field == "max_height") m->max_height = number();
      else if (field == "fallback_model") m->fallback_name = value;
      else if (field == "fallback_below_height") m->fallback_below_height = number();
      else known = false;
      if (!known) fail(at, "unknown key '" + name + "." + field + "'");
      seen[field] = true;
    }
    for (const char* required : {"los_probability", "los.intercept", "los.distance_slope", "nlos.intercept",
                                 "nlos.distance_slope"}) {
      if (!seen.count(required)) throw ConfigError(source + ": model '" + name + "' is missing '" + required + "'");
    }
    table.models_.emplace(name, std::move(m));
  }

  for (auto& [name, m] : table.models_) {
    if (m->fallback_name.empty()) continue;
    auto it = table.models_.find(m->fallback_name);
    if (it == table.models_.end() || it->first == name) {
      throw ConfigError(source + ": model '" + name + "' falls back to unknown model '" + m->fallback_name + "'");
    }
    m->fallback = it->second;
  }
  for (auto& [name, m] : table.models_) {
    const PathlossModel* cur = m.get();
    for (std::size_t hops = 0; cur->fallback; ++hops) {
      if (hops > table.models_.size()) throw ConfigError(source + ": fallback cycle through model '" + name + "'");
      cur = cur->fallback.get();
    }
  }
  return table;
}

inline PathlossTable load_pathloss_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open path-loss table '" + path + "'");
  return parse_pathloss_table(in, path);
}

}  // namespace uavicic
