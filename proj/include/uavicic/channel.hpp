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

// Link gains. Every link draws from its own RNG stream keyed by
// (seed, link kind, endpoints), so results do not depend on evaluation order.
// Per link the draws are taken in a fixed order: LoS, shadowing, fading.

#pragma once

#include "uavicic/antenna.hpp"
#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/pathloss.hpp"
#include "uavicic/rng.hpp"
#include "uavicic/scheduler.hpp"
#include "uavicic/topology.hpp"

#include <span>
#include <vector>

namespace uavicic {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point2 xy() const { return {x, y}; }
};

struct ChannelParams {
  double carrier_freq_hz = 2e9;
  double noise_psd_dbm_hz = -164.0;  // includes the noise figure
  double rb_bandwidth_hz = 180e3;
  UlaPattern bs_antenna;
  UavAntenna uav_antenna;
  PathlossModel terrestrial = simplified_model();
  PathlossModel aerial = simplified_model();
  bool shadowing = true;
  bool fading = true;  // applies only to models whose table asks for fading
  std::uint64_t seed = 0;

  void validate() const {
    if (!(carrier_freq_hz > 0.0)) throw ConfigError("channel.carrier_freq_hz must be > 0");
    if (!(rb_bandwidth_hz > 0.0)) throw ConfigError("channel.rb_bandwidth_hz must be > 0");
    bs_antenna.validate();
    uav_antenna.validate();
  }
};

/// N0 * B in watts.
inline double thermal_noise_watts(const ChannelParams& params) {
  return dbm_to_watts(params.noise_psd_dbm_hz + 10.0 * std::log10(params.rb_bandwidth_hz));
}

struct LinkDraw {
  double gain = 0.0;
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  double fading = 1.0;
  bool los = false;
  bool clamped = false;       // 2-D distance raised to the model floor
  bool extrapolated = false;  // 2-D distance beyond the model range
};

namespace detail {

inline LinkDraw draw_link(const ChannelParams& params, const PathlossModel& base, Point3 tx, const Cell& bs,
                          StreamRng& rng, double extra_gain) {
  const PathlossModel& model = base.resolve(tx.z);
  LinkDraw out;
  LinkGeometry g{distance(tx.xy(), bs.center), tx.z, bs.bs_height, params.carrier_freq_hz};
  if (g.distance_2d < model.min_distance_2d) {
    g.distance_2d = model.min_distance_2d;
    out.clamped = true;
  }
  out.extrapolated = g.distance_2d > model.max_distance_2d;

  out.los = rng.bernoulli(los_probability(model, g));
  out.pathloss_db = pathloss_db(model, out.los, g);
  const double sigma = shadowing_sigma_db(model, out.los, g);
  const double shadow = rng.normal(0.0, 1.0) * sigma;
  out.shadowing_db = params.shadowing ? shadow : 0.0;
  const double fade = rng.unit_exponential();
  out.fading = params.fading && model.fading == FadingKind::rayleigh ? fade : 1.0;

  // Elevation seen from the BS: negative when the transmitter is below the array.
  const double elevation = rad_to_deg(std::atan2(tx.z - bs.bs_height, g.distance_2d));
  out.gain = bs_gain(params.bs_antenna, elevation) * extra_gain *
             db_to_linear(-(out.pathloss_db + out.shadowing_db)) * out.fading;
  return out;
}

}  // namespace detail

/// Ground UE -> BS gain: BS pattern, path loss, shadowing and small-scale fading.
inline LinkDraw draw_terrestrial_gain(const ChannelParams& params, Point3 ue, const Cell& bs, StreamRng& rng) {
  return detail::draw_link(params, params.terrestrial, ue, bs, rng, 1.0);
}

/// UAV -> BS gain, including the UAV antenna. One draw per (UAV, BS) pair.
inline LinkDraw draw_uav_gain(const ChannelParams& params, Point3 uav, const Cell& bs, StreamRng& rng) {
  const double ant = uav_antenna_gain(params.uav_antenna, distance(uav.xy(), bs.center), uav.z, bs.bs_height);
  return detail::draw_link(params, params.aerial, uav, bs, rng, ant);
}

struct LinkDiagnostics {
  std::size_t clamped = 0;
  std::size_t extrapolated = 0;
  std::size_t uav_los = 0;

  void add(const LinkDraw& d) {
    clamped += d.clamped ? 1 : 0;
    extrapolated += d.extrapolated ? 1 : 0;
  }
};

/// K x J gains from every ground UE to every BS.
inline Matrix draw_terrestrial_gains(const ChannelParams& params, const HexGrid& grid, std::span<const GroundUe> ues,
                                     LinkDiagnostics* diag = nullptr) {
  Matrix gains(static_cast<Eigen::Index>(ues.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < ues.size(); ++k) {
    const Point3 pos{ues[k].position.x, ues[k].position.y, ues[k].height};
    for (const Cell& c : grid.cells()) {
      StreamRng rng(params.seed, Stream::terrestrial_link, ues[k].id, c.index);
      const LinkDraw d = draw_terrestrial_gain(params, pos, c, rng);
      if (diag) diag->add(d);
      gains(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c.index)) = d.gain;
    }
  }
  return gains;
}

/// UAV -> BS draws for every cell.
inline std::vector<LinkDraw> draw_uav_gains(const ChannelParams& params, const HexGrid& grid, Point3 uav) {
  std::vector<LinkDraw> out;
  out.reserve(grid.size());
  for (const Cell& c : grid.cells()) {
    StreamRng rng(params.seed, Stream::uav_link, c.index);
    out.push_back(draw_uav_gain(params, uav, c, rng));
  }
  return out;
}

/// sigma_j^2(n): thermal noise plus co-channel ground UEs outside N_j(q) and j.
/// `ue_bs_gains` is K x J with rows in the order of `ues`, whose ids index the rows.
inline Matrix noise_and_residual_ici(const ChannelParams& params, const RbOccupancy& occ,
                                     std::span<const GroundUe> ues, const Matrix& ue_bs_gains,
                                     const NeighborSets& neighbors, int q) {
  std::vector<std::size_t> row_of_id;
  for (std::size_t k = 0; k < ues.size(); ++k) {
    if (ues[k].id >= row_of_id.size()) row_of_id.resize(ues[k].id + 1, ues.size());
    row_of_id[ues[k].id] = k;
  }
  const double noise = thermal_noise_watts(params);
  Matrix sigma2 = Matrix::Constant(static_cast<Eigen::Index>(occ.num_cells), static_cast<Eigen::Index>(occ.num_rbs),
                                   noise);
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    for (std::size_t j = 0; j < occ.num_cells; ++j) {
      double ici = 0.0;
      for (std::size_t i : occ.occupied[n]) {
        if (i == j || neighbors.contains(j, q, i)) continue;
        const std::size_t row = row_of_id.at(*occ.ue_at(i, n));
        ici += occ.tx_power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) *
               ue_bs_gains(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
      }
      sigma2(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) += ici;
    }
  }
  return sigma2;
}

struct ChannelBuild {
  ChannelState state;
  Matrix ue_bs_gains;  // K x J
  std::vector<LinkDraw> uav_links;
  LinkDiagnostics diagnostics;
};

/// Draws every link of a snapshot and assembles H, F_tilde, sigma2 and F.
inline ChannelBuild build_channel_state(const ChannelParams& params, const HexGrid& grid,
                                        std::span<const GroundUe> ues, const RbOccupancy& occ,
                                        const NeighborSets& neighbors, int q, Point3 uav) {
  ChannelBuild out;
  out.ue_bs_gains = draw_terrestrial_gains(params, grid, ues, &out.diagnostics);
  out.uav_links = draw_uav_gains(params, grid, uav);

  Eigen::VectorXd f_tilde(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const LinkDraw& d = out.uav_links[j];
    out.diagnostics.add(d);
    out.diagnostics.uav_los += d.los ? 1 : 0;
    f_tilde(static_cast<Eigen::Index>(j)) = d.gain;
  }

  std::vector<std::size_t> row_of_id;
  for (std::size_t k = 0; k < ues.size(); ++k) {
    if (ues[k].id >= row_of_id.size()) row_of_id.resize(ues[k].id + 1, ues.size());
    row_of_id[ues[k].id] = k;
  }
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(occ.num_cells), static_cast<Eigen::Index>(occ.num_rbs));
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    for (std::size_t j : occ.occupied[n]) {
      const std::size_t row = row_of_id.at(*occ.ue_at(j, n));
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) =
          out.ue_bs_gains(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
    }
  }
  Matrix sigma2 = noise_and_residual_ici(params, occ, ues, out.ue_bs_gains, neighbors, q);
  out.state = ChannelState::make(std::move(h), std::move(f_tilde), std::move(sigma2));
  return out;
}

}  // namespace uavicic
