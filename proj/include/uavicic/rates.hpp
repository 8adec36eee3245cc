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

// Rates in bps/Hz (bandwidth normalized to 1 Hz).

#pragma once

#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/scheduler.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uavicic {

/// Serving cell of the UAV per RB; empty where the RB carries no UAV power.
struct Association {
  std::vector<std::optional<std::size_t>> j_star;
  Eigen::VectorXd F_u;  // F_{j_n}(n), 0 where unassociated
};

struct PerRbRate {
  double total = 0.0;
  Eigen::VectorXd per_rb;
};

struct RateReport {
  double uav_rate = 0.0;
  double ground_rate = 0.0;
  double ground_rate_no_uav = 0.0;
  double weighted = 0.0;
  Eigen::VectorXd uav_per_rb;
  Eigen::VectorXd ground_per_rb;
};

/// Summed per RB first, in the same order as the rate with the UAV, so the two
/// agree bit for bit when the UAV stays off every occupied RB.
inline double ground_rate_no_uav(const RbOccupancy& occ) {
  double sum = 0.0;
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    double rb = 0.0;
    for (std::size_t j : occ.occupied[n]) {
      rb += log2_1p(occ.gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)));
    }
    sum += rb;
  }
  return sum;
}

/// Ground rate of RB n when the UAV transmits p_n there.
inline double ground_rate_on_rb(const RbOccupancy& occ, const ChannelState& cs, std::size_t n, double p_n) {
  double sum = 0.0;
  const auto c = static_cast<Eigen::Index>(n);
  for (std::size_t j : occ.occupied[n]) {
    const auto r = static_cast<Eigen::Index>(j);
    sum += log2_1p(occ.gamma(r, c) / (1.0 + p_n * cs.F(r, c)));
  }
  return sum;
}

inline PerRbRate ground_rate_with_uav(const RbOccupancy& occ, const ChannelState& cs, const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != occ.num_rbs) throw std::invalid_argument("power vector size != num_rbs");
  PerRbRate out{0.0, Eigen::VectorXd::Zero(p.size())};
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    const double p_n = p(static_cast<Eigen::Index>(n));
    if (p_n < 0.0) throw ConstraintViolation("negative UAV power on RB " + std::to_string(n));
    out.per_rb(static_cast<Eigen::Index>(n)) = ground_rate_on_rb(occ, cs, n, p_n);
    out.total += out.per_rb(static_cast<Eigen::Index>(n));
  }
  return out;
}

/// UAV rate; every RB with positive power must be served by a cell free on that RB.
inline PerRbRate uav_rate(const ChannelState& cs, const RbOccupancy& occ, const Association& assoc,
                          const Eigen::VectorXd& p) {
  PerRbRate out{0.0, Eigen::VectorXd::Zero(p.size())};
  for (std::size_t n = 0; n < static_cast<std::size_t>(p.size()); ++n) {
    const double p_n = p(static_cast<Eigen::Index>(n));
    if (p_n < 0.0) throw ConstraintViolation("negative UAV power on RB " + std::to_string(n));
    if (p_n == 0.0) continue;
    if (n >= assoc.j_star.size() || !assoc.j_star[n]) {
      throw ConstraintViolation("UAV transmits on RB " + std::to_string(n) + " without a serving cell");
    }
    const std::size_t j = *assoc.j_star[n];
    if (occ.is_occupied(j, n)) {
      throw ConstraintViolation("UAV associated with cell " + std::to_string(j + 1) + " on RB " + std::to_string(n) +
                                ", which a ground UE already uses");
    }
    const double r = log2_1p(p_n * cs.F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)));
    out.per_rb(static_cast<Eigen::Index>(n)) = r;
    out.total += r;
  }
  return out;
}

inline double weighted_objective(const Weights& w, double uav, double ground) { return w.mu_u * uav + w.mu_g * ground; }

inline RateReport evaluate(const ChannelState& cs, const RbOccupancy& occ, const Association& assoc,
                           const Eigen::VectorXd& p, const Weights& w) {
  RateReport r;
  const PerRbRate u = uav_rate(cs, occ, assoc, p);
  const PerRbRate g = ground_rate_with_uav(occ, cs, p);
  r.uav_rate = u.total;
  r.uav_per_rb = u.per_rb;
  r.ground_rate = g.total;
  r.ground_per_rb = g.per_rb;
  r.ground_rate_no_uav = ground_rate_no_uav(occ);
  r.weighted = weighted_objective(w, r.uav_rate, r.ground_rate);
  return r;
}

}  // namespace uavicic
