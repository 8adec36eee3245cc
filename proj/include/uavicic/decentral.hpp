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

// Clustered protocol. Each cluster head condenses its cluster into two numbers
// per RB: V (summed interference price of its occupied cells) and W (best UAV
// gain among its free cells). The UAV only ever sees V and W; the head of the
// winning cluster picks the serving cell.

#pragma once

#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/icic.hpp"
#include "uavicic/rates.hpp"
#include "uavicic/scheduler.hpp"
#include "uavicic/topology.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uavicic {

struct ClusterPartition {
  std::vector<std::vector<std::size_t>> clusters;  // ascending cell indices
  std::vector<std::size_t> head;

  std::size_t size() const { return clusters.size(); }

  /// Re-index onto a subset of cells (`ids[i]` is the original index of new
  /// cell i); clusters left empty are dropped and heads reset to the first member.
  ClusterPartition restrict_to(const std::vector<std::size_t>& ids) const {
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < ids.size(); ++i) local.emplace(ids[i], i);
    ClusterPartition out;
    for (const auto& c : clusters) {
      std::vector<std::size_t> members;
      for (std::size_t j : c) {
        if (auto it = local.find(j); it != local.end()) members.push_back(it->second);
      }
      if (members.empty()) continue;
      std::sort(members.begin(), members.end());
      out.head.push_back(members.front());
      out.clusters.push_back(std::move(members));
    }
    return out;
  }
};

/// Member with the strongest UAV link heads each cluster (lowest index on ties).
inline void select_heads(ClusterPartition& part, const Eigen::VectorXd& f_tilde) {
  part.head.resize(part.clusters.size());
  for (std::size_t m = 0; m < part.clusters.size(); ++m) {
    std::size_t best = part.clusters[m].front();
    for (std::size_t j : part.clusters[m]) {
      if (f_tilde(static_cast<Eigen::Index>(j)) > f_tilde(static_cast<Eigen::Index>(best))) best = j;
    }
    part.head[m] = best;
  }
}

/// Cells sorted row by row (axial r, then q) and cut into runs of `cluster_size`.
/// The last cluster may be smaller. Heads default to the first member.
inline ClusterPartition make_clusters(const HexGrid& grid, std::size_t cluster_size) {
  if (cluster_size == 0) throw ConfigError("decentral.cluster_size must be >= 1");
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Axial x = grid.cell(a).axial, y = grid.cell(b).axial;
    return x.r != y.r ? x.r < y.r : x.q < y.q;
  });
  ClusterPartition part;
  for (std::size_t start = 0; start < order.size(); start += cluster_size) {
    const std::size_t end = std::min(order.size(), start + cluster_size);
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(members.begin(), members.end());
    part.head.push_back(members.front());
    part.clusters.push_back(std::move(members));
  }
  return part;
}

/// What the cluster heads send to the UAV.
struct ClusterReport {
  Matrix V;  // M x N interference prices
  Matrix W;  // M x N best free-cell gains, 0 where the cluster has no free cell
};

/// What each head keeps to itself: its best free cell per RB.
struct HeadState {
  std::vector<std::vector<std::optional<std::size_t>>> best_cell;  // [m][n]
  Eigen::VectorXd ground_rate;  // per-cluster ground rate at the anchor, bps/Hz
};

/// Price of one occupied cell at the anchor power.
inline double cell_price(double gamma, double f, double anchor) {
  const double base = 1.0 + anchor * f;
  return f * gamma / (kLn2 * (base + gamma) * base);
}

inline ClusterReport cluster_report(const ClusterPartition& part, const ChannelState& cs, const RbOccupancy& occ,
                                    const Eigen::VectorXd& anchor, HeadState* heads = nullptr) {
  const auto m_count = static_cast<Eigen::Index>(part.size());
  const auto n_count = static_cast<Eigen::Index>(occ.num_rbs);
  ClusterReport rep{Matrix::Zero(m_count, n_count), Matrix::Zero(m_count, n_count)};
  if (heads) {
    heads->best_cell.assign(part.size(), std::vector<std::optional<std::size_t>>(occ.num_rbs));
    heads->ground_rate = Eigen::VectorXd::Zero(m_count);
  }
  for (std::size_t m = 0; m < part.size(); ++m) {
    for (std::size_t n = 0; n < occ.num_rbs; ++n) {
      const auto col = static_cast<Eigen::Index>(n);
      double v = 0.0;
      double w = 0.0;
      double rate = 0.0;
      std::optional<std::size_t> best;
      for (std::size_t j : part.clusters[m]) {
        const auto row = static_cast<Eigen::Index>(j);
        if (occ.is_occupied(j, n)) {
          v += cell_price(occ.gamma(row, col), cs.F(row, col), anchor(col));
          rate += log2_1p(occ.gamma(row, col) / (1.0 + anchor(col) * cs.F(row, col)));
        } else if (!best || cs.F(row, col) > w) {
          best = j;
          w = cs.F(row, col);
        }
      }
      rep.V(static_cast<Eigen::Index>(m), col) = v;
      rep.W(static_cast<Eigen::Index>(m), col) = w;
      if (heads) {
        heads->best_cell[m][n] = best;
        heads->ground_rate(static_cast<Eigen::Index>(m)) += rate;
      }
    }
  }
  return rep;
}

struct UavDecision {
  std::vector<std::optional<std::size_t>> cluster_of_rb;  // m_n*, set on RBs with power
  Eigen::VectorXd gain;                                   // max_m W
  Eigen::VectorXd price;                                  // sum_m V
  Eigen::VectorXd p;
  std::vector<std::size_t> active_rbs;                    // N_d
};

/// UAV side: best cluster per RB, then the priced water-filling on aggregates.
inline UavDecision uav_select_and_allocate(const ClusterReport& rep, const Weights& w, double p_max,
                                           double gain_floor = 0.0) {
  const Eigen::Index m_count = rep.W.rows(), n_count = rep.W.cols();
  UavDecision d;
  d.cluster_of_rb.assign(static_cast<std::size_t>(n_count), std::nullopt);
  d.gain = Eigen::VectorXd::Zero(n_count);
  d.price = Eigen::VectorXd::Zero(n_count);
  std::vector<std::size_t> winner(static_cast<std::size_t>(n_count), 0);
  for (Eigen::Index n = 0; n < n_count; ++n) {
    for (Eigen::Index m = 0; m < m_count; ++m) {
      d.price(n) += rep.V(m, n);
      if (rep.W(m, n) > d.gain(n)) {
        d.gain(n) = rep.W(m, n);
        winner[static_cast<std::size_t>(n)] = static_cast<std::size_t>(m);
      }
    }
  }
  d.p = surrogate_solve(d.gain, d.price, w, p_max, gain_floor);
  for (Eigen::Index n = 0; n < n_count; ++n) {
    if (d.p(n) > 0.0) {
      d.cluster_of_rb[static_cast<std::size_t>(n)] = winner[static_cast<std::size_t>(n)];
      d.active_rbs.push_back(static_cast<std::size_t>(n));
    }
  }
  return d;
}

/// Parameters exchanged between the UAV and the cluster heads.
struct MessageLedger {
  std::size_t uplink_params = 0;    // heads -> UAV
  std::size_t downlink_params = 0;  // UAV -> heads
  std::size_t beacons = 0;
  std::vector<std::size_t> uplink_per_round;
  std::vector<std::size_t> downlink_per_round;

  std::size_t total() const { return uplink_params + downlink_params; }
  void add_round(std::size_t up, std::size_t down) {
    uplink_params += up;
    downlink_params += down;
    ++beacons;
    uplink_per_round.push_back(up);
    downlink_per_round.push_back(down);
  }
};

/// Bound on the one-round exchange: 2MN up plus 2N down.
inline std::size_t one_round_message_bound(std::size_t m, std::size_t n) { return 2 * m * n + 2 * n; }

enum class DecentralMode { one_round, iterative };

struct DecentralOptions {
  DecentralMode mode = DecentralMode::one_round;
  double epsilon = 1e-6;
  std::size_t max_rounds = 200;
  double gain_floor = 0.0;
};

struct DecentralResult {
  IcicSolution solution;
  MessageLedger ledger;
};

namespace detail {

inline Association resolve_cells(const UavDecision& d, const HeadState& heads) {
  Association a;
  a.j_star.assign(d.cluster_of_rb.size(), std::nullopt);
  a.F_u = d.gain;
  for (std::size_t n = 0; n < d.cluster_of_rb.size(); ++n) {
    if (d.cluster_of_rb[n]) a.j_star[n] = heads.best_cell[*d.cluster_of_rb[n]][n];
  }
  return a;
}

}  // namespace detail

/// One round: anchor 0, one allocation. Up: V and W per (cluster, RB). Down:
/// (RB, cluster) per RB with power.
///
/// Iterative: repeats from the previous allocation until the objective gains at
/// most epsilon. Later rounds carry only V, plus one ground-rate figure per
/// cluster so the UAV can evaluate the stopping rule; the downlink then also
/// carries the power of each active RB, which the heads need as the new anchor.
inline DecentralResult run_decentralized(const ChannelState& cs, const RbOccupancy& occ, const ClusterPartition& part,
                                         const Weights& w, double p_max, const DecentralOptions& opt = {}) {
  w.validate();
  if (part.size() == 0) throw ConfigError("decentral: partition has no clusters");
  const std::size_t m_count = part.size();
  const std::size_t n_count = occ.num_rbs;
  DecentralResult res;
  Eigen::VectorXd anchor = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_count));

  if (opt.mode == DecentralMode::one_round) {
    HeadState heads;
    const ClusterReport rep = cluster_report(part, cs, occ, anchor, &heads);
    const UavDecision d = uav_select_and_allocate(rep, w, p_max, opt.gain_floor);
    res.ledger.add_round(2 * m_count * n_count, 2 * d.active_rbs.size());
    res.solution = detail::finish("decentralized", cs, occ, detail::resolve_cells(d, heads), d.p, w);
    res.solution.diagnostics.iterations = 1;
    res.solution.diagnostics.objective_trace = {res.solution.rates.weighted};
    return res;
  }

  SolveDiagnostics diag;
  diag.epsilon = opt.epsilon;
  diag.converged = false;
  HeadState heads;
  ClusterReport rep = cluster_report(part, cs, occ, anchor, &heads);
  // Objective at the anchor, as the UAV sees it: its own rate is 0 at p = 0.
  double q_prev = w.mu_g * heads.ground_rate.sum();
  diag.objective_trace.push_back(q_prev);
  std::size_t up = 2 * m_count * n_count + m_count;

  UavDecision best_d;
  HeadState best_heads;
  double q_best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < opt.max_rounds; ++r) {
    UavDecision d = uav_select_and_allocate(rep, w, p_max, opt.gain_floor);
    res.ledger.add_round(up, 3 * d.active_rbs.size());
    ++diag.iterations;

    // Next round's reports are taken at the new allocation.
    HeadState next_heads;
    const ClusterReport next = cluster_report(part, cs, occ, d.p, &next_heads);
    double uav = 0.0;
    for (Eigen::Index n = 0; n < d.p.size(); ++n) uav += log2_1p(d.p(n) * d.gain(n));
    const double q = w.mu_u * uav + w.mu_g * next_heads.ground_rate.sum();
    diag.objective_trace.push_back(q);
    if (q > q_best) {
      q_best = q;
      best_d = d;
      best_heads = heads;
    }
    const bool stop = q - q_prev <= opt.epsilon;
    q_prev = q;
    rep = next;
    heads = std::move(next_heads);
    up = m_count * n_count + m_count;
    if (stop) {
      diag.converged = true;
      break;
    }
  }
  // The last reports were sent only for the stopping rule.
  res.ledger.uplink_params += m_count;
  res.ledger.uplink_per_round.back() += m_count;
  res.solution = detail::finish("decentralized_iterative", cs, occ, detail::resolve_cells(best_d, best_heads), best_d.p, w);
  res.solution.diagnostics = std::move(diag);
  return res;
}

}  // namespace uavicic
