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

// Ground UE placement and RB assignment under the q-tier reuse rule: a BS may
// give RB n to a new UE only if neither its own cell nor any cell in its first q
// rings already uses n.

#pragma once

#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/rng.hpp"
#include "uavicic/topology.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavicic {

struct GroundUe {
  std::size_t id = 0;
  std::size_t serving_cell = 0;
  Point2 position;
  double height = 1.5;
  double tx_power = 0.2;  // W
  std::optional<std::size_t> rb;
  std::optional<std::size_t> parent;  // set on virtual UEs split from a multi-RB UE
};

/// Which RB each cell uses and the SINRs of the ground UEs on them.
struct RbOccupancy {
  std::size_t num_cells = 0;
  std::size_t num_rbs = 0;
  std::vector<std::vector<std::size_t>> occupied;  // J(n), ascending
  std::vector<std::vector<std::size_t>> free;      // J^c(n), ascending
  std::vector<std::optional<std::size_t>> ue_of;   // (j, n) -> UE id, row-major j * N + n
  Matrix tx_power;                                 // p_j(n), W; 0 where free
  Matrix gamma;                                    // gamma_j(n); 0 where free
  std::vector<std::size_t> n_prime;                // RBs free in every cell
  std::vector<std::size_t> blocked;                // UE ids that found no feasible RB

  RbOccupancy() = default;
  RbOccupancy(std::size_t cells, std::size_t rbs)
      : num_cells(cells),
        num_rbs(rbs),
        ue_of(cells * rbs),
        tx_power(Matrix::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(rbs))),
        gamma(Matrix::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(rbs))) {}

  bool is_occupied(std::size_t j, std::size_t n) const { return ue_of[j * num_rbs + n].has_value(); }
  std::optional<std::size_t> ue_at(std::size_t j, std::size_t n) const { return ue_of[j * num_rbs + n]; }

  /// Recomputes J(n), J^c(n) and N' from `ue_of`.
  void rebuild_sets() {
    occupied.assign(num_rbs, {});
    free.assign(num_rbs, {});
    n_prime.clear();
    for (std::size_t n = 0; n < num_rbs; ++n) {
      for (std::size_t j = 0; j < num_cells; ++j) (is_occupied(j, n) ? occupied[n] : free[n]).push_back(j);
      if (occupied[n].empty()) n_prime.push_back(n);
    }
  }

  /// Synthetic occupancy: cell j uses RB n iff gamma(j, n) > 0.
  static RbOccupancy from_gamma(const Matrix& g) {
    RbOccupancy occ(static_cast<std::size_t>(g.rows()), static_cast<std::size_t>(g.cols()));
    std::size_t ue = 0;
    for (std::size_t j = 0; j < occ.num_cells; ++j) {
      for (std::size_t n = 0; n < occ.num_rbs; ++n) {
        const double v = g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n));
        if (v > 0.0) {
          occ.ue_of[j * occ.num_rbs + n] = ue++;
          occ.tx_power(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = 1.0;
        }
      }
    }
    occ.gamma = g.cwiseMax(0.0);
    occ.rebuild_sets();
    return occ;
  }

  /// Rows for the given cells (re-indexed 0..ids.size()-1). Blocked UEs are kept.
  RbOccupancy restrict_to(const std::vector<std::size_t>& ids) const {
    RbOccupancy out(ids.size(), num_rbs);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t n = 0; n < num_rbs; ++n) out.ue_of[i * num_rbs + n] = ue_of[ids[i] * num_rbs + n];
      out.tx_power.row(static_cast<Eigen::Index>(i)) = tx_power.row(static_cast<Eigen::Index>(ids[i]));
      out.gamma.row(static_cast<Eigen::Index>(i)) = gamma.row(static_cast<Eigen::Index>(ids[i]));
    }
    out.blocked = blocked;
    out.rebuild_sets();
    return out;
  }
};

struct PlacementSpec {
  std::size_t count = 60;
  std::vector<std::size_t> per_cell;  // optional K_j overrides; must sum to count
  double height = 1.5;
  double tx_power = 0.2;  // W
};

namespace detail {

inline Point2 uniform_point_in_hex(const HexGrid& grid, std::size_t cell, StreamRng& rng) {
  const double radius = grid.cell_radius();
  const double half_h = 0.5 * std::sqrt(3.0) * radius;
  const Point2 c = grid.cell(cell).center;
  for (;;) {
    const Point2 p{c.x + rng.uniform(-radius, radius), c.y + rng.uniform(-half_h, half_h)};
    if (grid.contains(cell, p)) return p;
  }
}

}  // namespace detail

/// Drops ground UEs: cells drawn uniformly (multinomial) unless per-cell counts
/// are given, positions uniform over the serving hexagon.
inline std::vector<GroundUe> place_ues(const HexGrid& grid, const PlacementSpec& spec, std::uint64_t seed) {
  if (!spec.per_cell.empty()) {
    if (spec.per_cell.size() != grid.size()) {
      throw ConfigError("ues.per_cell: expected " + std::to_string(grid.size()) + " entries, got " +
                        std::to_string(spec.per_cell.size()));
    }
    const std::size_t total = std::accumulate(spec.per_cell.begin(), spec.per_cell.end(), std::size_t{0});
    if (total != spec.count) {
      throw ConfigError("ues.per_cell: counts sum to " + std::to_string(total) + " but ues.count is " +
                        std::to_string(spec.count));
    }
  }
  if (!(spec.tx_power > 0.0)) throw ConfigError("ues.tx_power must be > 0");

  StreamRng rng(seed, Stream::placement);
  std::vector<std::size_t> cells;
  if (spec.per_cell.empty()) {
    for (std::size_t i = 0; i < spec.count; ++i) cells.push_back(rng.index(grid.size()));
  } else {
    for (std::size_t j = 0; j < spec.per_cell.size(); ++j) cells.insert(cells.end(), spec.per_cell[j], j);
  }

  std::vector<GroundUe> ues;
  ues.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    GroundUe ue;
    ue.id = i;
    ue.serving_cell = cells[i];
    ue.position = detail::uniform_point_in_hex(grid, cells[i], rng);
    ue.height = spec.height;
    ue.tx_power = spec.tx_power;
    ues.push_back(ue);
  }
  return ues;
}

/// Splits a UE holding L RBs into L single-RB virtual UEs in the same cell.
/// Virtual UEs get consecutive ids starting at `first_id`.
inline std::vector<GroundUe> virtualize_multi_rb_ue(const GroundUe& ue, std::size_t rbs_per_ue, std::size_t num_rbs,
                                                    std::size_t first_id) {
  if (rbs_per_ue == 0) throw ConfigError("multi-RB UE: L must be >= 1");
  if (rbs_per_ue > num_rbs) {
    throw ConfigError("multi-RB UE: L=" + std::to_string(rbs_per_ue) + " exceeds the " + std::to_string(num_rbs) +
                      " available RBs");
  }
  std::vector<GroundUe> out(rbs_per_ue, ue);
  for (std::size_t l = 0; l < rbs_per_ue; ++l) {
    out[l].id = first_id + l;
    out[l].rb.reset();
    out[l].parent = ue.id;
  }
  return out;
}

enum class AssignOrder { sequential, random };

/// Gives every UE one RB obeying the q-tier rule.
///
/// Sequential order walks cells by index and UEs by placement order, taking the
/// lowest feasible RB. Random order shuffles the UEs and draws uniformly among
/// feasible RBs. UEs without a feasible RB end up in `blocked`.
inline RbOccupancy assign_rbs(std::span<GroundUe> ues, const NeighborSets& neighbors, int q, std::size_t num_rbs,
                              AssignOrder order = AssignOrder::sequential, std::uint64_t seed = 0) {
  if (num_rbs == 0) throw ConfigError("num_rbs must be >= 1");
  if (q < 0) throw ConfigError("q must be >= 0");
  const std::size_t num_cells = neighbors.num_cells();
  RbOccupancy occ(num_cells, num_rbs);

  std::vector<std::size_t> sequence(ues.size());
  std::iota(sequence.begin(), sequence.end(), std::size_t{0});
  StreamRng rng(seed, Stream::scheduling);
  if (order == AssignOrder::sequential) {
    std::stable_sort(sequence.begin(), sequence.end(),
                     [&](std::size_t a, std::size_t b) { return ues[a].serving_cell < ues[b].serving_cell; });
  } else {
    std::shuffle(sequence.begin(), sequence.end(), rng.engine());
  }

  std::vector<std::size_t> feasible;
  for (std::size_t idx : sequence) {
    GroundUe& ue = ues[idx];
    ue.rb.reset();
    const std::size_t j = ue.serving_cell;
    if (j >= num_cells) throw ConfigError("UE " + std::to_string(ue.id) + " serves a cell outside the grid");
    const auto& ring = neighbors.of(j, q);
    feasible.clear();
    for (std::size_t n = 0; n < num_rbs; ++n) {
      if (occ.is_occupied(j, n)) continue;
      const bool clash = std::any_of(ring.begin(), ring.end(), [&](std::size_t k) { return occ.is_occupied(k, n); });
      if (!clash) feasible.push_back(n);
    }
    if (feasible.empty()) {
      occ.blocked.push_back(ue.id);
      continue;
    }
    const std::size_t n = order == AssignOrder::sequential ? feasible.front() : feasible[rng.index(feasible.size())];
    ue.rb = n;
    occ.ue_of[j * num_rbs + n] = ue.id;
    occ.tx_power(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = ue.tx_power;
  }
  std::sort(occ.blocked.begin(), occ.blocked.end());
  occ.rebuild_sets();
  return occ;
}

/// gamma_j(n) = p_j(n) H_j(n) / sigma_j^2(n) on every occupied (j, n).
inline Matrix compute_ground_sinrs(const RbOccupancy& occ, const ChannelState& cs) {
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(occ.num_cells), static_cast<Eigen::Index>(occ.num_rbs));
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    for (std::size_t j : occ.occupied[n]) {
      const auto r = static_cast<Eigen::Index>(j);
      const auto c = static_cast<Eigen::Index>(n);
      g(r, c) = occ.tx_power(r, c) * cs.H(r, c) / cs.sigma2(r, c);
    }
  }
  return g;
}

}  // namespace uavicic
