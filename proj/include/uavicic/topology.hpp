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

// Hexagonal cell layout.
//
// Flat-top hexagons of circumradius R in axial coordinates (q, r):
//   x = 1.5 R q,   y = sqrt(3)/2 R (2r + q)
// Cell index 0 (reported as id 1) sits at the origin. Rings are enumerated
// outward; inside a ring cells are ordered counterclockwise by polar angle
// starting from the +x axis.

#pragma once

#include "uavicic/antenna.hpp"
#include "uavicic/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace uavicic {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Axial {
  int q = 0;
  int r = 0;
  friend bool operator==(Axial, Axial) = default;
  friend auto operator<=>(Axial, Axial) = default;
};

inline int hex_distance(Axial a, Axial b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

struct Cell {
  std::size_t index = 0;  // 0-based; external id is index + 1
  Axial axial;
  int ring = 0;
  Point2 center;
  double bs_height = 0.0;

  std::size_t id() const { return index + 1; }
};

inline constexpr std::size_t hex_cell_count(int tiers) {
  return 1 + 3 * static_cast<std::size_t>(tiers) * static_cast<std::size_t>(tiers + 1);
}

class HexGrid {
 public:
  HexGrid() = default;
  HexGrid(double cell_radius, int tiers, std::vector<Cell> cells)
      : cell_radius_(cell_radius), tiers_(tiers), cells_(std::move(cells)) {
    for (const Cell& c : cells_) by_axial_.emplace(c.axial, c.index);
  }

  double cell_radius() const { return cell_radius_; }
  int tiers() const { return tiers_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t index) const { return cells_.at(index); }

  Point2 axial_to_point(Axial a) const {
    return {1.5 * cell_radius_ * a.q, 0.5 * std::sqrt(3.0) * cell_radius_ * (2.0 * a.r + a.q)};
  }

  /// Axial coordinates of the hexagon containing p (cube rounding).
  Axial point_to_axial(Point2 p) const {
    const double fq = (2.0 / 3.0) * p.x / cell_radius_;
    const double fr = (-p.x / 3.0 + std::sqrt(3.0) / 3.0 * p.y) / cell_radius_;
    const double fs = -fq - fr;
    double rq = std::round(fq), rr = std::round(fr), rs = std::round(fs);
    const double dq = std::abs(rq - fq), dr = std::abs(rr - fr), ds = std::abs(rs - fs);
    if (dq > dr && dq > ds) {
      rq = -rr - rs;
    } else if (dr > ds) {
      rr = -rq - rs;
    }
    return {static_cast<int>(rq), static_cast<int>(rr)};
  }

  std::optional<std::size_t> find(Axial a) const {
    auto it = by_axial_.find(a);
    if (it == by_axial_.end()) return std::nullopt;
    return it->second;
  }

  /// Index of the cell containing p, if p lies inside the grid.
  std::optional<std::size_t> locate(Point2 p) const { return find(point_to_axial(p)); }

  /// Whether p lies inside the hexagon of the given cell (closed set).
  bool contains(std::size_t index, Point2 p) const {
    const Point2 c = cell(index).center;
    const double dx = std::abs(p.x - c.x), dy = std::abs(p.y - c.y);
    const double half_h = 0.5 * std::sqrt(3.0) * cell_radius_;
    const double slack = 1e-9 * cell_radius_;
    return dy <= half_h + slack && std::sqrt(3.0) * dx + dy <= std::sqrt(3.0) * cell_radius_ + slack;
  }

  int hex_distance(std::size_t a, std::size_t b) const { return uavicic::hex_distance(cell(a).axial, cell(b).axial); }

 private:
  double cell_radius_ = 0.0;
  int tiers_ = 0;
  std::vector<Cell> cells_;
  std::map<Axial, std::size_t> by_axial_;
};

inline HexGrid build_grid(double cell_radius, int tiers, double bs_height) {
  if (!(cell_radius > 0.0)) throw ConfigError("grid: cell_radius must be > 0");
  if (tiers < 0) throw ConfigError("grid: tiers must be >= 0");
  if (!(bs_height > 0.0)) throw ConfigError("grid: bs_height must be > 0");

  const double sqrt3 = std::sqrt(3.0);
  std::vector<Cell> cells;
  cells.reserve(hex_cell_count(tiers));
  cells.push_back(Cell{0, {0, 0}, 0, {0.0, 0.0}, bs_height});

  for (int ring = 1; ring <= tiers; ++ring) {
    std::vector<std::pair<double, Axial>> members;
    for (int q = -ring; q <= ring; ++q) {
      for (int r = std::max(-ring, -q - ring); r <= std::min(ring, -q + ring); ++r) {
        const Axial a{q, r};
        if (uavicic::hex_distance(a, {0, 0}) != ring) continue;
        // 2r + q is an exact integer, so cells on the +x axis get angle exactly 0.
        double angle = std::atan2(0.5 * sqrt3 * (2 * r + q), 1.5 * q);
        if (angle < 0.0) angle += 2.0 * kPi;
        members.emplace_back(angle, a);
      }
    }
    std::sort(members.begin(), members.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (const auto& [angle, a] : members) {
      const Point2 center{1.5 * cell_radius * a.q, 0.5 * sqrt3 * cell_radius * (2.0 * a.r + a.q)};
      cells.push_back(Cell{cells.size(), a, ring, center, bs_height});
    }
  }
  return HexGrid(cell_radius, tiers, std::move(cells));
}

/// N_j(q): cells within the first q rings around cell j (j itself excluded),
/// clipped to the grid.
class NeighborSets {
 public:
  NeighborSets() = default;
  NeighborSets(int q_max, std::vector<std::vector<std::vector<std::size_t>>> sets)
      : q_max_(q_max), sets_(std::move(sets)) {}

  int q_max() const { return q_max_; }
  std::size_t num_cells() const { return sets_.size(); }

  /// Sorted cell indices of N_j(q); q = 0 gives the empty set.
  const std::vector<std::size_t>& of(std::size_t cell, int q) const {
    static const std::vector<std::size_t> kEmpty;
    if (q <= 0) return kEmpty;
    if (q > q_max_) throw std::out_of_range("neighbor set requested beyond q_max");
    return sets_.at(cell).at(static_cast<std::size_t>(q - 1));
  }

  bool contains(std::size_t cell, int q, std::size_t other) const {
    const auto& s = of(cell, q);
    return std::binary_search(s.begin(), s.end(), other);
  }

  /// Re-index onto a subset of cells; neighbors outside the subset are dropped.
  /// `ids[i]` is the original index of new cell i.
  NeighborSets restrict_to(const std::vector<std::size_t>& ids) const {
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < ids.size(); ++i) local.emplace(ids[i], i);
    std::vector<std::vector<std::vector<std::size_t>>> out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (int q = 1; q <= q_max_; ++q) {
        std::vector<std::size_t> s;
        for (std::size_t k : of(ids[i], q)) {
          if (auto it = local.find(k); it != local.end()) s.push_back(it->second);
        }
        std::sort(s.begin(), s.end());
        out[i].push_back(std::move(s));
      }
    }
    return NeighborSets(q_max_, std::move(out));
  }

 private:
  int q_max_ = 0;
  std::vector<std::vector<std::vector<std::size_t>>> sets_;
};

inline NeighborSets neighbor_sets(const HexGrid& grid, int q_max) {
  if (q_max < 0) throw ConfigError("neighbor sets: q_max must be >= 0");
  std::vector<std::vector<std::vector<std::size_t>>> sets(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sets[j].resize(static_cast<std::size_t>(q_max));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k == j) continue;
      const int d = grid.hex_distance(j, k);
      for (int q = d; q <= q_max; ++q) {
        if (q >= 1) sets[j][static_cast<std::size_t>(q - 1)].push_back(k);
      }
    }
  }
  return NeighborSets(q_max, std::move(sets));
}

/// Cells whose BS receives the UAV through the main lobe: every cell for an
/// isotropic antenna, otherwise those within the cone footprint radius.
inline std::vector<std::size_t> icic_region(const HexGrid& grid, Point2 uav_xy, const UavAntenna& antenna,
                                            double uav_height) {
  std::vector<std::size_t> ids;
  for (const Cell& c : grid.cells()) {
    if (!antenna.is_cone() || antenna.side_gain > 0.0) {
      ids.push_back(c.index);
      continue;
    }
    if (distance(uav_xy, c.center) <= antenna.footprint_radius(uav_height, c.bs_height)) ids.push_back(c.index);
  }
  return ids;
}

}  // namespace uavicic
