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

// Random instance generators and brute-force oracles shared by the tests and
// the acceptance binary. Oracles here are written from the formulas directly
// and share no code with the solvers beyond the data types.

#pragma once

#include "uavicic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace uavicic::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// A synthetic problem: normalized UAV gains and ground SINRs, no geometry.
struct Instance {
  ChannelState cs;
  RbOccupancy occ;
  double p_max = 1.0;
};

/// Cells x RBs instance. Each RB is used by at most `max_users` cells and
/// always leaves at least one cell free.
inline Instance random_instance(Gen& g, std::size_t cells, std::size_t rbs, std::size_t max_users,
                                double p_max = 1.0) {
  Matrix f(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(rbs));
  Matrix gamma = Matrix::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(rbs));
  for (Eigen::Index j = 0; j < f.rows(); ++j) {
    for (Eigen::Index n = 0; n < f.cols(); ++n) f(j, n) = g.log_uniform(0.05, 20.0);
  }
  for (Eigen::Index n = 0; n < f.cols(); ++n) {
    const std::size_t users = g.index(std::min(max_users, cells - 1) + 1);
    std::vector<std::size_t> order(cells);
    for (std::size_t j = 0; j < cells; ++j) order[j] = j;
    std::shuffle(order.begin(), order.end(), g.engine());
    for (std::size_t u = 0; u < users; ++u) gamma(static_cast<Eigen::Index>(order[u]), n) = g.log_uniform(0.5, 500.0);
  }
  return {ChannelState::from_normalized(f), RbOccupancy::from_gamma(gamma), p_max};
}

inline DualSubproblem random_subproblem(Gen& g, std::size_t interferers) {
  DualSubproblem sub;
  sub.F_u = g.log_uniform(0.1, 100.0);
  sub.weights = {g.uniform(0.2, 2.0), g.uniform(0.2, 2.0)};
  for (std::size_t i = 0; i < interferers; ++i) sub.interferers.push_back({g.log_uniform(0.1, 1000.0), g.log_uniform(0.01, 100.0)});
  // Price low enough that the UAV may transmit.
  sub.nu = sub.weights.mu_u * sub.F_u / kLn2 * g.log_uniform(0.01, 0.9);
  return sub;
}

/// Weighted objective computed term by term from its definition.
inline double objective_oracle(const Instance& in, const Weights& w, const std::vector<double>& p) {
  double uav = 0.0, ground = 0.0;
  for (std::size_t n = 0; n < in.occ.num_rbs; ++n) {
    double best = 0.0;
    for (std::size_t j = 0; j < in.occ.num_cells; ++j) {
      if (!in.occ.is_occupied(j, n)) best = std::max(best, in.cs.F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)));
    }
    uav += std::log2(1.0 + p[n] * best);
    for (std::size_t j = 0; j < in.occ.num_cells; ++j) {
      if (!in.occ.is_occupied(j, n)) continue;
      const double gm = in.occ.gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n));
      const double f = in.cs.F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n));
      ground += std::log2(1.0 + gm / (1.0 + p[n] * f));
    }
  }
  return w.mu_u * uav + w.mu_g * ground;
}

/// Max of the objective over an (steps x steps) grid of the simplex {p >= 0, p1 + p2 <= P_max}.
inline double grid_search_two_rbs(const Instance& in, const Weights& w, int steps) {
  const double h = in.p_max / (steps - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < steps; ++a) {
    for (int b = 0; a + b < steps; ++b) best = std::max(best, objective_oracle(in, w, {a * h, b * h}));
  }
  return best;
}

/// Max of phi on `points` evenly spaced powers over [0, p_hi].
inline double grid_search_subproblem(const DualSubproblem& sub, double p_hi, int points) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double p = points == 1 ? 0.0 : p_hi * i / (points - 1);
    double v = sub.weights.mu_u * std::log2(1.0 + p * sub.F_u) - sub.nu * p;
    for (const Interferer& it : sub.interferers) v += sub.weights.mu_g * std::log2(1.0 + it.gamma / (1.0 + p * it.F));
    best = std::max(best, v);
  }
  return best;
}

/// Every pair of cells sharing an RB lies more than q rings apart.
inline bool reuse_rule_holds(const RbOccupancy& occ, const HexGrid& grid, int q) {
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    for (std::size_t a = 0; a < occ.num_cells; ++a) {
      for (std::size_t b = a + 1; b < occ.num_cells; ++b) {
        if (occ.is_occupied(a, n) && occ.is_occupied(b, n) && grid.hex_distance(a, b) <= q) return false;
      }
    }
  }
  return true;
}

/// Small scenario config for property and acceptance runs: tiers <= 3, N <= 10, K <= 20.
inline ScenarioConfig small_scenario(Gen& g, std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.snapshots = 1;
  c.tiers = g.integer(1, 3);
  c.num_rbs = static_cast<std::size_t>(g.integer(2, 10));
  c.num_ues = static_cast<std::size_t>(g.integer(1, 20));
  c.q = g.integer(1, 2);
  c.weights = {1.0, g.log_uniform(0.25, 4.0)};
  return c;
}

}  // namespace uavicic::testing
