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


#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

namespace uavicic {
namespace {

ClusterPartition random_partition(testing::Gen& g, std::size_t cells) {
  ClusterPartition part;
  const std::size_t m = 1 + g.index(cells);
  part.clusters.resize(m);
  for (std::size_t j = 0; j < cells; ++j) part.clusters[j < m ? j : g.index(m)].push_back(j);
  for (auto& c : part.clusters) std::sort(c.begin(), c.end());
  part.head.resize(m);
  for (std::size_t i = 0; i < m; ++i) part.head[i] = part.clusters[i].front();
  return part;
}

TEST(Clusters, CountsOnFiveTierGrid) {
  const HexGrid grid = build_grid(500.0, 5, 25.0);
  EXPECT_EQ(make_clusters(grid, 4).size(), 23u);
  EXPECT_EQ(make_clusters(grid, 91).size(), 1u);
  EXPECT_EQ(make_clusters(grid, 1).size(), 91u);
  EXPECT_THROW(make_clusters(grid, 0), ConfigError);
}

TEST(Clusters, PartitionTheGrid) {
  for (int tiers = 0; tiers <= 4; ++tiers) {
    const HexGrid grid = build_grid(100.0, tiers, 10.0);
    for (std::size_t size = 1; size <= 7; ++size) {
      const ClusterPartition part = make_clusters(grid, size);
      std::multiset<std::size_t> seen;
      for (const auto& c : part.clusters) {
        EXPECT_LE(c.size(), size);
        EXPECT_FALSE(c.empty());
        seen.insert(c.begin(), c.end());
      }
      EXPECT_EQ(seen.size(), grid.size());
      EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), grid.size());
    }
  }
}

TEST(Clusters, HeadHasStrongestLink) {
  testing::Gen gen(81);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t cells = 2 + gen.index(10);
    ClusterPartition part = random_partition(gen, cells);
    Eigen::VectorXd f(static_cast<Eigen::Index>(cells));
    for (Eigen::Index j = 0; j < f.size(); ++j) f(j) = gen.uniform(0, 1);
    select_heads(part, f);
    for (std::size_t m = 0; m < part.size(); ++m) {
      for (std::size_t j : part.clusters[m]) {
        EXPECT_LE(f(static_cast<Eigen::Index>(j)), f(static_cast<Eigen::Index>(part.head[m])));
      }
    }
  }
}

TEST(Clusters, RestrictDropsEmptyClusters) {
  ClusterPartition part;
  part.clusters = {{0, 1}, {2, 3}, {4}};
  part.head = {0, 2, 4};
  const ClusterPartition r = part.restrict_to({1, 4});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.clusters[0], std::vector<std::size_t>{0});
  EXPECT_EQ(r.clusters[1], std::vector<std::size_t>{1});
}

TEST(HeadReport, AggregatesMatchCentralQuantities) {
  testing::Gen gen(82);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t cells = 2 + gen.index(8);
    const testing::Instance in = testing::random_instance(gen, cells, 1 + gen.index(6), cells - 1);
    const ClusterPartition part = random_partition(gen, cells);
    Eigen::VectorXd anchor(static_cast<Eigen::Index>(in.occ.num_rbs));
    for (Eigen::Index n = 0; n < anchor.size(); ++n) anchor(n) = gen.coin() ? 0.0 : gen.uniform(0, 1);
    const ClusterReport r = cluster_report(part, in.cs, in.occ, anchor);
    const Association a = optimal_association(in.cs, in.occ);
    const SurrogateCoeffs c = surrogate_coeffs(in.cs, in.occ, anchor);
    for (Eigen::Index n = 0; n < anchor.size(); ++n) {
      EXPECT_EQ(r.W.col(n).maxCoeff(), a.F_u(n));
      EXPECT_NEAR(r.V.col(n).sum(), c.B(n), 1e-12 * (1.0 + c.B(n)));
    }
  }
}

TEST(HeadReport, PriceFormula) {
  // gamma = 3, F = 1, anchor 0: 3 / (ln2 * 4).
  EXPECT_DOUBLE_EQ(cell_price(3.0, 1.0, 0.0), 3.0 / (kLn2 * 4.0));
  EXPECT_EQ(cell_price(3.0, 0.0, 1.0), 0.0);
}

TEST(Ledger, OneRoundCountsWithinBound) {
  testing::Gen gen(83);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t cells = 2 + gen.index(8);
    const testing::Instance in = testing::random_instance(gen, cells, 1 + gen.index(10), cells - 1);
    const ClusterPartition part = random_partition(gen, cells);
    const DecentralResult d = run_decentralized(in.cs, in.occ, part, {}, in.p_max);
    std::size_t active = 0;
    for (Eigen::Index n = 0; n < d.solution.p.size(); ++n) active += d.solution.p(n) > 0.0 ? 1 : 0;
    EXPECT_EQ(d.ledger.uplink_params, 2 * part.size() * in.occ.num_rbs);
    EXPECT_EQ(d.ledger.downlink_params, 2 * active);
    EXPECT_EQ(d.ledger.beacons, 1u);
    EXPECT_LE(d.ledger.total(), one_round_message_bound(part.size(), in.occ.num_rbs));
  }
}

TEST(Ledger, IterativeRoundCounts) {
  testing::Gen gen(84);
  const testing::Instance in = testing::random_instance(gen, 6, 8, 4);
  const ClusterPartition part = random_partition(gen, 6);
  DecentralOptions opt;
  opt.mode = DecentralMode::iterative;
  const DecentralResult d = run_decentralized(in.cs, in.occ, part, {1.0, 2.0}, in.p_max, opt);
  const std::size_t m = part.size(), n = in.occ.num_rbs;
  ASSERT_GE(d.ledger.beacons, 1u);
  std::size_t expect_up = 2 * m * n + m + m;
  for (std::size_t r = 1; r < d.ledger.beacons; ++r) expect_up += m * n + m;
  EXPECT_EQ(d.ledger.uplink_params, expect_up);
  EXPECT_EQ(d.ledger.downlink_params % 3, 0u);
}

TEST(Decentral, IterativeMatchesCentralFromZeroAnchor) {
  testing::Gen gen(85);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t cells = 2 + gen.index(8);
    const testing::Instance in = testing::random_instance(gen, cells, 1 + gen.index(8), cells - 1);
    const ClusterPartition part = random_partition(gen, cells);
    const Weights w{1.0, gen.log_uniform(0.25, 4.0)};
    DecentralOptions dopt;
    dopt.mode = DecentralMode::iterative;
    ScaOptions sopt;
    sopt.init = ScaInit::zero;
    const IcicSolution dec = run_decentralized(in.cs, in.occ, part, w, in.p_max, dopt).solution;
    const IcicSolution sca = sca_solve(in.cs, in.occ, w, in.p_max, sopt);
    EXPECT_NEAR(dec.rates.weighted, sca.rates.weighted, 1e-9 * (1.0 + sca.rates.weighted));
    EXPECT_EQ(dec.diagnostics.iterations, sca.diagnostics.iterations);
  }
}

TEST(Decentral, OneRoundFeasibleAndBelowCentral) {
  testing::Gen gen(86);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t cells = 2 + gen.index(8);
    const testing::Instance in = testing::random_instance(gen, cells, 1 + gen.index(8), cells - 1, gen.log_uniform(0.1, 10));
    const ClusterPartition part = random_partition(gen, cells);
    const Weights w{1.0, gen.log_uniform(0.25, 4.0)};
    const IcicSolution one = run_decentralized(in.cs, in.occ, part, w, in.p_max).solution;
    EXPECT_LE(one.p.sum(), in.p_max * (1.0 + 1e-12));
    EXPECT_GE(one.p.minCoeff(), 0.0);
    for (std::size_t n = 0; n < in.occ.num_rbs; ++n) {
      if (one.p(static_cast<Eigen::Index>(n)) == 0.0) continue;
      ASSERT_TRUE(one.association.j_star[n].has_value());
      EXPECT_FALSE(in.occ.is_occupied(*one.association.j_star[n], n));
    }
    ScaOptions sopt;
    sopt.init = ScaInit::zero;
    EXPECT_LE(one.rates.weighted, sca_solve(in.cs, in.occ, w, in.p_max, sopt).rates.weighted + 1e-9);
  }
}

}  // namespace
}  // namespace uavicic
