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

#include <functional>

namespace uavicic {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(Association, ArgmaxOverFreeCells) {
  Matrix f(3, 1);
  f << 1.0, 2.0, 3.0;
  const Association a = optimal_association(ChannelState::from_normalized(f), RbOccupancy::from_gamma(Matrix::Zero(3, 1)));
  EXPECT_EQ(*a.j_star[0], 2u);
  EXPECT_EQ(a.F_u(0), 3.0);
}

TEST(Association, SingleFreeCell) {
  Matrix f(3, 1);
  f << 5.0, 2.0, 9.0;
  Matrix g(3, 1);
  g << 1.0, 0.0, 1.0;
  const Association a = optimal_association(ChannelState::from_normalized(f), RbOccupancy::from_gamma(g));
  EXPECT_EQ(*a.j_star[0], 1u);
}

TEST(Association, TiesGoToLowestIndex) {
  const Association a =
      optimal_association(ChannelState::from_normalized(Matrix::Ones(4, 2)), RbOccupancy::from_gamma(Matrix::Zero(4, 2)));
  EXPECT_EQ(*a.j_star[0], 0u);
  EXPECT_EQ(*a.j_star[1], 0u);
}

TEST(Association, NoFreeCellIsConstraintViolation) {
  const RbOccupancy occ = RbOccupancy::from_gamma(Matrix::Ones(2, 1));
  const ChannelState cs = ChannelState::from_normalized(Matrix::Ones(2, 1));
  EXPECT_THROW(optimal_association(cs, occ), ConstraintViolation);
  EXPECT_FALSE(optimal_association(cs, occ, true).j_star[0].has_value());
}

TEST(Association, MatchesBruteForceEnumeration) {
  testing::Gen gen(41);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t cells = 2 + gen.index(4), rbs = 1 + gen.index(4);
    const testing::Instance in = testing::random_instance(gen, cells, rbs, cells - 1);
    Eigen::VectorXd p(static_cast<Eigen::Index>(rbs));
    for (Eigen::Index n = 0; n < p.size(); ++n) p(n) = gen.uniform(0.0, 1.0);
    const Weights w{1.0, 1.0};
    const double lemma = evaluate(in.cs, in.occ, optimal_association(in.cs, in.occ), p, w).weighted;
    double best = -1e300;
    Association a;
    a.j_star.assign(rbs, std::nullopt);
    a.F_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rbs));
    std::function<void(std::size_t)> rec = [&](std::size_t n) {
      if (n == rbs) {
        best = std::max(best, evaluate(in.cs, in.occ, a, p, w).weighted);
        return;
      }
      for (std::size_t j : in.occ.free[n]) {
        a.j_star[n] = j;
        rec(n + 1);
      }
    };
    rec(0);
    EXPECT_NEAR(lemma, best, 1e-12 * std::abs(best));
  }
}

TEST(Waterfill, Examples) {
  EXPECT_DOUBLE_EQ(waterfill(vec({3.0}), 2.5)(0), 2.5);
  const Eigen::VectorXd p = waterfill(vec({1.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_DOUBLE_EQ(p(1), 1.0);
  const Eigen::VectorXd q = waterfill(vec({4.0, 1.0}), 1.0);
  EXPECT_NEAR(q(0), 0.875, 1e-15);
  EXPECT_NEAR(q(1), 0.125, 1e-15);
  EXPECT_TRUE(waterfill(vec({4.0, 1.0}), 0.0).isZero());
  EXPECT_TRUE(waterfill(vec({4.0, 1.0}), -1.0).isZero());
}

TEST(Waterfill, TwoRbExampleMatchesGridSearch) {
  double best = -1, arg = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    const double v = std::log2(1 + 4 * x) + std::log2(1 + (1 - x));
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  EXPECT_NEAR(arg, 0.875, 1e-4);
}

TEST(Waterfill, OptimalAgainstRandomFeasiblePoints) {
  testing::Gen gen(42);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(gen.index(8));
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = gen.log_uniform(0.01, 100.0);
    const double pmax = gen.log_uniform(0.01, 10.0);
    const Eigen::VectorXd p = waterfill(f, pmax);
    EXPECT_NEAR(p.sum(), pmax, 1e-12 * pmax);
    auto rate = [&](const Eigen::VectorXd& x) {
      double s = 0;
      for (Eigen::Index i = 0; i < n; ++i) s += std::log2(1 + x(i) * f(i));
      return s;
    };
    const double r = rate(p);
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = gen.uniform(0, 1);
      x *= pmax / x.sum();
      EXPECT_LE(rate(x), r + 1e-12);
    }
  }
}

TEST(Baselines, SingleRbGetsAllPower) {
  const testing::Instance in{ChannelState::from_normalized(Matrix::Constant(3, 1, 2.0)),
                             RbOccupancy::from_gamma(Matrix::Zero(3, 1)), 0.7};
  EXPECT_DOUBLE_EQ(egoistic(in.cs, in.occ, in.p_max).p(0), 0.7);
}

TEST(Baselines, EmptyNetworkEgoisticEqualsAltruistic) {
  testing::Gen gen(43);
  Matrix f(4, 5);
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index n = 0; n < 5; ++n) f(j, n) = gen.log_uniform(0.1, 10);
  const ChannelState cs = ChannelState::from_normalized(f);
  const RbOccupancy occ = RbOccupancy::from_gamma(Matrix::Zero(4, 5));
  EXPECT_TRUE(egoistic(cs, occ, 1.0).p == altruistic(cs, occ, 1.0).p);
}

TEST(Baselines, AltruisticDeniedWithoutFreeRbs) {
  Matrix g(2, 2);
  g << 1.0, 0.0, 0.0, 2.0;
  const RbOccupancy occ = RbOccupancy::from_gamma(g);
  const ChannelState cs = ChannelState::from_normalized(Matrix::Ones(2, 2));
  const IcicSolution s = altruistic(cs, occ, 1.0);
  EXPECT_TRUE(s.denied);
  EXPECT_EQ(s.rates.uav_rate, 0.0);
  EXPECT_EQ(s.rates.ground_rate, s.rates.ground_rate_no_uav);
}

TEST(Baselines, AltruisticSingleFreeRb) {
  Matrix g(2, 3);
  g << 1.0, 0.0, 0.0, 0.0, 0.0, 2.0;
  const IcicSolution s = altruistic(ChannelState::from_normalized(Matrix::Ones(2, 3)), RbOccupancy::from_gamma(g), 0.4);
  EXPECT_DOUBLE_EQ(s.p(1), 0.4);
  EXPECT_EQ(s.p(0), 0.0);
  EXPECT_EQ(s.p(2), 0.0);
}

TEST(Baselines, AltruisticNeverHurtsGround) {
  testing::Gen gen(44);
  for (int rep = 0; rep < 50; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 5, 8, 2);
    const IcicSolution s = altruistic(in.cs, in.occ, in.p_max);
    EXPECT_EQ(s.rates.ground_rate, s.rates.ground_rate_no_uav);
  }
}

struct Ring {
  HexGrid grid = build_grid(500.0, 2, 25.0);
  NeighborSets ns = neighbor_sets(grid, 2);
};

TEST(TerrestrialIcic, EmptyNetworkUsesEveryRbOfStrongestBs) {
  Ring r;
  testing::Gen gen(45);
  Matrix f(19, 6);
  for (Eigen::Index j = 0; j < 19; ++j)
    for (Eigen::Index n = 0; n < 6; ++n) f(j, n) = gen.log_uniform(0.1, 10);
  ChannelState cs = ChannelState::from_normalized(f);
  cs.F_tilde(5) = 2.0;  // strongest BS; F(5, n) stays as drawn
  const RbOccupancy occ = RbOccupancy::from_gamma(Matrix::Zero(19, 6));
  const IcicSolution s = terrestrial_icic(cs, occ, r.ns, 2, 1.0);
  EXPECT_EQ(terrestrial_available_rbs(occ, r.ns, 2, 5).size(), 6u);
  const Eigen::VectorXd expect = waterfill(f.row(5).transpose(), 1.0);
  EXPECT_LT((s.p - expect).cwiseAbs().maxCoeff(), 1e-15);
  for (const auto& j : s.association.j_star) EXPECT_EQ(*j, 5u);
}

TEST(TerrestrialIcic, NeighborUseRemovesRb) {
  Ring r;
  Matrix g = Matrix::Zero(19, 3);
  g(r.ns.of(0, 2).back(), 1) = 5.0;
  const RbOccupancy occ = RbOccupancy::from_gamma(g);
  const auto rbs = terrestrial_available_rbs(occ, r.ns, 2, 0);
  EXPECT_EQ(rbs, (std::vector<std::size_t>{0, 2}));
}

TEST(TerrestrialIcic, AvailableSetMatchesSetInclusionOracle) {
  Ring r;
  testing::Gen gen(46);
  for (int rep = 0; rep < 100; ++rep) {
    Matrix g = Matrix::Zero(19, 8);
    for (int k = 0; k < 12; ++k) g(static_cast<Eigen::Index>(gen.index(19)), static_cast<Eigen::Index>(gen.index(8))) = 1.0;
    const RbOccupancy occ = RbOccupancy::from_gamma(g);
    const std::size_t ju = gen.index(19);
    std::vector<std::size_t> expect;
    for (std::size_t n = 0; n < 8; ++n) {
      bool ok = g(static_cast<Eigen::Index>(ju), static_cast<Eigen::Index>(n)) == 0.0;
      for (std::size_t k = 0; k < 19; ++k) {
        if (r.grid.hex_distance(k, ju) <= 2 && g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) > 0) ok = false;
      }
      if (ok) expect.push_back(n);
    }
    EXPECT_EQ(terrestrial_available_rbs(occ, r.ns, 2, ju), expect);
  }
}

TEST(TerrestrialIcic, DeniedWhenNothingAvailable) {
  Ring r;
  Matrix g = Matrix::Zero(19, 2);
  g(0, 0) = 1.0;
  g(1, 1) = 1.0;
  ChannelState cs = ChannelState::from_normalized(Matrix::Ones(19, 2));
  cs.F_tilde(0) = 3.0;
  const IcicSolution s = terrestrial_icic(cs, RbOccupancy::from_gamma(g), r.ns, 2, 1.0);
  EXPECT_TRUE(s.denied);
}

TEST(Surrogate, PriceAtZeroAnchor) {
  Matrix g(2, 2);
  g << 1.0, 0.0, 0.0, 0.0;
  const SurrogateCoeffs c =
      surrogate_coeffs(ChannelState::from_normalized(Matrix::Ones(2, 2)), RbOccupancy::from_gamma(g), Eigen::VectorXd::Zero(2));
  EXPECT_NEAR(c.B(0), 1.0 / (kLn2 * 2.0), 1e-15);
  EXPECT_NEAR(c.B(0), 0.7213, 1e-4);
  EXPECT_EQ(c.B(1), 0.0);
}

TEST(Surrogate, LowerBoundWithEqualityAtAnchor) {
  testing::Gen gen(47);
  for (int rep = 0; rep < 2000; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 4, 3, 3);
    Eigen::VectorXd anchor(3), p(3);
    for (Eigen::Index n = 0; n < 3; ++n) {
      anchor(n) = gen.coin(0.2) ? 0.0 : gen.log_uniform(1e-4, 5.0);
      p(n) = gen.coin(0.2) ? 0.0 : gen.log_uniform(1e-4, 5.0);
    }
    const SurrogateCoeffs c = surrogate_coeffs(in.cs, in.occ, anchor);
    EXPECT_NEAR(ground_rate_with_uav(in.occ, in.cs, anchor).total, c.A, 1e-9);
    const double lin = c.A - c.B.dot(p - anchor);
    EXPECT_GE(ground_rate_with_uav(in.occ, in.cs, p).total, lin - 1e-9);
    EXPECT_TRUE((c.B.array() >= 0.0).all());
  }
}

TEST(Surrogate, PriceIsMinusDerivative) {
  testing::Gen gen(48);
  for (int rep = 0; rep < 300; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 4, 2, 3);
    Eigen::VectorXd anchor(2);
    anchor << gen.log_uniform(1e-3, 2.0), gen.log_uniform(1e-3, 2.0);
    const SurrogateCoeffs c = surrogate_coeffs(in.cs, in.occ, anchor);
    for (std::size_t n = 0; n < 2; ++n) {
      if (in.occ.occupied[n].empty()) continue;
      const double h = 1e-5 * anchor(static_cast<Eigen::Index>(n));
      const double a = anchor(static_cast<Eigen::Index>(n));
      const double fd = -(ground_rate_on_rb(in.occ, in.cs, n, a + h) - ground_rate_on_rb(in.occ, in.cs, n, a - h)) / (2 * h);
      EXPECT_NEAR(fd, c.B(static_cast<Eigen::Index>(n)), 1e-5 * c.B(static_cast<Eigen::Index>(n)));
    }
  }
}

TEST(SurrogateSolve, ZeroPricesGiveWaterfilling) {
  const Eigen::VectorXd f = vec({4.0, 1.0, 0.5});
  const Eigen::VectorXd p = surrogate_solve(f, Eigen::VectorXd::Zero(3), {1, 1}, 1.0);
  EXPECT_LT((p - waterfill(f, 1.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SurrogateSolve, SingleRbUnconstrainedBranch) {
  const Eigen::VectorXd p = surrogate_solve(vec({10.0}), vec({1.0 / kLn2}), {1, 1}, 1.0);
  EXPECT_NEAR(p(0), 0.9, 1e-12);
  // Grid search of the surrogate confirms the stationary point.
  double best = -1e300, arg = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    const double v = std::log2(1 + 10 * x) - x / kLn2;
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  EXPECT_NEAR(arg, 0.9, 1e-4);
}

TEST(SurrogateSolve, ZeroUavWeightGivesZeroPower) {
  EXPECT_TRUE(surrogate_solve(vec({3, 4}), vec({0, 1}), {0, 1}, 1.0).isZero());
}

TEST(SurrogateSolve, BeatsRandomFeasiblePoints) {
  testing::Gen gen(49);
  for (int rep = 0; rep < 20; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 4, 5, 3, gen.log_uniform(0.05, 5.0));
    const Association a = optimal_association(in.cs, in.occ);
    Eigen::VectorXd anchor(5);
    for (Eigen::Index n = 0; n < 5; ++n) anchor(n) = gen.uniform(0, in.p_max / 5);
    const SurrogateCoeffs c = surrogate_coeffs(in.cs, in.occ, anchor);
    const Weights w{1.0, gen.uniform(0.2, 3)};
    const Eigen::VectorXd p = surrogate_solve(a.F_u, c.B, w, in.p_max);
    EXPECT_LE(p.sum(), in.p_max * (1 + 1e-9));
    EXPECT_TRUE((p.array() >= 0).all());
    const double s = surrogate_objective(a.F_u, c, w, p);
    for (int t = 0; t < 500; ++t) {
      Eigen::VectorXd x(5);
      for (Eigen::Index n = 0; n < 5; ++n) x(n) = gen.coin(0.3) ? 0.0 : gen.uniform(0, 1);
      if (x.sum() > 0) x *= gen.uniform(0, in.p_max) / x.sum();
      EXPECT_LE(surrogate_objective(a.F_u, c, w, x), s + 1e-9);
    }
  }
}

TEST(SurrogateSolve, MixedZeroAndPricedRbsMatchGridSearch) {
  // RB 0 has no ground UE, RB 1 is priced; the common multiplier handles both.
  testing::Gen gen(50);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd f = vec({gen.log_uniform(0.5, 5), gen.log_uniform(0.5, 5)});
    const Eigen::VectorXd b = vec({0.0, gen.log_uniform(0.05, 2)});
    const double pmax = gen.log_uniform(0.1, 3);
    const Eigen::VectorXd p = surrogate_solve(f, b, {1, 1}, pmax);
    auto obj = [&](double x, double y) { return std::log2(1 + x * f(0)) + std::log2(1 + y * f(1)) - b(1) * y; };
    double best = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      for (int j = 0; i + j <= 2000; ++j) best = std::max(best, obj(i * pmax / 2000, j * pmax / 2000));
    }
    EXPECT_GE(obj(p(0), p(1)), best - 1e-6);
  }
}

TEST(Sca, EgoisticWhenGroundWeightZero) {
  testing::Gen gen(51);
  for (int rep = 0; rep < 30; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 5, 6, 3);
    const Weights w{1.0, 0.0};
    const IcicSolution s = sca_solve(in.cs, in.occ, w, in.p_max);
    const IcicSolution e = egoistic(in.cs, in.occ, in.p_max, w);
    EXPECT_LE(s.diagnostics.iterations, 2u);
    EXPECT_NEAR(s.rates.weighted, e.rates.weighted, 1e-9);
  }
}

TEST(Sca, MonotoneBudgetAndAssociation) {
  testing::Gen gen(52);
  for (int rep = 0; rep < 100; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 2 + gen.index(5), 1 + gen.index(8), 3, gen.log_uniform(0.05, 5));
    const Weights w{gen.uniform(0.1, 2), gen.uniform(0.1, 2)};
    const IcicSolution s = sca_solve(in.cs, in.occ, w, in.p_max);
    const auto& t = s.diagnostics.objective_trace;
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i], t[i - 1] - 1e-9);
    EXPECT_TRUE(s.diagnostics.converged);
    EXPECT_LE(s.total_power(), in.p_max * (1 + 1e-9));
    const Association a = optimal_association(in.cs, in.occ);
    for (std::size_t n = 0; n < in.occ.num_rbs; ++n) {
      if (s.p(static_cast<Eigen::Index>(n)) > 0) {
        EXPECT_EQ(s.association.j_star[n], a.j_star[n]);
      }
    }
  }
}

TEST(Sca, TradesUavRateForGroundRate) {
  testing::Gen gen(53);
  for (int rep = 0; rep < 100; ++rep) {
    const testing::Instance in = testing::random_instance(gen, 5, 6, 3);
    const Weights w{1.0, gen.uniform(1.0, 4.0)};
    const IcicSolution s = sca_solve(in.cs, in.occ, w, in.p_max);
    const IcicSolution e = egoistic(in.cs, in.occ, in.p_max, w);
    EXPECT_LE(s.rates.uav_rate, e.rates.uav_rate + 1e-9);
    EXPECT_GE(s.rates.ground_rate, e.rates.ground_rate - 1e-9);
    EXPECT_GE(s.rates.weighted, e.rates.weighted - 1e-9);
  }
}

TEST(Sca, InitializationRule) {
  testing::Gen gen(54);
  const testing::Instance in = testing::random_instance(gen, 4, 6, 2);
  const Weights low{1.0, 0.5}, high{1.0, 2.0};
  EXPECT_NEAR(sca_solve(in.cs, in.occ, low, 1.0).diagnostics.objective_trace.front(),
              altruistic(in.cs, in.occ, 1.0, low).rates.weighted, 1e-12);
  EXPECT_NEAR(sca_solve(in.cs, in.occ, high, 1.0).diagnostics.objective_trace.front(),
              egoistic(in.cs, in.occ, 1.0, high).rates.weighted, 1e-12);
}

TEST(Sca, RejectsBadInput) {
  testing::Gen gen(55);
  const testing::Instance in = testing::random_instance(gen, 3, 2, 1);
  ScaOptions opt;
  opt.epsilon = 0.0;
  EXPECT_THROW(sca_solve(in.cs, in.occ, {1, 1}, 1.0, opt), ConfigError);
  EXPECT_THROW(sca_solve(in.cs, in.occ, {0, 0}, 1.0), ConfigError);
}

}  // namespace
}  // namespace uavicic
