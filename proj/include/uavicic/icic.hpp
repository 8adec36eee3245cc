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

// Centralized UAV association and power allocation: the three baselines and
// the successive convex approximation (SCA) loop.
//
// SCA replaces the ground sum-rate by its first-order lower bound
//   ground(p) >= A - sum_n B_n (p_n - anchor_n)
// which makes each iteration a priced water-filling problem.

#pragma once

#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/rates.hpp"
#include "uavicic/scheduler.hpp"
#include "uavicic/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace uavicic {

/// Best free cell per RB (largest F, lowest index on ties).
///
/// With `allow_unserved`, RBs free nowhere are left unassociated (F_u = 0);
/// otherwise they raise ConstraintViolation.
inline Association optimal_association(const ChannelState& cs, const RbOccupancy& occ, bool allow_unserved = false) {
  Association a;
  a.j_star.assign(occ.num_rbs, std::nullopt);
  a.F_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    const auto& free = occ.free[n];
    if (free.empty()) {
      if (allow_unserved) continue;
      throw ConstraintViolation("RB " + std::to_string(n) + " is used in every cell; no cell can serve the UAV");
    }
    std::size_t best = free.front();
    for (std::size_t j : free) {
      if (cs.F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) >
          cs.F(static_cast<Eigen::Index>(best), static_cast<Eigen::Index>(n))) {
        best = j;
      }
    }
    a.j_star[n] = best;
    a.F_u(static_cast<Eigen::Index>(n)) = cs.F(static_cast<Eigen::Index>(best), static_cast<Eigen::Index>(n));
  }
  return a;
}

/// Water-filling p_n = (level - 1/F_n)^+ with sum p = P_max, over RBs with
/// F_n > floor and `allowed` (all RBs when empty). Exact active-set solution.
inline Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, double p_max, const std::vector<bool>& allowed = {},
                                 double floor = 0.0) {
  const auto size = gains.size();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
  if (!(p_max > 0.0)) return p;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index n = 0; n < size; ++n) {
    if (!allowed.empty() && !allowed[static_cast<std::size_t>(n)]) continue;
    if (gains(n) > floor && std::isfinite(gains(n))) idx.push_back(n);
  }
  if (idx.empty()) return p;
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return gains(a) > gains(b); });

  double inv_sum = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    inv_sum += 1.0 / gains(idx[k]);
    const double candidate = (p_max + inv_sum) / static_cast<double>(k + 1);
    if (k + 1 < idx.size() && candidate > 1.0 / gains(idx[k + 1])) continue;
    level = candidate;
    break;
  }
  for (Eigen::Index n : idx) p(n) = std::max(0.0, level - 1.0 / gains(n));
  return p;
}

struct SolveDiagnostics {
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
  bool converged = true;
  double epsilon = 0.0;
};

struct IcicSolution {
  std::string scheme;
  Association association;
  Eigen::VectorXd p;
  RateReport rates;
  bool denied = false;  // the UAV got no usable RB
  SolveDiagnostics diagnostics;

  double total_power() const { return p.sum(); }
};

namespace detail {

inline IcicSolution finish(std::string scheme, const ChannelState& cs, const RbOccupancy& occ, Association assoc,
                           Eigen::VectorXd p, const Weights& w) {
  // Only RBs that carry power keep an association.
  for (std::size_t n = 0; n < assoc.j_star.size(); ++n) {
    if (p(static_cast<Eigen::Index>(n)) <= 0.0) {
      p(static_cast<Eigen::Index>(n)) = 0.0;
    }
  }
  IcicSolution s;
  s.scheme = std::move(scheme);
  s.rates = evaluate(cs, occ, assoc, p, w);
  s.association = std::move(assoc);
  s.p = std::move(p);
  s.denied = !(s.p.sum() > 0.0);
  return s;
}

}  // namespace detail

/// UAV maximizes its own rate: best free cell per RB, water-filling over all RBs.
inline IcicSolution egoistic(const ChannelState& cs, const RbOccupancy& occ, double p_max, const Weights& w = {},
                             double gain_floor = 0.0, bool allow_unserved = false) {
  Association a = optimal_association(cs, occ, allow_unserved);
  Eigen::VectorXd p = waterfill(a.F_u, p_max, {}, gain_floor);
  return detail::finish("egoistic", cs, occ, std::move(a), std::move(p), w);
}

/// UAV uses only RBs free in every cell.
inline IcicSolution altruistic(const ChannelState& cs, const RbOccupancy& occ, double p_max, const Weights& w = {},
                               double gain_floor = 0.0, bool allow_unserved = false) {
  Association a = optimal_association(cs, occ, allow_unserved);
  std::vector<bool> allowed(occ.num_rbs, false);
  for (std::size_t n : occ.n_prime) allowed[n] = true;
  Eigen::VectorXd p = waterfill(a.F_u, p_max, allowed, gain_floor);
  return detail::finish("altruistic", cs, occ, std::move(a), std::move(p), w);
}

/// RBs usable when the UAV behaves like a ground UE of cell j_u: free in j_u and
/// in every cell of its first q rings.
inline std::vector<std::size_t> terrestrial_available_rbs(const RbOccupancy& occ, const NeighborSets& neighbors, int q,
                                                          std::size_t j_u) {
  std::vector<std::size_t> out;
  const auto& ring = neighbors.of(j_u, q);
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    if (occ.is_occupied(j_u, n)) continue;
    if (std::none_of(ring.begin(), ring.end(), [&](std::size_t k) { return occ.is_occupied(k, n); })) out.push_back(n);
  }
  return out;
}

/// UAV served by the single strongest BS, restricted to RBs the q-tier rule allows there.
inline IcicSolution terrestrial_icic(const ChannelState& cs, const RbOccupancy& occ, const NeighborSets& neighbors,
                                     int q, double p_max, const Weights& w = {}, double gain_floor = 0.0) {
  Eigen::Index j_u = 0;
  for (Eigen::Index j = 1; j < cs.F_tilde.size(); ++j) {
    if (cs.F_tilde(j) > cs.F_tilde(j_u)) j_u = j;
  }
  const auto ju = static_cast<std::size_t>(j_u);
  Association a;
  a.j_star.assign(occ.num_rbs, std::nullopt);
  a.F_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
  std::vector<bool> allowed(occ.num_rbs, false);
  for (std::size_t n : terrestrial_available_rbs(occ, neighbors, q, ju)) {
    allowed[n] = true;
    a.j_star[n] = ju;
    a.F_u(static_cast<Eigen::Index>(n)) = cs.F(j_u, static_cast<Eigen::Index>(n));
  }
  Eigen::VectorXd p = waterfill(a.F_u, p_max, allowed, gain_floor);
  return detail::finish("terrestrial", cs, occ, std::move(a), std::move(p), w);
}

struct SurrogateCoeffs {
  double A = 0.0;
  Eigen::VectorXd B;
  Eigen::VectorXd anchor;
};

/// First-order expansion of the ground sum-rate at `anchor`.
inline SurrogateCoeffs surrogate_coeffs(const ChannelState& cs, const RbOccupancy& occ, const Eigen::VectorXd& anchor) {
  SurrogateCoeffs c;
  c.anchor = anchor;
  c.B = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    const auto col = static_cast<Eigen::Index>(n);
    const double pr = anchor(col);
    for (std::size_t j : occ.occupied[n]) {
      const auto row = static_cast<Eigen::Index>(j);
      const double f = cs.F(row, col);
      const double g = occ.gamma(row, col);
      const double base = 1.0 + pr * f;
      c.A += log2_1p(g / base);
      c.B(col) += f * g / (kLn2 * (base + g) * base);
    }
  }
  return c;
}

/// mu_u sum log2(1 + p F_u) + mu_g (A - sum B (p - anchor)).
inline double surrogate_objective(const Eigen::VectorXd& f_u, const SurrogateCoeffs& c, const Weights& w,
                                  const Eigen::VectorXd& p) {
  double uav = 0.0;
  double lin = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    uav += log2_1p(p(n) * f_u(n));
    lin += c.B(n) * (p(n) - c.anchor(n));
  }
  return w.mu_u * uav + w.mu_g * (c.A - lin);
}

/// Maximizer of the surrogate under sum p <= P_max.
///
/// Unconstrained optimum p_n = (mu_u / (mu_g B_n ln2) - 1/F_n)^+; when it breaks
/// the budget, a common multiplier nu is added to every price and tuned so the
/// budget binds. RBs with zero price make the unconstrained optimum unbounded.
inline Eigen::VectorXd surrogate_solve(const Eigen::VectorXd& f_u, const Eigen::VectorXd& price, const Weights& w,
                                       double p_max, double gain_floor = 0.0) {
  w.validate();
  const auto size = f_u.size();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
  if (w.mu_u == 0.0 || !(p_max > 0.0)) return p;

  std::vector<Eigen::Index> active;
  for (Eigen::Index n = 0; n < size; ++n) {
    if (f_u(n) > gain_floor && std::isfinite(f_u(n))) active.push_back(n);
  }
  if (active.empty()) return p;

  const bool all_free = std::all_of(active.begin(), active.end(), [&](Eigen::Index n) { return w.mu_g * price(n) == 0.0; });
  if (all_free) {
    std::vector<bool> allowed(static_cast<std::size_t>(size), false);
    for (Eigen::Index n : active) allowed[static_cast<std::size_t>(n)] = true;
    return waterfill(f_u, p_max, allowed, gain_floor);
  }

  auto alloc = [&](double nu, Eigen::VectorXd& out) {
    double sum = 0.0;
    for (Eigen::Index n : active) {
      const double denom = (w.mu_g * price(n) + nu) * kLn2;
      const double v = denom > 0.0 ? std::max(0.0, w.mu_u / denom - 1.0 / f_u(n))
                                   : std::numeric_limits<double>::infinity();
      out(n) = v;
      sum += v;
    }
    return sum;
  };

  const bool unbounded = std::any_of(active.begin(), active.end(), [&](Eigen::Index n) { return w.mu_g * price(n) == 0.0; });
  if (!unbounded && alloc(0.0, p) <= p_max) return p;

  // Budget binds: sum p(nu) is continuous and nonincreasing; it vanishes at
  // nu >= max mu_u F_n / ln2.
  double hi = 0.0;
  for (Eigen::Index n : active) hi = std::max(hi, w.mu_u * f_u(n) / kLn2);
  double lo = 0.0;
  Eigen::VectorXd scratch = Eigen::VectorXd::Zero(size);
  for (int it = 0; it < 2000 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    const double mid_eff = (mid <= lo || mid >= hi) ? 0.5 * (lo + hi) : mid;
    if (alloc(mid_eff, scratch) > p_max) {
      lo = mid_eff;
    } else {
      hi = mid_eff;
    }
  }
  p.setZero();
  const double sum = alloc(hi, p);
  // Bisection leaves a sliver of unused budget; spread it on the active RBs by
  // rescaling the water levels, which keeps sum p <= P_max.
  if (sum > 0.0 && sum < p_max) {
    double pos = 0.0;
    for (Eigen::Index n : active) pos += p(n) > 0.0 ? 1.0 : 0.0;
    const double extra = (p_max - sum) / pos;
    for (Eigen::Index n : active) {
      if (p(n) > 0.0) p(n) += extra;
    }
    const double total = p.sum();
    if (total > p_max) p *= p_max / total;
  }
  return p;
}

enum class ScaInit { automatic, altruistic, egoistic, zero };

struct ScaOptions {
  double epsilon = 1e-6;
  std::size_t max_iters = 200;
  ScaInit init = ScaInit::automatic;
  double gain_floor = 0.0;
  bool allow_unserved = false;
};

/// Iterated surrogate maximization. The association is fixed once; every
/// iteration re-expands the ground rate at the previous allocation.
inline IcicSolution sca_solve(const ChannelState& cs, const RbOccupancy& occ, const Weights& w, double p_max,
                              const ScaOptions& opt = {}) {
  w.validate();
  if (!(opt.epsilon > 0.0)) throw ConfigError("sca: epsilon must be > 0");
  Association a = optimal_association(cs, occ, opt.allow_unserved);

  Eigen::VectorXd p;
  ScaInit init = opt.init;
  if (init == ScaInit::automatic) init = w.mu_g <= w.mu_u ? ScaInit::altruistic : ScaInit::egoistic;
  switch (init) {
    case ScaInit::altruistic: {
      std::vector<bool> allowed(occ.num_rbs, false);
      for (std::size_t n : occ.n_prime) allowed[n] = true;
      p = waterfill(a.F_u, p_max, allowed, opt.gain_floor);
      break;
    }
    case ScaInit::egoistic:
      p = waterfill(a.F_u, p_max, {}, opt.gain_floor);
      break;
    default:
      p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
      break;
  }

  auto objective = [&](const Eigen::VectorXd& x) { return evaluate(cs, occ, a, x, w).weighted; };
  SolveDiagnostics diag;
  diag.epsilon = opt.epsilon;
  diag.converged = false;
  double q_prev = objective(p);
  diag.objective_trace.push_back(q_prev);
  Eigen::VectorXd best = p;
  double q_best = q_prev;

  for (std::size_t r = 0; r < opt.max_iters; ++r) {
    const SurrogateCoeffs c = surrogate_coeffs(cs, occ, p);
    Eigen::VectorXd next = surrogate_solve(a.F_u, c.B, w, p_max, opt.gain_floor);
    const double q = objective(next);
    diag.objective_trace.push_back(q);
    ++diag.iterations;
    if (q > q_best) {
      q_best = q;
      best = next;
    }
    p = std::move(next);
    if (q - q_prev <= opt.epsilon) {
      diag.converged = true;
      break;
    }
    q_prev = q;
  }

  IcicSolution s = detail::finish("sca", cs, occ, std::move(a), std::move(best), w);
  s.diagnostics = std::move(diag);
  return s;
}

}  // namespace uavicic
