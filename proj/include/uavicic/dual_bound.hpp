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

// Upper bound on the weighted sum-rate through Lagrangian relaxation of the
// power budget. For a price nu the Lagrangian splits into one scalar problem per
// RB,
//   phi(p) = mu_u log2(1 + p F_u) + mu_g sum_j log2(1 + gamma_j / (1 + p F_j)) - nu p,
// solved globally by outer polyblock approximation (OPA) on
//   max z1 z2  s.t.  z1 <= (1 + p F_u)^mu_u,  z2 <= 2^(-nu p) prod_j (1 + gamma_j / (1 + p F_j))^mu_g.
//
// The polyblock is stored in the log2 domain, a = log2 z, where log2 U = a1 + a2
// equals phi on the boundary. Raw utilities overflow or lose every digit of
// the tolerance for realistic SINRs; logs do not, and the scaling z -> delta z
// becomes the shift a -> a + log2 delta.

#pragma once

#include "uavicic/common.hpp"
#include "uavicic/icic.hpp"
#include "uavicic/rates.hpp"
#include "uavicic/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace uavicic {

struct Interferer {
  double gamma = 0.0;
  double F = 0.0;
};

struct DualSubproblem {
  std::size_t rb = 0;
  double F_u = 0.0;
  std::vector<Interferer> interferers;
  double nu = 1.0;
  Weights weights;
};

struct OpaOptions {
  double epsilon = 1e-6;             // gap between certified upper and best feasible value, bps/Hz
  std::size_t max_vertices = 100000;
  std::size_t max_iters = 1000000;
  double shift_tol = 1e-12;          // bisection width on log2 delta
};

/// log2 of the second constraint's right-hand side: -nu p + mu_g sum log2(1 + gamma/(1 + p F)).
inline double opa_log_ground_term(const DualSubproblem& sub, double p) {
  double s = 0.0;
  for (const Interferer& i : sub.interferers) s += log2_1p(i.gamma / (1.0 + p * i.F));
  return -sub.nu * p + sub.weights.mu_g * s;
}

/// Per-RB Lagrangian term phi(p).
inline double dual_subproblem_value(const DualSubproblem& sub, double p) {
  return sub.weights.mu_u * log2_1p(p * sub.F_u) + opa_log_ground_term(sub, p);
}

/// No optimizer of phi exceeds (mu_u/(nu ln2) - 1/F_u)^+.
inline double opa_upper_power(const DualSubproblem& sub) {
  if (!(sub.nu > 0.0)) throw std::invalid_argument("dual subproblem: nu must be > 0");
  if (!(sub.F_u > 0.0) || sub.weights.mu_u == 0.0) return 0.0;
  return std::max(0.0, sub.weights.mu_u / (sub.nu * kLn2) - 1.0 / sub.F_u);
}

struct OpaVertex {
  double a1 = 0.0;  // log2 z1
  double a2 = 0.0;  // log2 z2
  // Tightened bound on phi over the feasible part of the vertex box; never
  // above a1 + a2.
  double bound = std::numeric_limits<double>::infinity();

  double log_utility() const { return std::min(a1 + a2, bound); }
};

struct Polyblock {
  std::vector<OpaVertex> vertices;
  double best_value = -std::numeric_limits<double>::infinity();  // log2 U of the best feasible point
  double best_power = 0.0;
};

/// Box [0, z0] with z0 = ((1 + p_hat F_u)^mu_u, prod (1 + gamma)^mu_g), in log2 form.
inline Polyblock opa_initial_box(const DualSubproblem& sub, double p_hat) {
  double ground = 0.0;
  for (const Interferer& i : sub.interferers) ground += log2_1p(i.gamma);
  Polyblock pb;
  pb.vertices.push_back({sub.weights.mu_u * log2_1p(p_hat * sub.F_u), sub.weights.mu_g * ground});
  return pb;
}

struct OpaProjection {
  double shift_feasible = 0.0;    // log2 delta, scaled vertex inside the feasible set
  double shift_infeasible = 0.0;  // log2 delta, scaled vertex outside (equal to feasible when delta = 1)
  double power = 0.0;             // p = max(0, chi) at the feasible shift

  double delta() const { return std::exp2(shift_feasible); }
};

/// Smallest power meeting the first constraint at z1 = 2^a1.
inline double opa_chi(const DualSubproblem& sub, double a1) {
  return std::max(0.0, std::expm1(a1 * kLn2 / sub.weights.mu_u) / sub.F_u);
}

/// Largest delta with delta * vertex feasible, by bisection on log2 delta.
inline OpaProjection opa_project(const DualSubproblem& sub, const OpaVertex& v, double tol = 1e-12) {
  auto feasible = [&](double t) { return v.a2 + t <= opa_log_ground_term(sub, opa_chi(sub, v.a1 + t)); };
  OpaProjection out;
  if (feasible(0.0)) {
    out.power = opa_chi(sub, v.a1);
    return out;
  }
  // At t = -a1 the first constraint holds with p = 0, and a2 never exceeds the
  // initial box height, so the lower end is feasible.
  double lo = std::min(0.0, -v.a1);
  double hi = 0.0;
  if (!feasible(lo)) {
    // Vertex below the box floor: shift until z2 fits at p = 0.
    lo = std::min(lo, opa_log_ground_term(sub, 0.0) - v.a2);
    if (!feasible(lo)) {
      std::ostringstream os;
      os << "OPA projection: no feasible lower end for vertex (" << v.a1 << ", " << v.a2 << ") on RB " << sub.rb;
      throw NumericalError(os.str());
    }
  }
  int steps = 0;
  while (hi - lo > tol) {
    if (++steps > 200) {
      std::ostringstream os;
      os << "OPA projection: bisection did not reach width " << tol << " in 200 steps on RB " << sub.rb
         << " (nu=" << sub.nu << ")";
      throw NumericalError(os.str());
    }
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.shift_feasible = lo;
  out.shift_infeasible = hi;
  out.power = opa_chi(sub, v.a1 + lo);
  return out;
}

struct OpaResult {
  double power = 0.0;
  double value = 0.0;  // phi(power), a certified lower bound on the subproblem optimum
  double upper = 0.0;  // certified upper bound on the subproblem optimum
  std::size_t iterations = 0;
  std::vector<double> upper_trace;
  std::vector<double> lower_trace;
};

namespace detail {

/// Largest p in [p_lo, p_hi] whose ground term still reaches `target`.
inline double opa_invert_ground(const DualSubproblem& sub, double target, double p_lo, double p_hi) {
  if (opa_log_ground_term(sub, p_hi) >= target) return p_hi;
  if (opa_log_ground_term(sub, p_lo) < target) return p_lo;
  for (int it = 0; it < 100 && p_hi - p_lo > 1e-15 * std::max(1.0, p_hi); ++it) {
    const double mid = 0.5 * (p_lo + p_hi);
    (opa_log_ground_term(sub, mid) >= target ? p_lo : p_hi) = mid;
  }
  return p_lo;
}

/// Upper bound on phi over the part of the feasible set inside the box of v.
///
/// The box meets the boundary curve on a power interval [lo, hi]: lo is the
/// last power where the ground term still reaches a2, hi the first where the
/// UAV term reaches a1. Outside the interval the box maximum is attained at an
/// end, so the box maximum is max phi over [lo, hi]. The ground term is convex
/// in p, hence below its chord there, and the UAV term is concave; the chord
/// plus the UAV term is a concave function maximized in closed form. Its error
/// shrinks with the square of the interval width, unlike the corner value
/// a1 + a2, which is off by a first-order amount on flat optima.
inline double opa_vertex_bound(const DualSubproblem& sub, const OpaVertex& v, double p_hat) {
  const double corner = v.a1 + v.a2;
  const double mu_u = sub.weights.mu_u;
  if (!(v.a1 > 0.0) || mu_u == 0.0) return corner;
  const double a1_top = mu_u * log2_1p(p_hat * sub.F_u);
  double hi = p_hat;
  if (v.a1 < a1_top) {
    hi = opa_chi(sub, v.a1);
    hi = std::min(p_hat, hi * (1.0 + 1e-12) + std::numeric_limits<double>::denorm_min());
    // Rounding in chi must not leave the UAV term short of a1 at hi.
    if (mu_u * log2_1p(hi * sub.F_u) < v.a1) return corner;
  }
  // If no power reaches a2 the box caps nothing on the ground side.
  const double lo = opa_log_ground_term(sub, 0.0) < v.a2 ? 0.0 : opa_invert_ground(sub, v.a2, 0.0, hi);
  if (!(lo < hi)) return corner;
  const double g_lo = opa_log_ground_term(sub, lo);
  const double g_hi = opa_log_ground_term(sub, hi);
  const double slope = (g_hi - g_lo) / (hi - lo);
  double p = hi;
  if (slope < 0.0) p = std::clamp(mu_u / (-slope * kLn2) - 1.0 / sub.F_u, lo, hi);
  const double h = mu_u * log2_1p(p * sub.F_u) + g_lo + slope * (p - lo);
  // Margin for the rounding in the chord and the logs.
  const double chord = h + 1e-12 * (1.0 + std::abs(h));
  return std::min(corner, chord);
}

inline void opa_offer(const DualSubproblem& sub, Polyblock& pb, double p) {
  const double v = dual_subproblem_value(sub, p);
  if (v > pb.best_value) {
    pb.best_value = v;
    pb.best_power = p;
  }
}

inline void opa_prune(Polyblock& pb) {
  auto& vs = pb.vertices;
  vs.erase(std::remove_if(vs.begin(), vs.end(), [&](const OpaVertex& v) { return v.log_utility() <= pb.best_value; }),
           vs.end());
  // Drop vertices dominated by another one (their boxes are nested).
  std::sort(vs.begin(), vs.end(), [](const OpaVertex& l, const OpaVertex& r) {
    return l.a1 != r.a1 ? l.a1 > r.a1 : l.a2 > r.a2;
  });
  std::vector<OpaVertex> kept;
  double max_a2 = -std::numeric_limits<double>::infinity();
  for (const OpaVertex& v : vs) {
    if (v.a2 > max_a2) {
      kept.push_back(v);
      max_a2 = v.a2;
    }
  }
  vs = std::move(kept);
}

}  // namespace detail

/// Global maximization of phi over [0, p_hat] to within epsilon.
inline OpaResult opa_iterate(const DualSubproblem& sub, const OpaOptions& opt = {}) {
  const double p_hat = opa_upper_power(sub);
  Polyblock pb = opa_initial_box(sub, p_hat);
  for (OpaVertex& v : pb.vertices) v.bound = detail::opa_vertex_bound(sub, v, p_hat);
  detail::opa_offer(sub, pb, 0.0);
  detail::opa_offer(sub, pb, p_hat);

  OpaResult res;
  for (;;) {
    detail::opa_prune(pb);
    double upper = pb.best_value;
    std::size_t top = 0;
    for (std::size_t i = 0; i < pb.vertices.size(); ++i) {
      if (pb.vertices[i].log_utility() > upper) {
        upper = pb.vertices[i].log_utility();
        top = i;
      }
    }
    res.upper_trace.push_back(upper);
    res.lower_trace.push_back(pb.best_value);
    if (upper - pb.best_value <= opt.epsilon || pb.vertices.empty()) {
      res.upper = upper;
      break;
    }
    if (res.iterations >= opt.max_iters) {
      throw NumericalError("OPA: no convergence within " + std::to_string(opt.max_iters) + " iterations on RB " +
                           std::to_string(sub.rb) + "; consider a larger epsilon");
    }
    ++res.iterations;

    const OpaVertex v = pb.vertices[top];
    const OpaProjection proj = opa_project(sub, v, opt.shift_tol);
    // Boundary point from the first constraint, and from the second one.
    detail::opa_offer(sub, pb, std::min(proj.power, p_hat));
    const double p_inv = detail::opa_invert_ground(sub, v.a2 + proj.shift_feasible, std::min(proj.power, p_hat), p_hat);
    detail::opa_offer(sub, pb, p_inv);

    pb.vertices.erase(pb.vertices.begin() + static_cast<std::ptrdiff_t>(top));
    if (proj.shift_infeasible < 0.0) {
      // Cut with the infeasible end so the polyblock keeps containing the feasible set.
      for (OpaVertex c : {OpaVertex{v.a1 + proj.shift_infeasible, v.a2}, OpaVertex{v.a1, v.a2 + proj.shift_infeasible}}) {
        // A child box sits inside the parent's, so the parent bound still holds.
        c.bound = std::min(v.log_utility(), detail::opa_vertex_bound(sub, c, p_hat));
        pb.vertices.push_back(c);
      }
    }
    if (pb.vertices.size() > opt.max_vertices) {
      throw NumericalError("OPA: vertex set exceeded " + std::to_string(opt.max_vertices) + " on RB " +
                           std::to_string(sub.rb) + "; consider a larger epsilon");
    }
  }
  res.power = pb.best_power;
  res.value = pb.best_value;
  return res;
}

struct DualSubResult {
  double power = 0.0;
  double value = 0.0;  // phi at `power`
  double upper = 0.0;  // certified optimum upper bound
};

/// Closed form without co-channel ground UEs (or with mu_g = 0), OPA otherwise.
inline DualSubResult dual_subproblem_solve(const DualSubproblem& sub, const OpaOptions& opt = {}) {
  const double p_hat = opa_upper_power(sub);
  if (sub.interferers.empty() || sub.weights.mu_g == 0.0 || p_hat == 0.0) {
    const double v = dual_subproblem_value(sub, p_hat);
    return {p_hat, v, v};
  }
  const OpaResult r = opa_iterate(sub, opt);
  return {r.power, r.value, r.upper};
}

struct DualEvaluation {
  double nu = 0.0;
  double g = 0.0;             // certified upper bound for this nu
  double lagrangian = 0.0;    // L at the returned powers
  Eigen::VectorXd p;
  double total_power() const { return p.sum(); }
};

inline DualSubproblem make_dual_subproblem(const ChannelState& cs, const RbOccupancy& occ, const Association& assoc,
                                           std::size_t n, double nu, const Weights& w) {
  DualSubproblem sub;
  sub.rb = n;
  sub.F_u = assoc.F_u(static_cast<Eigen::Index>(n));
  sub.nu = nu;
  sub.weights = w;
  for (std::size_t j : occ.occupied[n]) {
    sub.interferers.push_back({occ.gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)),
                               cs.F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n))});
  }
  return sub;
}

/// g(nu) = max_p L(p, nu), assembled per RB.
inline DualEvaluation dual_function(const ChannelState& cs, const RbOccupancy& occ, const Association& assoc,
                                    const Weights& w, double nu, double p_max, const OpaOptions& opt = {}) {
  if (!(nu > 0.0)) throw std::invalid_argument("dual function: nu must be > 0");
  DualEvaluation e;
  e.nu = nu;
  e.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
  double upper = 0.0;
  double lower = 0.0;
  for (std::size_t n = 0; n < occ.num_rbs; ++n) {
    const DualSubproblem sub = make_dual_subproblem(cs, occ, assoc, n, nu, w);
    const DualSubResult r = dual_subproblem_solve(sub, opt);
    e.p(static_cast<Eigen::Index>(n)) = r.power;
    upper += r.upper;
    lower += r.value;
  }
  e.g = upper + nu * p_max;
  e.lagrangian = lower + nu * p_max;
  return e;
}

struct DualOptions {
  OpaOptions opa;
  double nu_rel_tol = 1e-8;
  double nu_min = 1e-300;
};

struct DualResult {
  double nu_star = 0.0;
  double g_value = 0.0;
  Eigen::VectorXd p;
  double gap_vs_primal = 0.0;  // (g - best primal) / g, filled by callers
  std::size_t evaluations = 0;
};

/// min over nu > 0 of g(nu). Bisects the sign of the subgradient
/// P_max - sum p(nu) on a logarithmic nu scale and keeps the smallest g seen.
inline DualResult dual_minimize(const ChannelState& cs, const RbOccupancy& occ, const Weights& w, double p_max,
                                const DualOptions& opt = {}, bool allow_unserved = false) {
  w.validate();
  if (!(p_max > 0.0)) throw ConfigError("dual bound: p_max must be > 0");
  const Association assoc = optimal_association(cs, occ, allow_unserved);

  DualResult best;
  best.g_value = std::numeric_limits<double>::infinity();
  auto eval = [&](double nu) {
    DualEvaluation e = dual_function(cs, occ, assoc, w, nu, p_max, opt.opa);
    ++best.evaluations;
    if (e.g < best.g_value) {
      best.g_value = e.g;
      best.nu_star = nu;
      best.p = e.p;
    }
    return e;
  };

  // Above max mu_u F_u / ln2 every p_hat is 0, so the subgradient equals P_max > 0.
  double nu_hi = 0.0;
  for (Eigen::Index n = 0; n < assoc.F_u.size(); ++n) nu_hi = std::max(nu_hi, w.mu_u * assoc.F_u(n) / kLn2);
  if (!(nu_hi > 0.0)) {
    // The UAV cannot earn anything; g decreases toward the ground term as nu -> 0.
    eval(std::max(opt.nu_min, 1e-300));
    best.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(occ.num_rbs));
    return best;
  }
  nu_hi *= 1.0 + 1e-9;
  eval(nu_hi);

  double nu_lo = nu_hi;
  bool bracketed = false;
  while (nu_lo > opt.nu_min) {
    nu_lo = std::max(opt.nu_min, nu_lo * 1e-3);
    const DualEvaluation e = eval(nu_lo);
    if (e.total_power() > p_max) {
      bracketed = true;
      break;
    }
    nu_hi = nu_lo;
    if (nu_lo == opt.nu_min) break;
  }
  if (!bracketed) return best;  // g is nondecreasing down to nu_min

  while (nu_hi / nu_lo - 1.0 > opt.nu_rel_tol) {
    const double mid = std::sqrt(nu_lo * nu_hi);
    if (mid <= nu_lo || mid >= nu_hi) break;
    const DualEvaluation e = eval(mid);
    (e.total_power() > p_max ? nu_lo : nu_hi) = mid;
  }
  return best;
}

}  // namespace uavicic
