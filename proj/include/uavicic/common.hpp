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

// Shared vocabulary: error types, unit conversions and rate weights.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uavicic {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Cells x RBs tables (gains, SINRs, noise powers).
using Matrix = Eigen::MatrixXd;

/// Invalid scenario or table input. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometry that a channel or antenna model cannot represent.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solution violates a structural constraint of the problem
/// (e.g. the UAV is associated with a cell whose ground UE already uses the RB).
class ConstraintViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative numerics failed to reach the requested tolerance. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// log2(1 + x), computed as a natural-log ratio.
inline double log2_1p(double x) { return std::log1p(x) / kLn2; }

/// Rate weights of the UAV and of the ground UEs in the weighted sum-rate.
struct Weights {
  double mu_u = 1.0;
  double mu_g = 1.0;

  void validate() const {
    if (!(mu_u >= 0.0) || !(mu_g >= 0.0)) {
      throw ConfigError("weights must be nonnegative (mu_u=" + std::to_string(mu_u) +
                        ", mu_g=" + std::to_string(mu_g) + ")");
    }
    if (mu_u == 0.0 && mu_g == 0.0) {
      throw ConfigError("weights mu_u and mu_g cannot both be zero");
    }
  }
};

}  // namespace uavicic
