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

// Antenna patterns.
//
// Base station: vertical uniform linear array of half-wave dipoles, electrically
// steered below the horizon. The pattern is omnidirectional in azimuth.
//
//   G(e) = G_dipole(e) * |AF(e)|^2 / N
//   G_dipole(e) = 1.64 * (cos(pi/2 * sin e) / cos e)^2
//   AF(e) = sum_k exp(j * 2 pi * d * k * (sin e - sin e_0)),  e_0 = -downtilt
//
// e is the elevation of the far end seen from the BS (positive above the horizon),
// d the element spacing in wavelengths. The normalization puts the peak array gain
// at N times the element peak.
//
// UAV: isotropic, or a downward cone of half-beamwidth phi (degrees) with gain
// G0 / phi^2 inside the footprint radius (H - H_B) tan(phi) and a constant side gain
// outside of it. phi = 90 degrees degenerates to the isotropic antenna.

#pragma once

#include "uavicic/common.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace uavicic {

inline constexpr double kHalfWaveDipolePeakGain = 1.64;

struct UlaPattern {
  int num_elements = 10;
  double spacing = 0.5;        // wavelengths
  double downtilt_deg = 10.0;  // electrical steering below the horizon

  void validate() const {
    if (num_elements < 1) throw ConfigError("bs antenna: num_elements must be >= 1");
    if (!(spacing > 0.0)) throw ConfigError("bs antenna: spacing must be > 0");
  }
};

/// Half-wave dipole power gain for a vertical element at elevation e.
inline double dipole_element_gain(double elevation_rad) {
  const double c = std::cos(elevation_rad);
  if (std::abs(c) < 1e-12) return 0.0;
  const double f = std::cos(0.5 * kPi * std::sin(elevation_rad)) / c;
  return kHalfWaveDipolePeakGain * f * f;
}

/// |AF|^2 / N; peaks at N in the steering direction.
inline double array_factor_gain(const UlaPattern& pattern, double elevation_deg) {
  const double steer = std::sin(deg_to_rad(-pattern.downtilt_deg));
  const double psi = 2.0 * kPi * pattern.spacing * (std::sin(deg_to_rad(elevation_deg)) - steer);
  std::complex<double> af{0.0, 0.0};
  for (int k = 0; k < pattern.num_elements; ++k) af += std::polar(1.0, psi * k);
  return std::norm(af) / pattern.num_elements;
}

/// Linear power gain of the BS array. Azimuth is accepted for symmetry with
/// other pattern interfaces; the pattern does not depend on it.
inline double bs_gain(const UlaPattern& pattern, double elevation_deg, double /*azimuth_deg*/ = 0.0) {
  return dipole_element_gain(deg_to_rad(elevation_deg)) * array_factor_gain(pattern, elevation_deg);
}

enum class UavAntennaKind { isotropic, directional };

struct UavAntenna {
  UavAntennaKind kind = UavAntennaKind::isotropic;
  double half_beamwidth_deg = 90.0;
  double main_gain_const = 7500.0;
  double side_gain = 0.0;

  void validate() const {
    if (!(half_beamwidth_deg > 0.0 && half_beamwidth_deg <= 90.0))
      throw ConfigError("uav antenna: half_beamwidth_deg must lie in (0, 90]");
    if (!(main_gain_const > 0.0)) throw ConfigError("uav antenna: main_gain_const must be > 0");
    if (!(side_gain >= 0.0)) throw ConfigError("uav antenna: side_gain must be >= 0");
  }

  /// True when the cone model applies (directional with phi < 90 degrees).
  bool is_cone() const { return kind == UavAntennaKind::directional && half_beamwidth_deg < 90.0; }

  /// Main-lobe footprint radius at BS height; infinite for the isotropic case.
  double footprint_radius(double uav_height, double bs_height) const {
    if (!is_cone()) return std::numeric_limits<double>::infinity();
    if (!(uav_height > bs_height)) {
      throw GeometryError("uav antenna: cone model needs the UAV above the BS (H=" + std::to_string(uav_height) +
                          " m, H_B=" + std::to_string(bs_height) + " m)");
    }
    return (uav_height - bs_height) * std::tan(deg_to_rad(half_beamwidth_deg));
  }

  double main_lobe_gain() const { return main_gain_const / (half_beamwidth_deg * half_beamwidth_deg); }
};

inline double uav_antenna_gain(const UavAntenna& ant, double horiz_dist, double uav_height, double bs_height) {
  if (!ant.is_cone()) return 1.0;
  const double rc = ant.footprint_radius(uav_height, bs_height);
  return horiz_dist <= rc ? ant.main_lobe_gain() : ant.side_gain;
}

}  // namespace uavicic
