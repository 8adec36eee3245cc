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

#pragma once

#include "uavicic/common.hpp"

#include <vector>

namespace uavicic {

/// All link gains of one snapshot, indexed (cell j, RB n).
///
/// The UAV link is frequency-flat, so F(j, n) * sigma2(j, n) == F_tilde(j) for every n.
struct ChannelState {
  Matrix H;                 // terrestrial gain of the UE scheduled at (j, n); 0 where RB n is free in cell j
  Eigen::VectorXd F_tilde;  // UAV -> BS j gain
  Matrix sigma2;            // noise plus residual terrestrial interference, W
  Matrix F;                 // F_tilde / sigma2, per W

  std::size_t num_cells() const { return static_cast<std::size_t>(F.rows()); }
  std::size_t num_rbs() const { return static_cast<std::size_t>(F.cols()); }

  static ChannelState make(Matrix h, Eigen::VectorXd f_tilde, Matrix sigma2) {
    ChannelState cs;
    cs.F.resize(sigma2.rows(), sigma2.cols());
    for (Eigen::Index j = 0; j < sigma2.rows(); ++j) {
      for (Eigen::Index n = 0; n < sigma2.cols(); ++n) cs.F(j, n) = f_tilde(j) / sigma2(j, n);
    }
    cs.H = std::move(h);
    cs.F_tilde = std::move(f_tilde);
    cs.sigma2 = std::move(sigma2);
    return cs;
  }

  /// Synthetic state from normalized gains alone (F_tilde = 1, sigma2 = 1 / F).
  static ChannelState from_normalized(const Matrix& f) {
    Matrix sigma2 = f.cwiseInverse();
    return make(Matrix::Zero(f.rows(), f.cols()), Eigen::VectorXd::Ones(f.rows()), std::move(sigma2));
  }

  /// Rows for the given cells, in the given order.
  ChannelState restrict_to(const std::vector<std::size_t>& ids) const {
    ChannelState out;
    const auto rows = static_cast<Eigen::Index>(ids.size());
    out.H.resize(rows, H.cols());
    out.F_tilde.resize(rows);
    out.sigma2.resize(rows, sigma2.cols());
    out.F.resize(rows, F.cols());
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto j = static_cast<Eigen::Index>(ids[static_cast<std::size_t>(i)]);
      out.H.row(i) = H.row(j);
      out.F_tilde(i) = F_tilde(j);
      out.sigma2.row(i) = sigma2.row(j);
      out.F.row(i) = F.row(j);
    }
    return out;
  }
};

}  // namespace uavicic
