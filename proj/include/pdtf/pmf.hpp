// Copyright 2026 The pdtf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDTF_PMF_HPP_
#define PDTF_PMF_HPP_

#include <Eigen/Core>

#include <span>
#include <vector>

namespace pdtf {

/// Truncated photon-number distribution. `probs[k]` is the probability of
/// exactly k photons for k = 0..n_cut; `tail` upper-bounds the mass beyond
/// n_cut, so probs.sum() + tail == 1 up to rounding.
struct PhotonPmf {
  Eigen::ArrayXd probs;
  double tail = 0.0;

  PhotonPmf() = default;
  PhotonPmf(Eigen::ArrayXd p, double t) : probs(std::move(p)), tail(t) {}

  int n_cut() const { return static_cast<int>(probs.size()) - 1; }

  double total() const { return probs.sum() + tail; }

  /// Mean photon number of the truncated part.
  double mean() const {
    double m = 0.0;
    for (int k = 1; k < probs.size(); ++k) m += k * probs[k];
    return m;
  }

  static PhotonPmf point_mass(int n, int n_cut);
};

/// Dense joint distribution over photon counts on several modes.
/// Axis 0 is the outgoing mode a1 by convention; axes 1..n-1 are local
/// detector arms. `values` is row-major flattened; `tail` is the omitted
/// joint mass outside the truncation box.
struct JointPmf {
  std::vector<int> dims;   // per-axis entry counts (truncation + 1)
  Eigen::ArrayXd values;   // row-major
  double tail = 0.0;

  JointPmf() = default;
  explicit JointPmf(std::vector<int> d, double t = 0.0);

  int rank() const { return static_cast<int>(dims.size()); }

  std::size_t flat_index(std::span<const int> idx) const;

  double& at(std::span<const int> idx) { return values[flat_index(idx)]; }
  double at(std::span<const int> idx) const { return values[flat_index(idx)]; }

  double& at(std::initializer_list<int> idx) {
    return values[flat_index(std::span<const int>(idx.begin(), idx.size()))];
  }
  double at(std::initializer_list<int> idx) const {
    return values[flat_index(std::span<const int>(idx.begin(), idx.size()))];
  }

  double total() const { return values.sum() + tail; }

  /// Marginal pmf of one axis; the joint tail carries over unchanged.
  PhotonPmf marginal(int axis) const;
};

}  // namespace pdtf

#endif  // PDTF_PMF_HPP_
