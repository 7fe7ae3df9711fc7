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

#include "pdtf/pmf.hpp"

#include <cassert>
#include <numeric>
#include <stdexcept>

namespace pdtf {

PhotonPmf PhotonPmf::point_mass(int n, int n_cut) {
  if (n < 0 || n_cut < 0) throw std::invalid_argument("point_mass: negative photon count");
  PhotonPmf pmf;
  pmf.probs = Eigen::ArrayXd::Zero(n_cut + 1);
  if (n <= n_cut) {
    pmf.probs[n] = 1.0;
  } else {
    pmf.tail = 1.0;
  }
  return pmf;
}

JointPmf::JointPmf(std::vector<int> d, double t) : dims(std::move(d)), tail(t) {
  std::size_t n = 1;
  for (int s : dims) {
    if (s <= 0) throw std::invalid_argument("JointPmf: axis size must be positive");
    n *= static_cast<std::size_t>(s);
  }
  values = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n));
}

std::size_t JointPmf::flat_index(std::span<const int> idx) const {
  assert(idx.size() == dims.size());
  std::size_t flat = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    assert(idx[a] >= 0 && idx[a] < dims[a]);
    flat = flat * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(idx[a]);
  }
  return flat;
}

PhotonPmf JointPmf::marginal(int axis) const {
  if (axis < 0 || axis >= rank()) throw std::invalid_argument("marginal: bad axis");
  // Row-major strides: stride of `axis` and the size of the blocks around it.
  std::size_t inner = 1;
  for (int a = axis + 1; a < rank(); ++a) inner *= static_cast<std::size_t>(dims[a]);
  const std::size_t axis_n = static_cast<std::size_t>(dims[axis]);
  const std::size_t outer = static_cast<std::size_t>(values.size()) / (inner * axis_n);

  PhotonPmf pmf;
  pmf.probs = Eigen::ArrayXd::Zero(dims[axis]);
  pmf.tail = tail;
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < axis_n; ++k) {
      const double* base = values.data() + (o * axis_n + k) * inner;
      double s = 0.0;
      for (std::size_t i = 0; i < inner; ++i) s += base[i];
      pmf.probs[static_cast<Eigen::Index>(k)] += s;
    }
  }
  return pmf;
}

}  // namespace pdtf
