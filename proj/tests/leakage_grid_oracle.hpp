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

#ifndef PDTF_TESTS_LEAKAGE_GRID_ORACLE_HPP_
#define PDTF_TESTS_LEAKAGE_GRID_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdtf/keyrate.hpp"

namespace pdtf_tests {

// Brute-force reference for the leakage maximization: dense grid over the
// free coordinates (x00, x10, x11)/Q with x01 fixed by the mass constraint,
// zoomed in five rounds from step 1e-2 through 1e-3 down to 1e-6 around the
// running best (window of three previous steps). The objective is concave
// over the feasible polytope, so the zoom converges to the global maximum.
// Independent of the production path, which reduces the problem to a
// one-dimensional concave search.
inline double grid_leakage_oracle(const pdtf::LeakageCaps& caps) {
  const double q = caps.q_mu;
  const double c00 = std::min(1.0, caps.cap00 / q);
  const double c10 = std::min(1.0, caps.cap10 / q);
  const double c11 = std::min(1.0, caps.cap11 / q);
  const double c01 = std::min(1.0, caps.cap01 / q);

  const auto objective = [&](double a, double b, double c) {
    const double rest = 1.0 - a - b - c;
    if (rest < -1e-12 || rest > c01 + 1e-12) return -1.0;
    return pdtf::entropy_h(a, b) + pdtf::entropy_h(c, std::max(0.0, rest));
  };

  double lo_a = 0.0, hi_a = c00, lo_b = 0.0, hi_b = c10, lo_c = 0.0, hi_c = c11;
  double best = -1.0, ba = 0.0, bb = 0.0, bc = 0.0;
  double step = 1e-2;
  for (int round = 0; round < 5; ++round) {
    const auto axis = [&](double lo, double hi) {
      std::vector<double> v;
      for (double x = lo; x <= hi + 1e-15; x += step) v.push_back(std::min(x, hi));
      if (v.empty() || v.back() < hi - 1e-15) v.push_back(hi);
      return v;
    };
    for (double a : axis(lo_a, hi_a)) {
      for (double b : axis(lo_b, hi_b)) {
        for (double c : axis(lo_c, hi_c)) {
          const double val = objective(a, b, c);
          if (val > best) {
            best = val;
            ba = a;
            bb = b;
            bc = c;
          }
        }
      }
    }
    lo_a = std::max(0.0, ba - 3.0 * step);
    hi_a = std::min(c00, ba + 3.0 * step);
    lo_b = std::max(0.0, bb - 3.0 * step);
    hi_b = std::min(c10, bb + 3.0 * step);
    lo_c = std::max(0.0, bc - 3.0 * step);
    hi_c = std::min(c11, bc + 3.0 * step);
    step /= 10.0;
  }
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace pdtf_tests

#endif  // PDTF_TESTS_LEAKAGE_GRID_ORACLE_HPP_
