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

#ifndef PDTF_DECOY_LP_HPP_
#define PDTF_DECOY_LP_HPP_

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdtf/channel.hpp"
#include "pdtf/detector.hpp"
#include "pdtf/simplex.hpp"

namespace pdtf {

/// Ranged linear program over the yields Y_{n,m}, n,m = 0..n_cut, each
/// boxed to [0,1]. Row r encodes lower[r] <= rows.row(r) . Y <= upper[r].
struct LinearProgram {
  int n_cut = 0;
  Eigen::MatrixXd rows;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> row_labels;

  int n_vars() const { return (n_cut + 1) * (n_cut + 1); }
  int var_index(int n, int m) const { return n * (n_cut + 1) + m; }
};

/// The yield keys the estimation stage bounds.
inline constexpr std::array<std::pair<int, int>, 6> kBoundedYields = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}}};

/// Certified bounds on the low-order yields.
struct YieldBounds {
  std::map<std::pair<int, int>, double> upper;
  std::map<std::pair<int, int>, double> lower;
  double y2_upper = 1.0;
};

/// Weights of the combined two-photon yield objective (Y20, Y11, Y02).
struct Y2Weights {
  double w20 = 0.25;
  double w11 = 0.5;
  double w02 = 0.25;
};

/// Which decoy gains feed the LP.
enum class GainSelection {
  all_pairs,      // every pattern pair
  paper_four,     // the ten-gain four-intensity selection
  default_eight,  // same-pattern pairs plus pairs against all-no-click
};

/// Pattern pairs for an n-detector setup under a selection policy.
std::vector<std::pair<ModePattern, ModePattern>> select_gain_pairs(int n_detectors,
                                                                   GainSelection selection);

/// One gain constraint per observed pattern pair:
///   Q - tau <= sum Pr_a(n) Pr_b(m) Y_{n,m} <= Q,
/// tau being the product-distribution mass beyond the truncation box.
LinearProgram build_constraints(const DecoyModeFamily& alice, const DecoyModeFamily& bob,
                                const DecoyObservables& gains, int n_cut);

/// Same, for active-decoy Poissonian distribution sets keyed by pattern.
LinearProgram build_constraints(const std::map<ModePattern, PhotonPmf>& alice,
                                const std::map<ModePattern, PhotonPmf>& bob,
                                const DecoyObservables& gains, int n_cut);

struct BoundResult {
  bool feasible = false;
  double value = 0.0;
};

/// Optimizes a single yield (or the weighted Y2 combination) over the
/// constraint polytope. `maximize` selects the bound direction.
BoundResult bound_yield(const LinearProgram& lp, std::pair<int, int> target, bool maximize);
BoundResult bound_yield_y2(const LinearProgram& lp, const Y2Weights& weights, bool maximize);

/// All six low-order yield bounds (plus Y2). When `need_lower` is false the
/// lower maps are filled with zeros. Solves share one warm-started basis.
/// Returns nullopt if the LP is infeasible.
std::optional<YieldBounds> solve_yield_bounds(const LinearProgram& lp, const Y2Weights& weights,
                                              bool need_lower);

/// One Poissonian distribution per active-decoy intensity, keyed by
/// synthetic one-hot patterns in intensity order.
std::map<ModePattern, PhotonPmf> active_decoy_distributions(const std::vector<double>& intensities,
                                                            int n_cut);

/// Perfect-knowledge reference: upper = lower = the channel's true yields.
YieldBounds infinite_decoy_bounds(const ChannelSpec& ch, const Y2Weights& weights);

/// Plain-text tabular dump (variables, bounds, constraint rows).
void dump_lp(const LinearProgram& lp, std::ostream& os);

}  // namespace pdtf

#endif  // PDTF_DECOY_LP_HPP_
