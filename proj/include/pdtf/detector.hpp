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

#ifndef PDTF_DETECTOR_HPP_
#define PDTF_DETECTOR_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdtf/fock_optics.hpp"
#include "pdtf/pmf.hpp"

namespace pdtf {

/// Threshold single-photon detector: efficiency eta, dark-count
/// probability per gate `dark`.
struct DetectorSpec {
  double eta = 0.20;
  double dark = 1e-7;

  void validate() const;
  /// Probability of no click given n incident photons: (1-eta)^n (1-dark).
  double p_noclick(int n) const;
  double p_click(int n) const { return 1.0 - p_noclick(n); }
};

/// (p_click, p_noclick) for n incident photons.
struct ClickProbs {
  double click;
  double noclick;
};
ClickProbs click_probs(const DetectorSpec& det, int n);

/// Click/no-click outcome tuple of one party's local detectors D1..Dn.
/// Bit i (LSB first) is detector D_{i+1}; "10" means D1 clicked, D2 did not.
struct ModePattern {
  std::uint32_t bits = 0;
  int size = 0;

  ModePattern() = default;
  ModePattern(std::uint32_t b, int n) : bits(b), size(n) {}

  bool click(int i) const { return (bits >> i) & 1u; }
  int click_count() const;
  std::string str() const;
  static ModePattern from_string(const std::string& s);

  friend auto operator<=>(const ModePattern&, const ModePattern&) = default;
};

/// Signals a detector mode of probability zero: conditioning on it is
/// undefined and the mode contributes no decoy constraint.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability of observing `pattern` on the detector axes of `joint`
/// (axis 0 is the undetected outgoing mode).
double mode_probability(const JointPmf& joint, const DetectorSpec& det, const ModePattern& pattern);

/// Photon-number distribution of the outgoing mode conditioned on the
/// detector pattern. Throws ConditioningError for zero-probability modes.
PhotonPmf conditional_output_pmf(const JointPmf& joint, const DetectorSpec& det,
                                 const ModePattern& pattern);

/// One party's full set of passive decoy states: all detector mode
/// patterns with their probabilities and conditioned a1 distributions.
struct DecoyModeFamily {
  int n_detectors = 0;
  std::vector<ModePattern> patterns;
  std::vector<double> mode_prob;
  std::vector<PhotonPmf> conditional;

  int find(const ModePattern& p) const;
  const PhotonPmf& distribution(const ModePattern& p) const;
  double probability(const ModePattern& p) const;
};

/// Builds the decoy-state family for an n-detector cascade. Streams the
/// cascade split by split, collapsing each detector to its click weights
/// immediately, so the full photon range of the source expansion is kept
/// without materializing a high-rank joint array.
DecoyModeFamily build_decoy_family(const SourceOptics& optics, const DetectorSpec& det,
                                   int n_detectors, int n_cut,
                                   JointConvention convention = JointConvention::correlated);

/// Aggregates a family down to its first `keep` detectors by summing mode
/// probabilities and probability-mixing the conditioned distributions over
/// the discarded detectors' outcomes. Used to form nested constraint sets
/// from a single physical setup.
DecoyModeFamily marginalize_detectors(const DecoyModeFamily& family, int keep);

}  // namespace pdtf

#endif  // PDTF_DETECTOR_HPP_
