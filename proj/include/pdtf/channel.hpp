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

#ifndef PDTF_CHANNEL_HPP_
#define PDTF_CHANNEL_HPP_

#include <map>
#include <utility>
#include <vector>

#include "pdtf/detector.hpp"
#include "pdtf/pmf.hpp"

namespace pdtf {

/// Symmetric fiber channel with the measuring node halfway between the
/// parties, plus the code-mode error model knobs.
struct ChannelSpec {
  double distance_km = 0.0;
  double loss_db_per_km = 0.2;
  double e_d = 0.03;          // misalignment error probability
  DetectorSpec charlie_det;   // measuring node's detectors L and R
  double f_ec = 1.15;         // error-correction efficiency

  /// Transmittance of one half of the link including detector efficiency.
  double eta_side() const;
  /// End-to-end transmittance Alice -> Bob, optionally with one detector
  /// efficiency folded in (reference-bound convention).
  double eta_end_to_end(bool include_detector) const;

  void validate() const;
};

/// Code-mode observables for one parameter point.
struct CodeModeStats {
  double gain;        // Q_mu
  double error_rate;  // er_mu
};

/// A decoy-mode gain: asymptotic expectation plus the half-width of the
/// interval produced by the truncated tail of the photon-number box.
struct GainValue {
  double value = 0.0;
  double half_width = 0.0;
};

/// Everything an honest run exposes to the estimation stage.
struct DecoyObservables {
  double q_code = 0.0;
  double er_code = 0.0;
  double mu_code = 0.0;
  std::map<std::pair<ModePattern, ModePattern>, GainValue> decoy_gains;
};

/// Probability the measuring node announces a click given the parties send
/// n and m photons: 1 - (1-dark)^2 (1-eta_side)^{n+m}.
double yield_nm(int n, int m, const ChannelSpec& ch);

/// Code-mode gain and error rate under misalignment-weighted intensity
/// routing with double clicks discarded.
CodeModeStats code_mode_observables(const ChannelSpec& ch, double mu_code);

/// Decoy gains for the requested pattern pairs, built from the two parties'
/// conditioned photon-number distributions.
DecoyObservables decoy_gains(const DecoyModeFamily& alice, const DecoyModeFamily& bob,
                             const std::vector<std::pair<ModePattern, ModePattern>>& pairs,
                             const ChannelSpec& ch, double mu_code, int n_cut);

/// Residual code-mode error caused by the intensity modulator's finite
/// extinction ratio: 0.5 (1 - e^{-mu_s * 10^{-db/10}}).
double im_leakage_error(double mu_s, double extinction_db);

}  // namespace pdtf

#endif  // PDTF_CHANNEL_HPP_
