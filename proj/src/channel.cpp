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

#include "pdtf/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace pdtf {

double ChannelSpec::eta_side() const {
  return charlie_det.eta * std::pow(10.0, -loss_db_per_km * (distance_km / 2.0) / 10.0);
}

double ChannelSpec::eta_end_to_end(bool include_detector) const {
  const double fiber = std::pow(10.0, -loss_db_per_km * distance_km / 10.0);
  return include_detector ? charlie_det.eta * fiber : fiber;
}

void ChannelSpec::validate() const {
  if (distance_km < 0.0) throw std::domain_error("ChannelSpec: negative distance");
  if (loss_db_per_km < 0.0) throw std::domain_error("ChannelSpec: negative fiber loss");
  if (!(e_d >= 0.0 && e_d <= 0.5)) throw std::domain_error("ChannelSpec: e_d outside [0,0.5]");
  if (f_ec < 1.0) throw std::domain_error("ChannelSpec: error-correction efficiency below 1");
  charlie_det.validate();
}

double yield_nm(int n, int m, const ChannelSpec& ch) {
  if (n < 0 || m < 0) throw std::domain_error("yield_nm: negative photon number");
  const double eta = ch.eta_side();
  const double survive = 1.0 - ch.charlie_det.dark;
  double no_click = survive * survive;
  for (int i = 0; i < n + m; ++i) no_click *= 1.0 - eta;
  return 1.0 - no_click;
}

CodeModeStats code_mode_observables(const ChannelSpec& ch, double mu_code) {
  if (mu_code < 0.0) throw std::domain_error("code_mode_observables: negative intensity");
  const double eta = ch.eta_side();
  const double nu_correct = 2.0 * mu_code * eta * (1.0 - ch.e_d);
  const double nu_wrong = 2.0 * mu_code * eta * ch.e_d;
  const auto click_prob = [&](double nu) { return 1.0 - (1.0 - ch.charlie_det.dark) * std::exp(-nu); };
  const double p_c = click_prob(nu_correct);
  const double p_w = click_prob(nu_wrong);
  // Double clicks are discarded, so only exclusive clicks count.
  const double gain = p_c * (1.0 - p_w) + p_w * (1.0 - p_c);
  if (gain <= 0.0) throw std::domain_error("code_mode_observables: zero gain, error rate undefined");
  return {gain, p_w * (1.0 - p_c) / gain};
}

DecoyObservables decoy_gains(const DecoyModeFamily& alice, const DecoyModeFamily& bob,
                             const std::vector<std::pair<ModePattern, ModePattern>>& pairs,
                             const ChannelSpec& ch, double mu_code, int n_cut) {
  if (n_cut < 0) throw std::invalid_argument("decoy_gains: negative truncation");
  DecoyObservables obs;
  obs.mu_code = mu_code;
  const CodeModeStats code = code_mode_observables(ch, mu_code);
  obs.q_code = code.gain;
  obs.er_code = code.error_rate;

  // Yields only depend on the total photon number.
  std::vector<double> yield(2 * static_cast<std::size_t>(n_cut) + 1);
  for (int s = 0; s <= 2 * n_cut; ++s) yield[static_cast<std::size_t>(s)] = yield_nm(s, 0, ch);
  // Anything outside the box has total photon number > n_cut.
  const double y_beyond_min = yield_nm(n_cut + 1, 0, ch);

  for (const auto& [pa, pb] : pairs) {
    // Zero-probability modes were dropped from the families; the pairs that
    // reference them carry no information and produce no constraint.
    const int ia = alice.find(pa);
    const int ib = bob.find(pb);
    if (ia < 0 || ib < 0) continue;
    const PhotonPmf& da = alice.conditional[static_cast<std::size_t>(ia)];
    const PhotonPmf& db = bob.conditional[static_cast<std::size_t>(ib)];
    const int ka = std::min(n_cut, da.n_cut());
    const int kb = std::min(n_cut, db.n_cut());
    double sum = 0.0;
    for (int n = 0; n <= ka; ++n) {
      const double wa = da.probs[n];
      if (wa == 0.0) continue;
      double inner = 0.0;
      for (int m = 0; m <= kb; ++m) inner += db.probs[m] * yield[static_cast<std::size_t>(n + m)];
      sum += wa * inner;
    }
    const double tau = 1.0 - (1.0 - da.tail) * (1.0 - db.tail);
    GainValue g;
    g.value = sum + tau * 0.5 * (y_beyond_min + 1.0);
    g.half_width = tau * 0.5 * (1.0 - y_beyond_min);
    obs.decoy_gains[{pa, pb}] = g;
  }
  return obs;
}

double im_leakage_error(double mu_s, double extinction_db) {
  if (mu_s < 0.0) throw std::domain_error("im_leakage_error: negative intensity");
  if (extinction_db <= 0.0) throw std::domain_error("im_leakage_error: extinction must be positive");
  const double mu_leak = mu_s * std::pow(10.0, -extinction_db / 10.0);
  return 0.5 * (1.0 - std::exp(-mu_leak));
}

}  // namespace pdtf
