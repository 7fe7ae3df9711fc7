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

#include "pdtf/exact_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pdtf::oracle {

namespace {

constexpr int kMaxPhotons = 12;

std::int64_t int_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

long double int_factorial_l(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long double eval_poly(const RadicalPoly& poly, const std::vector<long double>& radical_values) {
  long double sum = 0.0L;
  for (const auto& [exps, coeff] : poly) {
    long double mono = static_cast<long double>(coeff);
    for (std::size_t s = 0; s < exps.size(); ++s) {
      if (exps[s] == 0) continue;
      long double base = radical_values.at(s);
      for (int e = 0; e < exps[s]; ++e) mono *= base;
    }
    sum += mono;
  }
  return sum;
}

void add_term(RadicalPoly& poly, RadicalExponents exps, std::int64_t coeff) {
  auto [it, inserted] = poly.emplace(std::move(exps), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) poly.erase(it);
  }
}

}  // namespace

int MonomialState::total_photons() const {
  if (terms.empty()) return 0;
  int total = 0;
  for (int n : terms.begin()->first) total += n;
  return total;
}

double MonomialState::amplitude(const std::vector<int>& occupation) const {
  auto it = terms.find(occupation);
  if (it == terms.end()) return 0.0;
  long double occ_fact = 1.0L;
  for (int n : occupation) occ_fact *= int_factorial_l(n);
  return static_cast<double>(eval_poly(it->second, radical_values) * std::sqrt(occ_fact / norm));
}

double MonomialState::squared_norm() const {
  long double total = 0.0L;
  for (const auto& [occ, poly] : terms) {
    long double occ_fact = 1.0L;
    for (int n : occ) occ_fact *= int_factorial_l(n);
    long double amp = eval_poly(poly, radical_values);
    total += amp * amp * occ_fact / norm;
  }
  return static_cast<double>(total);
}

MonomialState fock_state(const std::vector<int>& occupations) {
  int total = 0;
  for (int n : occupations) {
    if (n < 0) throw std::invalid_argument("fock_state: negative occupation");
    total += n;
  }
  if (total > kMaxPhotons) throw std::invalid_argument("fock_state: photon cap exceeded");
  MonomialState state;
  state.modes = static_cast<int>(occupations.size());
  state.norm = 1.0L;
  for (int n : occupations) state.norm *= int_factorial_l(n);
  state.terms[occupations] = RadicalPoly{{RadicalExponents{}, 1}};
  return state;
}

MonomialState expand_bs(const MonomialState& state, int mode_a, int mode_b, double t) {
  if (mode_a < 0 || mode_b < 0 || mode_a >= state.modes || mode_b >= state.modes)
    throw std::invalid_argument("expand_bs: mode index out of range");
  if (mode_a == mode_b) throw std::domain_error("expand_bs: overlapping mode indices");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("expand_bs: transmittance outside [0,1]");

  MonomialState out;
  out.modes = state.modes;
  out.norm = state.norm;
  out.radical_values = state.radical_values;
  const std::size_t sym_t = out.radical_values.size();      // sqrt(t)
  const std::size_t sym_u = out.radical_values.size() + 1;  // sqrt(1-t)
  out.radical_values.push_back(std::sqrt(static_cast<long double>(t)));
  out.radical_values.push_back(std::sqrt(1.0L - static_cast<long double>(t)));

  for (const auto& [occ, poly] : state.terms) {
    const int na = occ[static_cast<std::size_t>(mode_a)];
    const int nb = occ[static_cast<std::size_t>(mode_b)];
    // (sqrt(t) a + sqrt(1-t) b)^na (sqrt(1-t) a - sqrt(t) b)^nb, collected
    // term by term over the binomial expansions of both powers.
    for (int i = 0; i <= na; ++i) {
      for (int j = 0; j <= nb; ++j) {
        std::int64_t coeff = int_binomial(na, i) * int_binomial(nb, j);
        if ((nb - j) % 2 != 0) coeff = -coeff;
        const int exp_t = i + (nb - j);        // sqrt(t) power
        const int exp_u = (na - i) + j;        // sqrt(1-t) power
        std::vector<int> new_occ = occ;
        new_occ[static_cast<std::size_t>(mode_a)] = i + j;
        new_occ[static_cast<std::size_t>(mode_b)] = (na - i) + (nb - j);
        RadicalPoly& dest = out.terms[new_occ];
        for (const auto& [exps, c] : poly) {
          RadicalExponents e = exps;
          e.resize(sym_u + 1, 0);
          e[sym_t] += exp_t;
          e[sym_u] += exp_u;
          add_term(dest, std::move(e), c * coeff);
        }
      }
    }
  }
  // Drop tuples whose amplitudes cancelled exactly.
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    it = it->second.empty() ? out.terms.erase(it) : std::next(it);
  }
  return out;
}

PhotonPmf outcome_pmf(const MonomialState& state, int mode) {
  if (mode < 0 || mode >= state.modes) throw std::invalid_argument("outcome_pmf: bad mode");
  const int total = state.total_photons();
  std::vector<long double> probs(static_cast<std::size_t>(total) + 1, 0.0L);
  for (const auto& [occ, poly] : state.terms) {
    long double occ_fact = 1.0L;
    for (int n : occ) occ_fact *= int_factorial_l(n);
    long double amp = eval_poly(poly, state.radical_values);
    probs[static_cast<std::size_t>(occ[static_cast<std::size_t>(mode)])] +=
        amp * amp * occ_fact / state.norm;
  }
  PhotonPmf pmf;
  pmf.probs = Eigen::ArrayXd::Zero(total + 1);
  for (int k = 0; k <= total; ++k) pmf.probs[k] = static_cast<double>(probs[static_cast<std::size_t>(k)]);
  pmf.tail = 0.0;
  return pmf;
}

JointPmf outcome_joint(const MonomialState& state) {
  const int total = state.total_photons();
  JointPmf joint(std::vector<int>(static_cast<std::size_t>(state.modes), total + 1));
  for (const auto& [occ, poly] : state.terms) {
    long double occ_fact = 1.0L;
    for (int n : occ) occ_fact *= int_factorial_l(n);
    long double amp = eval_poly(poly, state.radical_values);
    joint.at(std::span<const int>(occ.data(), occ.size())) +=
        static_cast<double>(amp * amp * occ_fact / state.norm);
  }
  return joint;
}

JointPmf coherent_bs_joint(double mu_a, double mu_b, double t, int n_cut) {
  if (mu_a < 0.0 || mu_b < 0.0) throw std::domain_error("coherent_bs_joint: negative intensity");
  if (n_cut < 0) throw std::invalid_argument("coherent_bs_joint: negative truncation");

  // Poisson weights in long double, summed until the joint source mass
  // neglects less than 1e-21 (subject to the oracle's photon cap).
  auto weights = [](double mu) {
    std::vector<long double> w;
    long double term = std::exp(-static_cast<long double>(mu));
    long double cum = term;
    w.push_back(term);
    int n = 0;
    while (1.0L - cum >= 1e-21L && n < kMaxPhotons) {
      ++n;
      term *= static_cast<long double>(mu) / n;
      cum += term;
      w.push_back(term);
    }
    return w;
  };
  const auto wa = weights(mu_a);
  const auto wb = weights(mu_b);

  JointPmf joint({n_cut + 1, n_cut + 1});
  for (std::size_t n = 0; n < wa.size(); ++n) {
    for (std::size_t m = 0; m < wb.size(); ++m) {
      if (static_cast<int>(n + m) > kMaxPhotons) continue;
      const auto state =
          expand_bs(fock_state({static_cast<int>(n), static_cast<int>(m)}), 0, 1, t);
      const JointPmf fock_joint = outcome_joint(state);
      const double w = static_cast<double>(wa[n] * wb[m]);
      for (int k = 0; k < fock_joint.dims[0] && k <= n_cut; ++k) {
        for (int q = 0; q < fock_joint.dims[1] && q <= n_cut; ++q) {
          joint.at({k, q}) += w * fock_joint.at({k, q});
        }
      }
    }
  }
  joint.tail = std::max(0.0, 1.0 - joint.values.sum());
  return joint;
}

}  // namespace pdtf::oracle
