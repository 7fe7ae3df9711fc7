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

#ifndef PDTF_EXACT_ORACLE_HPP_
#define PDTF_EXACT_ORACLE_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "pdtf/pmf.hpp"

namespace pdtf::oracle {

// Brute-force symbolic Fock-state engine for small beam-splitter networks.
// Amplitudes are kept exact: every creation-operator monomial carries an
// integer coefficient times a monomial in formal radicals sqrt(t_i),
// sqrt(1-t_i), one pair per beam splitter applied. Numbers only appear when
// a probability is evaluated, in long double. Intended for tests and
// validation; capped at ~12 photons total.

/// Exponent vector over the radical symbols introduced so far
/// (even slots: sqrt(t_i), odd slots: sqrt(1-t_i)).
using RadicalExponents = std::vector<int>;

/// Integer-coefficient polynomial in the formal radicals.
using RadicalPoly = std::map<RadicalExponents, std::int64_t>;

struct MonomialState {
  int modes = 0;
  /// Map from per-mode occupation tuples to unnormalized monomial
  /// amplitudes: |state> = (1/sqrt(norm)) sum_T amp_T prod_i (a_i^dag)^{T_i} |0>.
  std::map<std::vector<int>, RadicalPoly> terms;
  /// Product of the initial occupations' factorials; probabilities divide by it.
  long double norm = 1.0L;
  /// Numeric values of sqrt(t_i), sqrt(1-t_i), in symbol order.
  std::vector<long double> radical_values;

  int total_photons() const;
  /// Numeric amplitude of one occupation tuple in the normalized Fock basis.
  double amplitude(const std::vector<int>& occupation) const;
  /// Sum of squared amplitudes; 1 for any state reached by expand_bs.
  double squared_norm() const;
};

/// The n-mode Fock state |n_0, n_1, ...>.
MonomialState fock_state(const std::vector<int>& occupations);

/// Applies a beam splitter of transmittance t across modes (mode_a, mode_b):
/// a^dag -> sqrt(t) a^dag + sqrt(1-t) b^dag,
/// b^dag -> sqrt(1-t) a^dag - sqrt(t) b^dag.
MonomialState expand_bs(const MonomialState& state, int mode_a, int mode_b, double t);

/// Marginal photon-number pmf of one mode; exact, tail = 0.
PhotonPmf outcome_pmf(const MonomialState& state, int mode);

/// Joint photon-number pmf over all modes of a (small) state.
JointPmf outcome_joint(const MonomialState& state);

/// Independent evaluation of the two-arm coherent-input beam splitter:
/// joint pmf over (photons at output a, photons at output b) for two
/// phase-randomized coherent inputs of means mu_a (arm a) and mu_b (arm b),
/// each axis truncated at n_cut. Sums Poisson-weighted Fock expansions.
JointPmf coherent_bs_joint(double mu_a, double mu_b, double t, int n_cut);

}  // namespace pdtf::oracle

#endif  // PDTF_EXACT_ORACLE_HPP_
