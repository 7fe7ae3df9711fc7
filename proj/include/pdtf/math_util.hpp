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

#ifndef PDTF_MATH_UTIL_HPP_
#define PDTF_MATH_UTIL_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pdtf {

/// n! as a double; exact up to n = 170 (beyond overflows to inf).
double factorial(int n);

/// Binomial coefficient C(n, k) as a double.
double binomial(int n, int k);

/// -p*log2(p) with the 0*log0 := 0 convention.
template <class Scalar>
Scalar neg_p_log2_p(Scalar p) {
  if (p <= Scalar(0)) return Scalar(0);
  return -p * std::log2(p);
}

/// Binary entropy H2(p) in bits.
template <class Scalar>
Scalar binary_entropy(Scalar p) {
  return neg_p_log2_p(p) + neg_p_log2_p(Scalar(1) - p);
}

/// Poisson weights e^{-mu} mu^k / k! for k = 0..n_cut via the stable
/// multiplicative recurrence. Writes into `out` (resized).
template <class Scalar>
void poisson_weights(Scalar mu, int n_cut, std::vector<Scalar>& out) {
  if (mu < Scalar(0)) throw std::domain_error("poisson_weights: negative mean");
  if (n_cut < 0) throw std::invalid_argument("poisson_weights: negative truncation");
  out.assign(static_cast<std::size_t>(n_cut) + 1, Scalar(0));
  Scalar term = std::exp(-mu);
  out[0] = term;
  for (int k = 1; k <= n_cut; ++k) {
    term *= mu / Scalar(k);
    out[static_cast<std::size_t>(k)] = term;
  }
}

/// Smallest N such that the Poisson tail beyond N is below `eps`.
/// Capped at 400 terms (intensities in this library are well below that).
int poisson_truncation(double mu, double eps);

}  // namespace pdtf

#endif  // PDTF_MATH_UTIL_HPP_
