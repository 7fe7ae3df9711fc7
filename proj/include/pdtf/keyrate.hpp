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

#ifndef PDTF_KEYRATE_HPP_
#define PDTF_KEYRATE_HPP_

#include <stdexcept>

#include "pdtf/decoy_lp.hpp"

namespace pdtf {

/// Signals leakage caps that cannot carry the observed code-mode gain.
class InfeasibleCapsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// h(x, y) = -x log2 x - y log2 y + (x+y) log2 (x+y), with 0 log 0 = 0.
/// Equals (x+y) H2(x/(x+y)) for x+y > 0.
double entropy_h(double x, double y);

/// Upper bounds on the four parity-sector weights x_{00}, x_{10}, x_{11},
/// x_{01} of the code-mode click mass.
struct LeakageCaps {
  double cap00 = 0.0;
  double cap10 = 0.0;
  double cap11 = 0.0;
  double cap01 = 0.0;
  double q_mu = 0.0;

  double cap_sum() const { return cap00 + cap10 + cap11 + cap01; }
};

/// Assembles the parity-sector caps from the code intensity and the
/// certified yield upper bounds:
///   cap_pq = ( sum_{n,m} sqrt(P_{2n+p} P_{2m+q} Ybar_{2n+p,2m+q}) )^2,
/// where Ybar takes the bounded yields' upper bounds and 1 elsewhere.
/// The series runs to `series_cut` per index with an analytic geometric
/// tail bound on the remaining sqrt-Poisson mass.
LeakageCaps x_upper_bounds(double mu_code, const YieldBounds& yields, int series_cut,
                           double q_mu);

/// Upper bound on the per-trial information leakage: maximizes
/// h(x00/Q, x10/Q) + h(x11/Q, x01/Q) over the caps box intersected with
/// x00+x10+x11+x01 = Q. Deterministic split-coordinate maximization of a
/// concave objective; result clamped to [0,1].
double information_leakage(const LeakageCaps& caps);

/// R = Q_mu [1 - f h(er, 1-er) - I_AE]; negative values are returned as-is.
double secret_key_rate(double q_mu, double er_mu, double i_ae, double f_ec);

/// Repeaterless reference bound -log2(1 - eta) in bits per trial.
double plob_bound(double eta_total);

}  // namespace pdtf

#endif  // PDTF_KEYRATE_HPP_
