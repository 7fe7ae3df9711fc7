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

#ifndef PDTF_FOCK_OPTICS_HPP_
#define PDTF_FOCK_OPTICS_HPP_

#include <vector>

#include "pdtf/pmf.hpp"

namespace pdtf {

/// Joint mass neglected by the Fock expansion of each coherent source arm.
inline constexpr double kSourceNeglect = 1e-18;

/// Geometry of one party's source: laser -> BS1 -> (path s, path r) -> BS2
/// -> (outgoing mode a1, local arm a2) -> detector cascade BS3, BS4, ...
///
/// Conventions: BS1 routes fraction t1 of the laser to the code path r, so
/// mu_r = t1*mu_laser and mu_s = (1-t1)*mu_laser. t2 is the fraction of
/// path r routed to a1, which makes the code-mode output intensity
/// t1*t2*mu_laser (path s is blocked in code mode). Each cascade_ts[i] is
/// the fraction of the running local arm tapped off to detector D_{i+1}.
struct SourceOptics {
  double mu_laser = 0.1;
  double t1 = 0.5;
  double t2 = 0.5;
  std::vector<double> cascade_ts;
  double extinction_db = 20.0;

  double mu_s() const { return (1.0 - t1) * mu_laser; }
  double mu_r() const { return t1 * mu_laser; }
  double mu_code() const { return t2 * t1 * mu_laser; }
  /// Transmittance of BS2 seen from path s toward a1.
  double a1_transmittance() const { return 1.0 - t2; }

  void validate() const;
};

/// How to combine the two BS2 outputs (and later cascade splits) into a
/// joint distribution. `correlated` keeps the exact photon-number
/// correlation (outputs share the total input photon number);
/// `product` multiplies the marginals, which destroys all correlation
/// and with it the information content of detector conditioning. The
/// product form exists for comparison only.
enum class JointConvention { correlated, product };

/// Poisson pmf with mean mu truncated at n_cut; tail = 1 - sum.
PhotonPmf poisson_pmf(double mu, int n_cut);

/// Photon-number pmf at the transmitted output of a beam splitter fed with
/// Fock states |n> (arm a) and |m> (arm b); arm a couples to the measured
/// output with transmittance t. Exact; n+m+1 entries, tail = 0.
PhotonPmf bs_fock_pmf(int n, int m, double t);

/// Pmf of the transmitted output for two phase-randomized coherent inputs
/// with means mu1 (arm a, coupling t) and mu2 (arm b, coupling 1-t).
PhotonPmf output_pmf_coherent(double mu1, double mu2, double t, int n_cut);

/// Joint pmf over (transmitted output k, reflected output q) for the same
/// configuration; the correlated convention enforces k + q = n + m.
JointPmf coherent_pair_joint(double mu1, double mu2, double t, int k_cut, int q_cut,
                             JointConvention convention = JointConvention::correlated);

/// Joint pmf over (a1 photons, D1-arm photons) of the single-detector setup.
JointPmf joint_pmf_two_intensity(const SourceOptics& optics, int n_cut,
                                 JointConvention convention = JointConvention::correlated);

/// Splits a photon-number pmf at a beam splitter of transmittance t3 into a
/// joint over (transmitted j, reflected l); j + l = q for each parent count q.
JointPmf split_pmf(const PhotonPmf& parent, double t3);

/// Joint pmf over (a1, D1..Dn) for an n-detector cascade. Each stage splits
/// the running arm: under the correlated convention conditionally per photon
/// count (exact thinning), under the product convention via the split of the
/// axis marginal with the pair re-attached independently.
JointPmf cascade_joint_pmf(const SourceOptics& optics, int n_detectors, int n_cut,
                           JointConvention convention = JointConvention::correlated);

}  // namespace pdtf

#endif  // PDTF_FOCK_OPTICS_HPP_
