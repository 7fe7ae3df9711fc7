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

#include "pdtf/detector.hpp"

#include <algorithm>
#include <cmath>

#include "pdtf/math_util.hpp"

namespace pdtf {

void DetectorSpec::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("DetectorSpec: eta outside [0,1]");
  if (!(dark >= 0.0 && dark < 1.0)) throw std::domain_error("DetectorSpec: dark outside [0,1)");
}

double DetectorSpec::p_noclick(int n) const {
  if (n < 0) throw std::domain_error("DetectorSpec: negative photon count");
  double p = 1.0 - dark;
  for (int i = 0; i < n; ++i) p *= 1.0 - eta;
  return p;
}

ClickProbs click_probs(const DetectorSpec& det, int n) {
  const double u = det.p_noclick(n);
  return {1.0 - u, u};
}

int ModePattern::click_count() const {
  int c = 0;
  for (int i = 0; i < size; ++i) c += click(i) ? 1 : 0;
  return c;
}

std::string ModePattern::str() const {
  std::string s(static_cast<std::size_t>(size), '0');
  for (int i = 0; i < size; ++i)
    if (click(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

ModePattern ModePattern::from_string(const std::string& s) {
  ModePattern p;
  p.size = static_cast<int>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      p.bits |= 1u << i;
    } else if (s[i] != '0') {
      throw std::invalid_argument("ModePattern: expected only '0'/'1'");
    }
  }
  return p;
}

namespace {

// Detector click/no-click weight tables up to `n_max` photons.
struct WeightTables {
  std::vector<double> noclick;
  std::vector<double> click;
  WeightTables(const DetectorSpec& det, int n_max) {
    noclick.resize(static_cast<std::size_t>(n_max) + 1);
    click.resize(static_cast<std::size_t>(n_max) + 1);
    double u = 1.0 - det.dark;
    for (int n = 0; n <= n_max; ++n) {
      noclick[static_cast<std::size_t>(n)] = u;
      click[static_cast<std::size_t>(n)] = 1.0 - u;
      u *= 1.0 - det.eta;
    }
  }
  const std::vector<double>& select(bool clicked) const { return clicked ? click : noclick; }
};

// Sum of joint(k, d...) * prod_i w_{pattern_i}(d_i) over all detector
// counts, per k. Returns the weighted (unnormalized) a1 distribution.
Eigen::ArrayXd pattern_weighted_a1(const JointPmf& joint, const DetectorSpec& det,
                                   const ModePattern& pattern) {
  if (pattern.size != joint.rank() - 1)
    throw std::invalid_argument("pattern length does not match detector axes");
  det.validate();
  int max_axis = 0;
  for (std::size_t a = 1; a < joint.dims.size(); ++a) max_axis = std::max(max_axis, joint.dims[a] - 1);
  const WeightTables tables(det, max_axis);

  const int k_n = joint.dims[0];
  Eigen::ArrayXd weighted = Eigen::ArrayXd::Zero(k_n);
  std::vector<int> idx(joint.dims.size(), 0);
  const std::size_t det_cells = static_cast<std::size_t>(joint.values.size()) / static_cast<std::size_t>(k_n);
  for (int k = 0; k < k_n; ++k) {
    idx.assign(joint.dims.size(), 0);
    idx[0] = k;
    const double* base = joint.values.data() + static_cast<std::size_t>(k) * det_cells;
    // Walk the detector sub-box in row-major order.
    std::size_t flat = 0;
    double acc = 0.0;
    while (true) {
      double w = 1.0;
      for (int a = 1; a < joint.rank(); ++a)
        w *= tables.select(pattern.click(a - 1))[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      acc += base[flat] * w;
      // Increment detector indices.
      int a = joint.rank() - 1;
      while (a >= 1) {
        if (++idx[static_cast<std::size_t>(a)] < joint.dims[static_cast<std::size_t>(a)]) break;
        idx[static_cast<std::size_t>(a)] = 0;
        --a;
      }
      ++flat;
      if (a < 1) break;
    }
    weighted[k] = acc;
  }
  return weighted;
}

}  // namespace

double mode_probability(const JointPmf& joint, const DetectorSpec& det,
                        const ModePattern& pattern) {
  return pattern_weighted_a1(joint, det, pattern).sum();
}

PhotonPmf conditional_output_pmf(const JointPmf& joint, const DetectorSpec& det,
                                 const ModePattern& pattern) {
  const Eigen::ArrayXd weighted = pattern_weighted_a1(joint, det, pattern);
  const double head = weighted.sum();
  if (head <= 0.0) throw ConditioningError("detector mode has probability zero");
  // The joint's omitted mass could hit this pattern with weight up to 1, so
  // the pessimistic normalizer head + tail keeps every entry a certified
  // lower bound and the tail an upper bound on the out-of-range mass.
  const double denom = head + joint.tail;
  PhotonPmf pmf;
  pmf.probs = weighted / denom;
  pmf.tail = std::max(0.0, 1.0 - pmf.probs.sum());
  return pmf;
}

int DecoyModeFamily::find(const ModePattern& p) const {
  for (std::size_t i = 0; i < patterns.size(); ++i)
    if (patterns[i] == p) return static_cast<int>(i);
  return -1;
}

const PhotonPmf& DecoyModeFamily::distribution(const ModePattern& p) const {
  const int i = find(p);
  if (i < 0) throw ConditioningError("pattern not present in decoy family: " + p.str());
  return conditional[static_cast<std::size_t>(i)];
}

double DecoyModeFamily::probability(const ModePattern& p) const {
  const int i = find(p);
  if (i < 0) throw ConditioningError("pattern not present in decoy family: " + p.str());
  return mode_prob[static_cast<std::size_t>(i)];
}

DecoyModeFamily build_decoy_family(const SourceOptics& optics, const DetectorSpec& det,
                                   int n_detectors, int n_cut, JointConvention convention) {
  if (n_detectors < 1) throw std::invalid_argument("build_decoy_family: need >= 1 detector");
  if (static_cast<int>(optics.cascade_ts.size()) < n_detectors - 1)
    throw std::invalid_argument("build_decoy_family: missing cascade transmittance");
  if (n_cut < 0) throw std::invalid_argument("build_decoy_family: negative truncation");
  det.validate();

  // Full-resolution (a1, local arm) joint; nothing truncated below the
  // source expansion itself.
  const int n1 = poisson_truncation(optics.mu_s(), 0.5 * kSourceNeglect);
  const int n2 = poisson_truncation(optics.mu_r(), 0.5 * kSourceNeglect);
  const int range = n1 + n2;  // max photons on any arm
  JointPmf base = coherent_pair_joint(optics.mu_s(), optics.mu_r(), optics.a1_transmittance(),
                                      range, range, convention);
  const double neglected = base.tail;

  const WeightTables tables(det, range);
  const std::size_t cols = static_cast<std::size_t>(range) + 1;

  // One (k, arm) slab per click-history prefix.
  std::vector<Eigen::ArrayXXd> slabs;
  slabs.emplace_back(Eigen::Map<const Eigen::ArrayXXd>(base.values.data(),
                                                       static_cast<Eigen::Index>(cols),
                                                       static_cast<Eigen::Index>(cols))
                         .transpose());

  for (int stage = 0; stage + 1 < n_detectors; ++stage) {
    const double t = optics.cascade_ts[static_cast<std::size_t>(stage)];
    // Transition kernels: arm q -> remainder r with the tapped d = q - r
    // photons collapsed through the detector weights.
    Eigen::MatrixXd kern_u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cols),
                                                   static_cast<Eigen::Index>(cols));
    Eigen::MatrixXd kern_c = kern_u;
    for (int q = 0; q <= range; ++q) {
      for (int r = 0; r <= q; ++r) {
        const int d = q - r;
        double split = binomial(q, d);
        for (int i = 0; i < d; ++i) split *= t;
        for (int i = 0; i < r; ++i) split *= 1.0 - t;
        kern_u(q, r) = split * tables.noclick[static_cast<std::size_t>(d)];
        kern_c(q, r) = split * tables.click[static_cast<std::size_t>(d)];
      }
    }
    std::vector<Eigen::ArrayXXd> next;
    next.reserve(slabs.size() * 2);
    for (const auto& slab : slabs) {
      next.emplace_back((slab.matrix() * kern_u).array());
      next.emplace_back((slab.matrix() * kern_c).array());
    }
    slabs = std::move(next);
  }

  // Last detector absorbs the remaining arm.
  Eigen::VectorXd w_u(static_cast<Eigen::Index>(cols)), w_c(static_cast<Eigen::Index>(cols));
  for (int r = 0; r <= range; ++r) {
    w_u[r] = tables.noclick[static_cast<std::size_t>(r)];
    w_c[r] = tables.click[static_cast<std::size_t>(r)];
  }

  DecoyModeFamily family;
  family.n_detectors = n_detectors;
  for (std::size_t s = 0; s < slabs.size(); ++s) {
    for (int last = 0; last < 2; ++last) {
      // Prefix bits were appended detector-by-detector: slab index bit
      // (n_detectors-2-stage) corresponds to detector stage+1.
      std::uint32_t bits = 0;
      for (int stage = 0; stage + 1 < n_detectors; ++stage) {
        const int bit = (static_cast<int>(s) >> (n_detectors - 2 - stage)) & 1;
        bits |= static_cast<std::uint32_t>(bit) << stage;
      }
      if (last) bits |= 1u << (n_detectors - 1);

      const Eigen::VectorXd weighted = slabs[s].matrix() * (last ? w_c : w_u);
      const double head = weighted.sum();
      if (head <= 0.0) continue;  // mode carries no decoy constraint
      const double denom = head + neglected;

      PhotonPmf pmf;
      pmf.probs = Eigen::ArrayXd::Zero(n_cut + 1);
      const int k_hi = std::min(n_cut, range);
      for (int k = 0; k <= k_hi; ++k) pmf.probs[k] = weighted[k] / denom;
      pmf.tail = std::max(0.0, 1.0 - pmf.probs.sum());

      family.patterns.emplace_back(bits, n_detectors);
      family.mode_prob.push_back(head);
      family.conditional.push_back(std::move(pmf));
    }
  }
  return family;
}

DecoyModeFamily marginalize_detectors(const DecoyModeFamily& family, int keep) {
  if (keep < 1 || keep > family.n_detectors)
    throw std::invalid_argument("marginalize_detectors: bad detector count");
  const std::uint32_t mask = (1u << keep) - 1u;

  DecoyModeFamily out;
  out.n_detectors = keep;
  for (std::uint32_t bits = 0; bits < (1u << keep); ++bits) {
    double prob = 0.0;
    Eigen::ArrayXd probs;
    double tail_mass = 0.0;
    for (std::size_t i = 0; i < family.patterns.size(); ++i) {
      if ((family.patterns[i].bits & mask) != bits) continue;
      const double w = family.mode_prob[i];
      prob += w;
      if (probs.size() == 0) probs = Eigen::ArrayXd::Zero(family.conditional[i].probs.size());
      probs += w * family.conditional[i].probs;
      tail_mass += w * family.conditional[i].tail;
    }
    if (prob <= 0.0) continue;
    PhotonPmf pmf;
    pmf.probs = probs / prob;
    pmf.tail = tail_mass / prob;
    out.patterns.emplace_back(bits, keep);
    out.mode_prob.push_back(prob);
    out.conditional.push_back(std::move(pmf));
  }
  return out;
}

}  // namespace pdtf
