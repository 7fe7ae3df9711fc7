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

#include "pdtf/fock_optics.hpp"

#include <cmath>
#include <stdexcept>

#include "pdtf/math_util.hpp"

namespace pdtf {

namespace {

void check_unit_interval(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error(std::string(what) + " outside [0,1]");
}

// Power table base^0..base^n; avoids pow() and gets 0^0 = 1 right.
std::vector<double> powers(double base, int n) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  for (int i = 1; i <= n; ++i) p[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i - 1)] * base;
  return p;
}

}  // namespace

void SourceOptics::validate() const {
  if (mu_laser < 0.0) throw std::domain_error("SourceOptics: negative laser intensity");
  if (!(t1 > 0.0 && t1 < 1.0)) throw std::domain_error("SourceOptics: t1 outside (0,1)");
  if (!(t2 > 0.0 && t2 < 1.0)) throw std::domain_error("SourceOptics: t2 outside (0,1)");
  for (double t : cascade_ts) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("SourceOptics: cascade transmittance outside (0,1)");
  }
  if (extinction_db <= 0.0) throw std::domain_error("SourceOptics: extinction ratio must be positive");
}

PhotonPmf poisson_pmf(double mu, int n_cut) {
  if (mu < 0.0) throw std::domain_error("poisson_pmf: negative mean");
  if (n_cut < 0) throw std::invalid_argument("poisson_pmf: negative truncation");
  std::vector<double> w;
  poisson_weights(mu, n_cut, w);
  PhotonPmf pmf;
  pmf.probs = Eigen::Map<const Eigen::ArrayXd>(w.data(), n_cut + 1);
  pmf.tail = std::max(0.0, 1.0 - pmf.probs.sum());
  return pmf;
}

PhotonPmf bs_fock_pmf(int n, int m, double t) {
  if (n < 0 || m < 0) throw std::domain_error("bs_fock_pmf: negative photon number");
  check_unit_interval(t, "bs_fock_pmf: transmittance");

  const int total = n + m;
  const auto st = powers(std::sqrt(t), total);
  const auto su = powers(std::sqrt(1.0 - t), total);

  PhotonPmf pmf;
  pmf.probs = Eigen::ArrayXd::Zero(total + 1);
  pmf.tail = 0.0;
  const double input_norm = factorial(n) * factorial(m);
  for (int k = 0; k <= total; ++k) {
    // Amplitude of k photons at the transmitted output, collected from the
    // binomial expansion of (st*c + su*d)^n (su*c - st*d)^m.
    double amp = 0.0;
    const int lo = std::max(0, k - m);
    const int hi = std::min(k, n);
    for (int i = lo; i <= hi; ++i) {
      const int j = k - i;
      double term = binomial(n, i) * binomial(m, j) *
                    st[static_cast<std::size_t>(2 * i + m - k)] *
                    su[static_cast<std::size_t>(n + k - 2 * i)];
      if ((m - j) % 2 != 0) term = -term;
      amp += term;
    }
    amp *= std::sqrt(factorial(k) * factorial(total - k) / input_norm);
    pmf.probs[k] = amp * amp;
  }
  return pmf;
}

PhotonPmf output_pmf_coherent(double mu1, double mu2, double t, int n_cut) {
  const JointPmf joint = coherent_pair_joint(mu1, mu2, t, n_cut, /*q_cut=*/-1);
  PhotonPmf pmf = joint.marginal(0);
  pmf.tail = std::max(0.0, 1.0 - pmf.probs.sum());
  return pmf;
}

JointPmf coherent_pair_joint(double mu1, double mu2, double t, int k_cut, int q_cut,
                             JointConvention convention) {
  if (mu1 < 0.0 || mu2 < 0.0) throw std::domain_error("coherent_pair_joint: negative intensity");
  if (k_cut < 0) throw std::invalid_argument("coherent_pair_joint: negative truncation");
  check_unit_interval(t, "coherent_pair_joint: transmittance");

  if (convention == JointConvention::product) {
    const PhotonPmf pa = output_pmf_coherent(mu1, mu2, t, k_cut);
    const PhotonPmf pb = output_pmf_coherent(mu1, mu2, 1.0 - t, q_cut < 0 ? k_cut : q_cut);
    JointPmf joint({static_cast<int>(pa.probs.size()), static_cast<int>(pb.probs.size())});
    for (int k = 0; k < pa.probs.size(); ++k)
      for (int q = 0; q < pb.probs.size(); ++q) joint.at({k, q}) = pa.probs[k] * pb.probs[q];
    joint.tail = std::max(0.0, 1.0 - joint.values.sum());
    return joint;
  }

  const int n1 = poisson_truncation(mu1, 0.5 * kSourceNeglect);
  const int n2 = poisson_truncation(mu2, 0.5 * kSourceNeglect);
  // q_cut < 0 requests the full reflected range so no mass is lost there.
  const int q_max = q_cut < 0 ? n1 + n2 : q_cut;

  std::vector<double> w1, w2;
  poisson_weights(mu1, n1, w1);
  poisson_weights(mu2, n2, w2);

  JointPmf joint({k_cut + 1, q_max + 1});
  double* cells = joint.values.data();
  const std::size_t q_stride = static_cast<std::size_t>(q_max) + 1;
  for (int n = 0; n <= n1; ++n) {
    for (int m = 0; m <= n2; ++m) {
      const double w = w1[static_cast<std::size_t>(n)] * w2[static_cast<std::size_t>(m)];
      const PhotonPmf fock = bs_fock_pmf(n, m, t);
      const int total = n + m;
      const int k_hi = std::min(total, k_cut);
      for (int k = std::max(0, total - q_max); k <= k_hi; ++k) {
        cells[static_cast<std::size_t>(k) * q_stride + static_cast<std::size_t>(total - k)] +=
            w * fock.probs[k];
      }
    }
  }
  joint.tail = std::max(0.0, 1.0 - joint.values.sum());
  return joint;
}

JointPmf joint_pmf_two_intensity(const SourceOptics& optics, int n_cut,
                                 JointConvention convention) {
  optics.validate();
  return coherent_pair_joint(optics.mu_s(), optics.mu_r(), optics.a1_transmittance(), n_cut,
                             n_cut, convention);
}

JointPmf split_pmf(const PhotonPmf& parent, double t3) {
  check_unit_interval(t3, "split_pmf: transmittance");
  const int q_max = parent.n_cut();
  const auto pt = powers(t3, q_max);
  const auto pu = powers(1.0 - t3, q_max);

  JointPmf joint({q_max + 1, q_max + 1}, parent.tail);
  for (int q = 0; q <= q_max; ++q) {
    const double mass = parent.probs[q];
    if (mass == 0.0) continue;
    for (int j = 0; j <= q; ++j) {
      joint.at({j, q - j}) += mass * binomial(q, j) * pt[static_cast<std::size_t>(j)] *
                              pu[static_cast<std::size_t>(q - j)];
    }
  }
  return joint;
}

namespace {

// Replaces the last axis of `joint` by (transmitted, reflected), conditionally
// per photon count; exact binomial thinning that keeps all correlations.
JointPmf split_last_axis_correlated(const JointPmf& joint, double t) {
  const int q_max = joint.dims.back() - 1;
  const auto pt = powers(t, q_max);
  const auto pu = powers(1.0 - t, q_max);

  std::vector<int> dims = joint.dims;
  dims.back() = q_max + 1;
  dims.push_back(q_max + 1);
  JointPmf out(dims, joint.tail);

  const std::size_t outer = static_cast<std::size_t>(joint.values.size()) /
                            static_cast<std::size_t>(q_max + 1);
  const std::size_t stride = static_cast<std::size_t>(q_max) + 1;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = joint.values.data() + o * stride;
    double* dst = out.values.data() + o * stride * stride;
    for (int q = 0; q <= q_max; ++q) {
      const double mass = src[q];
      if (mass == 0.0) continue;
      for (int j = 0; j <= q; ++j) {
        dst[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(q - j)] +=
            mass * binomial(q, j) * pt[static_cast<std::size_t>(j)] *
            pu[static_cast<std::size_t>(q - j)];
      }
    }
  }
  return out;
}

// The independence reading: the split pair keeps only its own internal
// correlation and is attached as a factor independent of all other axes.
JointPmf split_last_axis_product(const JointPmf& joint, double t) {
  const int last = joint.rank() - 1;
  const PhotonPmf arm = joint.marginal(last);
  PhotonPmf arm_no_tail = arm;
  arm_no_tail.tail = 0.0;
  const JointPmf pair = split_pmf(arm_no_tail, t);

  const std::size_t stride = static_cast<std::size_t>(joint.dims[static_cast<std::size_t>(last)]);
  const std::size_t outer = static_cast<std::size_t>(joint.values.size()) / stride;

  std::vector<int> dims = joint.dims;
  dims.back() = pair.dims[0];
  dims.push_back(pair.dims[1]);
  JointPmf out(dims, joint.tail);

  const std::size_t pair_n = static_cast<std::size_t>(pair.values.size());
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = joint.values.data() + o * stride;
    double head = 0.0;
    for (std::size_t q = 0; q < stride; ++q) head += src[q];
    double* dst = out.values.data() + o * pair_n;
    for (std::size_t c = 0; c < pair_n; ++c) dst[c] = head * pair.values[static_cast<Eigen::Index>(c)];
  }
  return out;
}

}  // namespace

JointPmf cascade_joint_pmf(const SourceOptics& optics, int n_detectors, int n_cut,
                           JointConvention convention) {
  if (n_detectors < 1) throw std::invalid_argument("cascade_joint_pmf: need at least one detector");
  if (static_cast<int>(optics.cascade_ts.size()) < n_detectors - 1)
    throw std::invalid_argument("cascade_joint_pmf: missing cascade transmittance");

  JointPmf joint = joint_pmf_two_intensity(optics, n_cut, convention);
  for (int stage = 0; stage + 1 < n_detectors; ++stage) {
    const double t = optics.cascade_ts[static_cast<std::size_t>(stage)];
    joint = convention == JointConvention::correlated ? split_last_axis_correlated(joint, t)
                                                      : split_last_axis_product(joint, t);
  }
  return joint;
}

}  // namespace pdtf
