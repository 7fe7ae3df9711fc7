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

#include "pdtf/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pdtf/math_util.hpp"

namespace pdtf {

double entropy_h(double x, double y) {
  if (x < 0.0 || y < 0.0) throw std::domain_error("entropy_h: negative argument");
  return neg_p_log2_p(x) + neg_p_log2_p(y) - neg_p_log2_p(x + y);
}

namespace {

// sqrt-Poisson partial sums over one parity class: S = sum_n sqrt(P_{2n+p})
// for 2n+p <= 2*series_cut+p, plus a geometric bound on the remainder.
struct SqrtSeries {
  std::vector<double> sqrt_p;  // sqrt(P_k) for k = 0 .. k_max
  double head00 = 0.0;         // heads per parity
  double head1 = 0.0;
  double tail0 = 0.0;  // remainder bounds per parity
  double tail1 = 0.0;
};

SqrtSeries sqrt_poisson_series(double mu, int series_cut) {
  SqrtSeries s;
  const int k_max = 2 * series_cut + 1;
  std::vector<double> p;
  poisson_weights(mu, k_max, p);
  s.sqrt_p.resize(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) s.sqrt_p[k] = std::sqrt(p[k]);
  for (int k = 0; k <= k_max; ++k) {
    (k % 2 == 0 ? s.head00 : s.head1) += s.sqrt_p[static_cast<std::size_t>(k)];
  }
  // sqrt(P_{k+1})/sqrt(P_k) = sqrt(mu/(k+1)) <= r once k+1 > mu, so the
  // remainder beyond k_max is bounded by a geometric series.
  const double r = std::sqrt(mu / (k_max + 1));
  if (r < 1.0) {
    const double next = s.sqrt_p[static_cast<std::size_t>(k_max)] * r;
    const double whole_tail = next / (1.0 - r);
    s.tail0 = whole_tail;
    s.tail1 = whole_tail;
  } else {
    // Out of the series' domain; caps degrade to the trivial bound.
    s.tail0 = s.tail1 = std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace

LeakageCaps x_upper_bounds(double mu_code, const YieldBounds& yields, int series_cut,
                           double q_mu) {
  if (mu_code < 0.0) throw std::domain_error("x_upper_bounds: negative intensity");
  if (series_cut < 2) throw std::invalid_argument("x_upper_bounds: series cut too small");

  const SqrtSeries s = sqrt_poisson_series(mu_code, series_cut);
  const auto sqrt_p = [&](int k) { return s.sqrt_p[static_cast<std::size_t>(k)]; };
  const int k_max = 2 * series_cut + 1;

  const auto cap = [&](int pa, int pb) {
    // Head with certified yields where available, Y = 1 elsewhere.
    double head = 0.0;
    for (int ka = pa; ka <= k_max; ka += 2) {
      for (int kb = pb; kb <= k_max; kb += 2) {
        const auto it = yields.upper.find({ka, kb});
        const double ybar = it != yields.upper.end() ? it->second : 1.0;
        head += sqrt_p(ka) * sqrt_p(kb) * std::sqrt(ybar);
      }
    }
    // Remaining mass where either index runs beyond the cut, with Y = 1:
    // product-series tail (Sa + Ta)(Sb + Tb) - Sa Sb.
    const double sa = pa == 0 ? s.head00 : s.head1;
    const double sb = pb == 0 ? s.head00 : s.head1;
    const double ta = pa == 0 ? s.tail0 : s.tail1;
    const double tb = pb == 0 ? s.tail0 : s.tail1;
    const double tail = (sa + ta) * (sb + tb) - sa * sb;
    const double root = head + tail;
    return std::min(1.0, root * root);
  };

  LeakageCaps caps;
  caps.cap00 = cap(0, 0);
  caps.cap10 = cap(1, 0);
  caps.cap11 = cap(1, 1);
  caps.cap01 = cap(0, 1);
  caps.q_mu = q_mu;
  return caps;
}

namespace {

// max of h(a/Q, b/Q) over a + b = s, 0 <= a <= cap_a/Q, 0 <= b <= cap_b/Q,
// all in units of Q. The unconstrained maximizer is the even split.
double best_h_term(double s, double cap_a, double cap_b) {
  if (s <= 0.0) return 0.0;
  const double lo = std::max(0.0, s - cap_b);
  const double hi = std::min(cap_a, s);
  const double a = std::clamp(0.5 * s, lo, hi);
  return s * binary_entropy(a / s);
}

}  // namespace

double information_leakage(const LeakageCaps& caps) {
  if (caps.q_mu <= 0.0) throw std::domain_error("information_leakage: q_mu must be positive");
  if (caps.cap00 < 0.0 || caps.cap10 < 0.0 || caps.cap11 < 0.0 || caps.cap01 < 0.0)
    throw std::domain_error("information_leakage: negative cap");
  const double q = caps.q_mu;
  const double c00 = caps.cap00 / q;
  const double c10 = caps.cap10 / q;
  const double c11 = caps.cap11 / q;
  const double c01 = caps.cap01 / q;

  // Feasible range of the first term's mass share s = (x00 + x10)/Q.
  const double s_lo = std::max(0.0, 1.0 - (c11 + c01));
  const double s_hi = std::min(1.0, c00 + c10);
  if (s_lo > s_hi + 1e-12)
    throw InfeasibleCapsError("leakage caps cannot carry the code-mode gain");

  const auto objective = [&](double s) {
    return best_h_term(s, c00, c10) + best_h_term(1.0 - s, c11, c01);
  };

  // Golden-section search; the objective is concave in s (each term is a
  // partial maximization of a jointly concave function over a convex set).
  double a = s_lo;
  double b = std::max(s_lo, s_hi);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = objective(x1);
    }
  }
  const double best = std::max({objective(0.5 * (a + b)), objective(s_lo), objective(s_hi)});
  return std::clamp(best, 0.0, 1.0);
}

double secret_key_rate(double q_mu, double er_mu, double i_ae, double f_ec) {
  if (q_mu < 0.0 || er_mu < 0.0 || er_mu > 1.0) throw std::domain_error("secret_key_rate: bad inputs");
  return q_mu * (1.0 - f_ec * entropy_h(er_mu, 1.0 - er_mu) - i_ae);
}

double plob_bound(double eta_total) {
  if (!(eta_total >= 0.0 && eta_total < 1.0))
    throw std::domain_error("plob_bound: transmittance must lie in [0,1)");
  return -std::log2(1.0 - eta_total);
}

}  // namespace pdtf
