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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pdtf/keyrate.hpp"
#include "pdtf/math_util.hpp"

#include "leakage_grid_oracle.hpp"

using namespace pdtf;



TEST_CASE("two-argument entropy") {
  CHECK(entropy_h(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entropy_h(0.37, 0.0) == doctest::Approx(0.0));
  CHECK(entropy_h(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(entropy_h(0.25, 0.25) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(entropy_h(-0.1, 0.2), std::domain_error);
  // Scaled binary entropy identity.
  for (double x : {0.01, 0.2, 0.45}) {
    for (double y : {0.05, 0.3}) {
      CHECK(entropy_h(x, y) ==
            doctest::Approx((x + y) * binary_entropy(x / (x + y))).epsilon(1e-12));
    }
  }
}

TEST_CASE("parity-sector caps") {
  SUBCASE("trivial yields reduce to the sqrt-Poisson series") {
    // All upper bounds 1: cap_pq = (sum_{n,m} sqrt(P_a P_b))^2 over the
    // parity class; independent long-double evaluation.
    YieldBounds trivial;
    for (const auto& key : kBoundedYields) {
      trivial.upper[key] = 1.0;
      trivial.lower[key] = 0.0;
    }
    const double mu = 0.08;
    const LeakageCaps caps = x_upper_bounds(mu, trivial, 20, 0.01);

    const auto series = [&](int parity) {
      long double s = 0.0L;
      long double p = std::exp(static_cast<long double>(-mu));
      for (int k = 0; k <= 60; ++k) {
        if (k % 2 == parity) s += std::sqrt(p);
        p *= static_cast<long double>(mu) / (k + 1);
      }
      return s;
    };
    const double even = static_cast<double>(series(0));
    const double odd = static_cast<double>(series(1));
    const auto squared = [](double root) { return std::min(1.0, root * root); };
    CHECK(caps.cap00 == doctest::Approx(squared(even * even)).epsilon(1e-9));
    CHECK(caps.cap10 == doctest::Approx(squared(odd * even)).epsilon(1e-9));
    CHECK(caps.cap11 == doctest::Approx(squared(odd * odd)).epsilon(1e-9));
    CHECK(caps.cap01 == doctest::Approx(squared(even * odd)).epsilon(1e-9));
  }

  SUBCASE("vacuum code intensity leaves only the dark sector") {
    YieldBounds bounds;
    for (const auto& key : kBoundedYields) {
      bounds.upper[key] = 0.3;
      bounds.lower[key] = 0.0;
    }
    const LeakageCaps caps = x_upper_bounds(0.0, bounds, 20, 0.01);
    CHECK(caps.cap00 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(caps.cap10 == doctest::Approx(0.0));
    CHECK(caps.cap11 == doctest::Approx(0.0));
    CHECK(caps.cap01 == doctest::Approx(0.0));
  }

  SUBCASE("caps grow with the yield uppers") {
    YieldBounds lo_bounds, hi_bounds;
    for (const auto& key : kBoundedYields) {
      lo_bounds.upper[key] = 0.2;
      hi_bounds.upper[key] = 0.4;
      lo_bounds.lower[key] = hi_bounds.lower[key] = 0.0;
    }
    const LeakageCaps lo = x_upper_bounds(0.1, lo_bounds, 20, 0.01);
    const LeakageCaps hi = x_upper_bounds(0.1, hi_bounds, 20, 0.01);
    CHECK(lo.cap00 <= hi.cap00);
    CHECK(lo.cap10 <= hi.cap10);
    CHECK(lo.cap11 <= hi.cap11);
    CHECK(lo.cap01 <= hi.cap01);
  }
}

TEST_CASE("information leakage maximization") {
  SUBCASE("all mass in one even sector leaks nothing") {
    const double q = 0.02;
    CHECK(information_leakage({q, 0.0, 0.0, 0.0, q}) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("unconstraining caps saturate at one bit") {
    const double q = 0.02;
    CHECK(information_leakage({q, q, q, q, q}) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("two-sector split reproduces the binary entropy") {
    const double q = 0.02;
    const double i = information_leakage({0.9 * q, 0.1 * q, 0.0, 0.0, q});
    CHECK(i == doctest::Approx(0.46899559).epsilon(1e-5));
  }
  SUBCASE("infeasible caps are rejected") {
    CHECK_THROWS_AS(information_leakage({0.1, 0.1, 0.1, 0.1, 1.0}), InfeasibleCapsError);
    CHECK_THROWS_AS(information_leakage({0.1, 0.1, 0.1, 0.1, 0.0}), std::domain_error);
  }
  SUBCASE("agrees with the dense grid oracle on randomized caps") {
    std::mt19937 rng(20260809);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int tested = 0;
    while (tested < 25) {
      LeakageCaps caps;
      caps.q_mu = 0.01 + 0.2 * unit(rng);
      caps.cap00 = caps.q_mu * unit(rng);
      caps.cap10 = caps.q_mu * unit(rng);
      caps.cap11 = caps.q_mu * unit(rng);
      caps.cap01 = caps.q_mu * unit(rng);
      if (caps.cap_sum() < caps.q_mu) continue;
      ++tested;
      const double fast = information_leakage(caps);
      const double slow = pdtf_tests::grid_leakage_oracle(caps);
      CHECK(std::abs(fast - slow) < 1e-4);
    }
  }
  SUBCASE("monotone in each cap") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      LeakageCaps caps;
      caps.q_mu = 0.05;
      caps.cap00 = caps.q_mu * (0.3 + 0.7 * unit(rng));
      caps.cap10 = caps.q_mu * unit(rng);
      caps.cap11 = caps.q_mu * unit(rng);
      caps.cap01 = caps.q_mu * (0.3 + 0.7 * unit(rng));
      if (caps.cap_sum() < caps.q_mu) continue;
      const double base = information_leakage(caps);
      LeakageCaps larger = caps;
      larger.cap10 = std::min(caps.q_mu, caps.cap10 * 1.5 + 0.001);
      CHECK(information_leakage(larger) >= base - 1e-9);
    }
  }
}

TEST_CASE("secret key rate") {
  CHECK(secret_key_rate(0.04, 0.0, 0.0, 1.15) == doctest::Approx(0.04));
  CHECK(secret_key_rate(0.04, 0.1, 1.0, 1.15) < 0.0);
  const double h003 = binary_entropy(0.03);
  CHECK(h003 == doctest::Approx(0.19439186).epsilon(1e-7));
  CHECK(secret_key_rate(0.01, 0.03, 0.2, 1.15) ==
        doctest::Approx(0.01 * (1.0 - 1.15 * h003 - 0.2)).epsilon(1e-12));
  SUBCASE("linear in the leakage with slope -q_mu") {
    const double q = 0.02;
    const double r0 = secret_key_rate(q, 0.05, 0.0, 1.15);
    const double r1 = secret_key_rate(q, 0.05, 0.6, 1.15);
    CHECK((r1 - r0) == doctest::Approx(-q * 0.6).epsilon(1e-12));
  }
}

TEST_CASE("repeaterless bound") {
  CHECK(plob_bound(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(plob_bound(0.1) == doctest::Approx(0.15200309).epsilon(1e-7));
  const double eta = 1e-8;
  CHECK(plob_bound(eta) == doctest::Approx(eta / std::log(2.0)).epsilon(1e-6));
  CHECK_THROWS_AS(plob_bound(1.0), std::domain_error);
}
