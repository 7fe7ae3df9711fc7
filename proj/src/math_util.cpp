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

#include "pdtf/math_util.hpp"

#include <array>
#include <limits>

namespace pdtf {

namespace {

constexpr int kMaxFactorial = 170;

const std::array<double, kMaxFactorial + 1>& factorial_table() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
    return t;
  }();
  return table;
}

}  // namespace

double factorial(int n) {
  if (n < 0) throw std::domain_error("factorial: negative argument");
  if (n > kMaxFactorial) return std::numeric_limits<double>::infinity();
  return factorial_table()[static_cast<std::size_t>(n)];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= kMaxFactorial) {
    return factorial_table()[n] / (factorial_table()[k] * factorial_table()[n - k]);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

int poisson_truncation(double mu, double eps) {
  if (mu < 0.0) throw std::domain_error("poisson_truncation: negative mean");
  if (eps <= 0.0) throw std::invalid_argument("poisson_truncation: tolerance must be positive");
  // The tail beyond n is below term_n * r / (1-r) once r = mu/(n+1) < 1;
  // a running 1-cumsum would floor at machine epsilon and never reach eps.
  double term = std::exp(-mu);
  int n = 0;
  while (n < 400) {
    const double ratio = mu / (n + 1);
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < eps) break;
    ++n;
    term *= mu / n;
  }
  return n;
}

}  // namespace pdtf
