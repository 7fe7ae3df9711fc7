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

#ifndef PDTF_QUADFLOAT_HPP_
#define PDTF_QUADFLOAT_HPP_

// Minimal glue to use gcc's __float128 as an Eigen scalar. Only what dense
// storage and LU factorization touch: abs, comparisons, NumTraits. The abs
// overload must be visible before Eigen's templates are parsed so that
// unqualified abs(x) inside them can bind to it.

inline __float128 abs(__float128 x) { return x < 0 ? -x : x; }
inline __float128 sqrt(__float128 x) { return __builtin_sqrtl(static_cast<long double>(x)); }

#include <Eigen/Core>

#include <limits>

namespace Eigen {

template <>
struct NumTraits<__float128> {
  using Real = __float128;
  using NonInteger = __float128;
  using Literal = __float128;
  using Nested = __float128;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 2,
    AddCost = 4,
    MulCost = 8
  };
  static inline Real epsilon() { return static_cast<__float128>(1.9259299443872358531e-34L); }
  static inline Real dummy_precision() { return static_cast<__float128>(1e-30L); }
  static inline Real highest() { return static_cast<__float128>(std::numeric_limits<long double>::max()); }
  static inline Real lowest() { return -highest(); }
  static inline int digits10() { return 33; }
};

}  // namespace Eigen

#endif  // PDTF_QUADFLOAT_HPP_
