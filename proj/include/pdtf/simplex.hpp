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

#ifndef PDTF_SIMPLEX_HPP_
#define PDTF_SIMPLEX_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <type_traits>
#include <vector>

namespace pdtf {

/// Dense bounded-variable primal simplex for small ranged LPs:
///
///   optimize c'x  subject to  row_lo <= A x <= row_hi,  var_lo <= x <= var_hi.
///
/// Two-phase with artificial variables, Bland's smallest-index rule
/// throughout (entering and tie-broken leaving), so runs are deterministic
/// and cycle-free. A solved instance keeps its basis, so subsequent calls
/// with different objectives warm-start from the previous optimum.
///
/// The yield-estimation LPs routinely produce basis matrices with condition
/// numbers beyond 1e12 (the decoy states overlap heavily), where duals in
/// working precision are unreliable. Every solve therefore also returns a
/// `certified` safe bound: duals are re-derived from the final basis in
/// long double with two rounds of quad-precision iterative refinement and
/// turned into a weak-duality bound that holds for any multiplier vector
/// (certified >= max for maximization, <= min for minimization), no matter
/// how noisy the pivoting was.
template <class Scalar>
class BoundedSimplexT {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  struct WideTraits;  // verification precision, defined in the implementation

  enum class Status { optimal, infeasible, iteration_limit };

  struct Result {
    Status status;
    Scalar objective = 0;  // value at the returned vertex
    Scalar certified = 0;  // safe dual bound on the true optimum
    Vector x;
  };

  BoundedSimplexT(Matrix a, Vector row_lo, Vector row_hi, Vector var_lo, Vector var_hi);

  Result solve(const Vector& objective, bool maximize);

  /// Absolute optimality / feasibility tolerance.
  static constexpr double kTol = 1e-9;

 private:
  enum class VStat : std::uint8_t { basic, at_lo, at_hi };

  int n_struct() const { return static_cast<int>(a_.cols()); }
  int n_rows() const { return static_cast<int>(a_.rows()); }
  int n_cols() const { return n_struct() + 2 * n_rows(); }

  Scalar col_dot(const Vector& y, int j) const;
  Vector ftran(int j) const;  // B^{-1} * column j
  Scalar nonbasic_value(int j) const;
  void refactor();
  void recompute_basics();
  bool phase1();
  Status run(const Vector& cost, bool phase_one);
  // Verification helpers work in a wider precision than Scalar: long double
  // with quad-refined residuals for the double / long double instantiations,
  // natively quad for the quad instantiation.
  using WideScalar =
      std::conditional_t<std::is_same_v<Scalar, __float128>, __float128, long double>;
  using VectorW = Eigen::Matrix<WideScalar, Eigen::Dynamic, 1>;
  VectorW refined_duals(const Vector& cost) const;
  VectorW refined_basics() const;
  double refined_infeasibility() const;
  Scalar certified_bound(const Vector& objective, bool maximize) const;

  Matrix a_;
  Vector lo_, hi_;     // per internal column
  Vector col_scale_;   // power-of-two equilibration factors
  std::vector<Scalar> art_sign_;

  std::vector<VStat> stat_;
  std::vector<int> basic_;
  Matrix binv_;
  Vector xb_;
  bool have_basis_ = false;
  int pivots_since_refactor_ = 0;
};

using BoundedSimplex = BoundedSimplexT<double>;

extern template class BoundedSimplexT<double>;
extern template class BoundedSimplexT<long double>;
extern template class BoundedSimplexT<__float128>;

}  // namespace pdtf

#endif  // PDTF_SIMPLEX_HPP_
