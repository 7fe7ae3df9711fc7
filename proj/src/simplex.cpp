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

#include "pdtf/quadfloat.hpp"

#include "pdtf/simplex.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace pdtf {

// The yield-estimation LPs are brutally ill-conditioned: rows built from
// near-identical decoy states give basis condition numbers past 1e12, and
// the box widths of the ranged rows sit near machine noise. The solver
// therefore splits responsibilities:
//   - pivoting runs in the working precision (fast, possibly sloppy);
//   - verdicts that must be trustworthy (phase-1 feasibility, the primal
//     report, and above all the returned bound) are recomputed from the
//     final basis in long double with quad-precision residual refinement.
// The returned `certified` bound is a weak-duality bound that is valid for
// any multiplier vector, so pivoting noise can loosen it but never break it.

namespace {
constexpr double kPivotEps = 1e-11;
constexpr double kRatioTie = 1e-12;
constexpr int kMaxIter = 20000;
constexpr int kRefactorEvery = 64;
// Residual constraint violation above which an LP is reported infeasible.
// Far above the numerical mud of the honest instances, far below genuinely
// contradictory observables.
constexpr double kInfeasTol = 1e-7;

template <class Scalar>
constexpr Scalar inf() {
  // numeric_limits<__float128> is empty under -std=c++20; the double
  // infinity converts exactly for every scalar in use.
  return static_cast<Scalar>(std::numeric_limits<double>::infinity());
}

template <class Scalar>
Scalar abs_s(Scalar x) {
  return x < Scalar(0) ? -x : x;
}

// Verification precision per working precision: double and long double
// basis systems are stored exactly in long double and profit from
// quad-residual refinement; the quad instantiation verifies natively.
template <class Scalar>
struct WideOf {
  using type = long double;
  static constexpr int refinement_passes = 2;
};
template <>
struct WideOf<__float128> {
  using type = __float128;
  static constexpr int refinement_passes = 0;
};

// Solves M z = rhs with iterative refinement, residuals in quad precision.
template <class Wide, int kPasses>
Eigen::Matrix<Wide, Eigen::Dynamic, 1> refined_solve(
    const Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>& m,
    const Eigen::Matrix<Wide, Eigen::Dynamic, 1>& rhs) {
  using VectorW = Eigen::Matrix<Wide, Eigen::Dynamic, 1>;
  Eigen::PartialPivLU<Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>> lu(m);
  VectorW z = lu.solve(rhs);
  const int n = static_cast<int>(m.rows());
  for (int pass = 0; pass < kPasses; ++pass) {
    VectorW residual(n);
    for (int r = 0; r < n; ++r) {
      __float128 acc = static_cast<__float128>(rhs[r]);
      for (int k = 0; k < n; ++k)
        acc -= static_cast<__float128>(m(r, k)) * static_cast<__float128>(z[k]);
      residual[r] = static_cast<Wide>(acc);
    }
    z += lu.solve(residual);
  }
  return z;
}

}  // namespace

// Internal columns: [0, n) structural, [n, n+m) logical (coefficient -e_r,
// bounds = row range), [n+m, n+2m) artificial (coefficient sign_r * e_r).
// The equality system is A x - s + sign.*z = 0.
template <class Scalar>
BoundedSimplexT<Scalar>::BoundedSimplexT(Matrix a, Vector row_lo, Vector row_hi, Vector var_lo,
                                         Vector var_hi)
    : a_(std::move(a)) {
  const int m = n_rows();
  const int n = n_struct();
  if (row_lo.size() != m || row_hi.size() != m || var_lo.size() != n || var_hi.size() != n)
    throw std::invalid_argument("BoundedSimplex: dimension mismatch");
  for (int r = 0; r < m; ++r)
    if (row_lo[r] > row_hi[r] + Scalar(kTol))
      throw std::invalid_argument("BoundedSimplex: crossed row bounds");
  for (int j = 0; j < n; ++j)
    if (var_lo[j] > var_hi[j] + Scalar(kTol))
      throw std::invalid_argument("BoundedSimplex: crossed var bounds");

  // Power-of-two column equilibration: the constraint coefficients span
  // twenty-plus orders of magnitude, which by itself wrecks the basis
  // factorizations. Scaling by powers of two is exact, so the scaled
  // program is the same program.
  col_scale_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double norm = static_cast<double>(a_.col(j).cwiseAbs().maxCoeff());
    double scale = 1.0;
    if (norm > 0.0) {
      int exponent = 0;
      std::frexp(norm, &exponent);
      scale = std::ldexp(1.0, 1 - exponent);  // norm * scale in [1, 2)
    }
    col_scale_[j] = Scalar(scale);
    a_.col(j) *= col_scale_[j];
  }

  lo_.resize(n + 2 * m);
  hi_.resize(n + 2 * m);
  lo_.head(n) = var_lo.cwiseQuotient(col_scale_);
  hi_.head(n) = var_hi.cwiseQuotient(col_scale_);
  lo_.segment(n, m) = row_lo;
  hi_.segment(n, m) = row_hi;
  lo_.tail(m).setZero();
  hi_.tail(m).setConstant(inf<Scalar>());
  art_sign_.assign(static_cast<std::size_t>(m), Scalar(1));
}

template <class Scalar>
Scalar BoundedSimplexT<Scalar>::col_dot(const Vector& y, int j) const {
  const int n = n_struct();
  const int m = n_rows();
  if (j < n) return y.dot(a_.col(j));
  if (j < n + m) return -y[j - n];
  return art_sign_[static_cast<std::size_t>(j - n - m)] * y[j - n - m];
}

template <class Scalar>
typename BoundedSimplexT<Scalar>::Vector BoundedSimplexT<Scalar>::ftran(int j) const {
  const int n = n_struct();
  const int m = n_rows();
  if (j < n) return binv_ * a_.col(j);
  if (j < n + m) return -binv_.col(j - n);
  return art_sign_[static_cast<std::size_t>(j - n - m)] * binv_.col(j - n - m);
}

template <class Scalar>
Scalar BoundedSimplexT<Scalar>::nonbasic_value(int j) const {
  return stat_[static_cast<std::size_t>(j)] == VStat::at_hi ? hi_[j] : lo_[j];
}

template <class Scalar>
void BoundedSimplexT<Scalar>::refactor() {
  const int m = n_rows();
  const int n = n_struct();
  Matrix b(m, m);
  for (int r = 0; r < m; ++r) {
    const int j = basic_[static_cast<std::size_t>(r)];
    if (j < n) {
      b.col(r) = a_.col(j);
    } else if (j < n + m) {
      b.col(r) = Vector::Unit(m, j - n) * Scalar(-1);
    } else {
      b.col(r) = Vector::Unit(m, j - n - m) * art_sign_[static_cast<std::size_t>(j - n - m)];
    }
  }
  binv_ = Eigen::PartialPivLU<Matrix>(b).inverse();
  pivots_since_refactor_ = 0;
}

template <class Scalar>
void BoundedSimplexT<Scalar>::recompute_basics() {
  const int m = n_rows();
  const int n = n_struct();
  Vector rhs = Vector::Zero(m);
  for (int j = 0; j < n_cols(); ++j) {
    if (stat_[static_cast<std::size_t>(j)] == VStat::basic) continue;
    const Scalar v = nonbasic_value(j);
    if (v == Scalar(0)) continue;
    if (j < n) {
      rhs -= a_.col(j) * v;
    } else if (j < n + m) {
      rhs[j - n] += v;
    } else {
      rhs[j - n - m] -= art_sign_[static_cast<std::size_t>(j - n - m)] * v;
    }
  }
  xb_ = binv_ * rhs;
}

// Values of the basic variables recomputed from the basis in verification
// precision with refined residuals; the working-precision xb_ drifts by
// orders of magnitude more on ill-conditioned bases.
template <class Scalar>
typename BoundedSimplexT<Scalar>::VectorW BoundedSimplexT<Scalar>::refined_basics() const {
  using Wide = typename WideOf<Scalar>::type;
  using MatrixW = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;
  const int m = n_rows();
  const int n = n_struct();
  MatrixW b = MatrixW::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    const int j = basic_[static_cast<std::size_t>(r)];
    if (j < n) {
      for (int i = 0; i < m; ++i) b(i, r) = static_cast<Wide>(a_(i, j));
    } else if (j < n + m) {
      b(j - n, r) = Wide(-1);
    } else {
      b(j - n - m, r) = static_cast<Wide>(art_sign_[static_cast<std::size_t>(j - n - m)]);
    }
  }
  VectorW rhs = VectorW::Zero(m);
  for (int j = 0; j < n_cols(); ++j) {
    if (stat_[static_cast<std::size_t>(j)] == VStat::basic) continue;
    const Wide v = static_cast<Wide>(nonbasic_value(j));
    if (v == Wide(0)) continue;
    if (j < n) {
      for (int r = 0; r < m; ++r) rhs[r] -= static_cast<Wide>(a_(r, j)) * v;
    } else if (j < n + m) {
      rhs[j - n] += v;
    } else {
      rhs[j - n - m] -= static_cast<Wide>(art_sign_[static_cast<std::size_t>(j - n - m)]) * v;
    }
  }
  return refined_solve<Wide, WideOf<Scalar>::refinement_passes>(b, rhs);
}

template <class Scalar>
typename BoundedSimplexT<Scalar>::VectorW BoundedSimplexT<Scalar>::refined_duals(
    const Vector& cost) const {
  using Wide = typename WideOf<Scalar>::type;
  using MatrixW = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;
  const int m = n_rows();
  const int n = n_struct();
  MatrixW bt = MatrixW::Zero(m, m);  // B^T
  VectorW cb(m);
  for (int r = 0; r < m; ++r) {
    const int j = basic_[static_cast<std::size_t>(r)];
    cb[r] = static_cast<Wide>(cost[j]);
    if (j < n) {
      for (int i = 0; i < m; ++i) bt(r, i) = static_cast<Wide>(a_(i, j));
    } else if (j < n + m) {
      bt(r, j - n) = Wide(-1);
    } else {
      bt(r, j - n - m) = static_cast<Wide>(art_sign_[static_cast<std::size_t>(j - n - m)]);
    }
  }
  return refined_solve<Wide, WideOf<Scalar>::refinement_passes>(bt, cb);
}

// Shared pivoting loop; `cost` is over internal columns, sense = minimize.
template <class Scalar>
typename BoundedSimplexT<Scalar>::Status BoundedSimplexT<Scalar>::run(const Vector& cost,
                                                                      bool phase_one) {
  const int m = n_rows();
  const int first_art = n_struct() + m;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (phase_one) {
      Scalar infeas = 0;
      for (int r = 0; r < m; ++r)
        if (basic_[static_cast<std::size_t>(r)] >= first_art) infeas += abs_s(xb_[r]);
      if (infeas <= Scalar(kTol)) return Status::optimal;
    }

    // Dual prices for the current basis.
    Vector cb(m);
    for (int r = 0; r < m; ++r) cb[r] = cost[basic_[static_cast<std::size_t>(r)]];
    const Vector y = binv_.transpose() * cb;

    // Bland entering rule: smallest-index improving nonbasic column.
    int enter = -1;
    Scalar sigma = 0;
    for (int j = 0; j < n_cols(); ++j) {
      if (stat_[static_cast<std::size_t>(j)] == VStat::basic) continue;
      if (hi_[j] - lo_[j] < Scalar(kPivotEps)) continue;  // fixed
      const Scalar d = cost[j] - col_dot(y, j);
      if (stat_[static_cast<std::size_t>(j)] == VStat::at_lo && d < Scalar(-kTol)) {
        enter = j;
        sigma = 1;
        break;
      }
      if (stat_[static_cast<std::size_t>(j)] == VStat::at_hi && d > Scalar(kTol)) {
        enter = j;
        sigma = -1;
        break;
      }
    }
    if (enter < 0) return Status::optimal;

    const Vector w = ftran(enter);

    // Ratio test: smallest step at which a basic variable hits a bound,
    // against the entering column's own range (bound flip). Ties among
    // blocking basics break toward the smallest variable index.
    Scalar step = hi_[enter] - lo_[enter];
    int leave_row = -1;
    bool leave_at_hi = false;
    for (int r = 0; r < m; ++r) {
      const Scalar rate = -sigma * w[r];  // movement of basic r per unit step
      const int var = basic_[static_cast<std::size_t>(r)];
      Scalar allowed;
      bool hits_hi;
      if (rate > Scalar(kPivotEps)) {
        if (hi_[var] == inf<Scalar>()) continue;
        allowed = std::max(Scalar(0), hi_[var] - xb_[r]) / rate;
        hits_hi = true;
      } else if (rate < Scalar(-kPivotEps)) {
        allowed = std::max(Scalar(0), xb_[r] - lo_[var]) / -rate;
        hits_hi = false;
      } else {
        continue;
      }
      const bool strictly_better = allowed < step - Scalar(kRatioTie);
      const bool tie_with_pivot = leave_row >= 0 && allowed <= step + Scalar(kRatioTie) &&
                                  var < basic_[static_cast<std::size_t>(leave_row)];
      if (strictly_better || tie_with_pivot) {
        if (strictly_better) step = allowed;
        leave_row = r;
        leave_at_hi = hits_hi;
      }
    }

    if (step == inf<Scalar>()) return Status::iteration_limit;  // cannot happen with boxes

    if (leave_row < 0) {
      // Bound flip: entering variable crosses its whole range.
      xb_ -= sigma * step * w;
      stat_[static_cast<std::size_t>(enter)] =
          stat_[static_cast<std::size_t>(enter)] == VStat::at_lo ? VStat::at_hi : VStat::at_lo;
      continue;
    }

    // Pivot: entering becomes basic, blocking variable leaves at its bound.
    const Scalar enter_value = nonbasic_value(enter) + sigma * step;
    const int leave_var = basic_[static_cast<std::size_t>(leave_row)];
    xb_ -= sigma * step * w;
    stat_[static_cast<std::size_t>(leave_var)] = leave_at_hi ? VStat::at_hi : VStat::at_lo;
    stat_[static_cast<std::size_t>(enter)] = VStat::basic;
    basic_[static_cast<std::size_t>(leave_row)] = enter;

    const Scalar wp = w[leave_row];
    if (abs_s(wp) < Scalar(kPivotEps) || ++pivots_since_refactor_ >= kRefactorEvery) {
      refactor();
      recompute_basics();
    } else {
      for (int r = 0; r < m; ++r) {
        if (r == leave_row) continue;
        const Scalar f = w[r] / wp;
        if (f != Scalar(0)) binv_.row(r) -= f * binv_.row(leave_row);
      }
      binv_.row(leave_row) /= wp;
      xb_[leave_row] = enter_value;
    }
  }
  return Status::iteration_limit;
}

// Residual bound violation of the current basis point, evaluated from the
// refined basic values.
template <class Scalar>
double BoundedSimplexT<Scalar>::refined_infeasibility() const {
  using Wide = typename WideOf<Scalar>::type;
  const VectorW xb = refined_basics();
  Wide total = Wide(0);
  for (int r = 0; r < n_rows(); ++r) {
    const int var = basic_[static_cast<std::size_t>(r)];
    const Wide lo = static_cast<Wide>(lo_[var]);
    const Wide hi = static_cast<Wide>(hi_[var]);
    if (xb[r] < lo) total += lo - xb[r];
    if (xb[r] > hi && hi != inf<Wide>()) total += xb[r] - hi;
  }
  return static_cast<double>(total);
}

template <class Scalar>
bool BoundedSimplexT<Scalar>::phase1() {
  const int m = n_rows();
  const int n = n_struct();

  stat_.assign(static_cast<std::size_t>(n_cols()), VStat::at_lo);
  basic_.assign(static_cast<std::size_t>(m), 0);

  // Structurals start at their lower bound. Rows already satisfied there get
  // their logical as the basic variable; violated rows get an artificial
  // carrying the residual.
  Vector activity = Vector::Zero(m);
  for (int j = 0; j < n; ++j)
    if (lo_[j] != Scalar(0)) activity += a_.col(j) * lo_[j];

  for (int r = 0; r < m; ++r) {
    const int logical = n + r;
    const int art = n + m + r;
    if (activity[r] >= lo_[logical] - Scalar(kTol) && activity[r] <= hi_[logical] + Scalar(kTol)) {
      stat_[static_cast<std::size_t>(logical)] = VStat::basic;
      basic_[static_cast<std::size_t>(r)] = logical;
      hi_[art] = 0;  // never needed
      continue;
    }
    hi_[art] = inf<Scalar>();
    const bool below = activity[r] < lo_[logical];
    stat_[static_cast<std::size_t>(logical)] = below ? VStat::at_lo : VStat::at_hi;
    const Scalar residual = nonbasic_value(logical) - activity[r];
    art_sign_[static_cast<std::size_t>(r)] = residual >= Scalar(0) ? Scalar(1) : Scalar(-1);
    stat_[static_cast<std::size_t>(art)] = VStat::basic;
    basic_[static_cast<std::size_t>(r)] = art;
  }
  refactor();
  recompute_basics();

  Vector cost = Vector::Zero(n_cols());
  cost.tail(m).setConstant(Scalar(1));
  const Status st = run(cost, /*phase_one=*/true);
  if (st == Status::iteration_limit) return false;

  // Judge the leftover violation with refined arithmetic; the in-loop xb_
  // is not trustworthy on these instances.
  if (refined_infeasibility() > kInfeasTol) return false;

  // Freeze the artificials.
  hi_.tail(m).setZero();
  return true;
}

// Safe dual bound on the optimum (weak duality): for any multiplier vector
// y, every point of the feasible region satisfies
//   c'x = y'(Ax) + (c - A'y)'x,
// so ranging each term over the row intervals and variable boxes brackets
// the optimum. Holds no matter how noisy the pivoting was; accumulation in
// quad precision.
template <class Scalar>
Scalar BoundedSimplexT<Scalar>::certified_bound(const Vector& objective, bool maximize) const {
  const int m = n_rows();
  const int n = n_struct();

  Vector cost = Vector::Zero(n_cols());
  cost.head(n) = maximize ? (-objective).eval() : objective;
  const VectorW y = refined_duals(cost);

  __float128 bound = 0;
  for (int r = 0; r < m; ++r) {
    const __float128 yl = static_cast<__float128>(y[r]) * static_cast<__float128>(lo_[n + r]);
    const __float128 yh = static_cast<__float128>(y[r]) * static_cast<__float128>(hi_[n + r]);
    bound += yl < yh ? yl : yh;
  }
  for (int j = 0; j < n; ++j) {
    __float128 d = static_cast<__float128>(cost[j]);
    for (int r = 0; r < m; ++r)
      d -= static_cast<__float128>(y[r]) * static_cast<__float128>(a_(r, j));
    const __float128 dl = d * static_cast<__float128>(lo_[j]);
    const __float128 du = d * static_cast<__float128>(hi_[j]);
    bound += dl < du ? dl : du;
  }
  const long double internal_min_bound = static_cast<long double>(bound);
  return static_cast<Scalar>(maximize ? -internal_min_bound : internal_min_bound);
}

template <class Scalar>
typename BoundedSimplexT<Scalar>::Result BoundedSimplexT<Scalar>::solve(const Vector& objective,
                                                                        bool maximize) {
  const int n = n_struct();
  const int m = n_rows();
  if (objective.size() != n) throw std::invalid_argument("BoundedSimplex: objective size mismatch");

  Result res;
  if (!have_basis_) {
    if (!phase1()) {
      res.status = Status::infeasible;
      return res;
    }
    have_basis_ = true;
  } else {
    refactor();
    recompute_basics();
  }

  // Equilibrated variables are xt = x / s, so c'x = (c .* s)' xt.
  Vector scaled_objective = objective.cwiseProduct(col_scale_);
  Vector cost = Vector::Zero(n_cols());
  cost.head(n) = maximize ? (-scaled_objective).eval() : scaled_objective;
  res.status = run(cost, /*phase_one=*/false);
  if (res.status != Status::optimal) return res;

  // Primal report from refined basic values, mapped back to user scale.
  const VectorW xb = refined_basics();
  res.x = Vector::Zero(n);
  for (int j = 0; j < n; ++j)
    if (stat_[static_cast<std::size_t>(j)] != VStat::basic) res.x[j] = nonbasic_value(j);
  for (int r = 0; r < m; ++r) {
    const int var = basic_[static_cast<std::size_t>(r)];
    if (var < n) res.x[var] = static_cast<Scalar>(xb[r]);
  }
  res.x = res.x.cwiseProduct(col_scale_).eval();  // x = s .* xt
  res.objective = objective.dot(res.x);
  res.certified = certified_bound(scaled_objective, maximize);
  return res;
}

template class BoundedSimplexT<double>;
template class BoundedSimplexT<long double>;
template class BoundedSimplexT<__float128>;

}  // namespace pdtf
