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

#include "pdtf/decoy_lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pdtf/fock_optics.hpp"

namespace pdtf {

namespace {

// Shared row assembly once per-pattern distributions are resolved.
struct RowSource {
  const PhotonPmf* dist_a;
  const PhotonPmf* dist_b;
  GainValue gain;
  std::string label;
};

LinearProgram assemble(const std::vector<RowSource>& sources, int n_cut) {
  LinearProgram lp;
  lp.n_cut = n_cut;
  const int n_vars = lp.n_vars();
  lp.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sources.size()), n_vars);
  lp.lower.resize(static_cast<Eigen::Index>(sources.size()));
  lp.upper.resize(static_cast<Eigen::Index>(sources.size()));

  for (std::size_t r = 0; r < sources.size(); ++r) {
    const PhotonPmf& da = *sources[r].dist_a;
    const PhotonPmf& db = *sources[r].dist_b;
    const int ka = std::min(n_cut, da.n_cut());
    const int kb = std::min(n_cut, db.n_cut());
    for (int n = 0; n <= ka; ++n) {
      const double wa = da.probs[n];
      if (wa == 0.0) continue;
      for (int m = 0; m <= kb; ++m) {
        lp.rows(static_cast<Eigen::Index>(r), lp.var_index(n, m)) = wa * db.probs[m];
      }
    }
    const double tau = 1.0 - (1.0 - da.tail) * (1.0 - db.tail);
    const double q = sources[r].gain.value;
    lp.lower[static_cast<Eigen::Index>(r)] = std::max(0.0, q - tau);
    lp.upper[static_cast<Eigen::Index>(r)] = std::min(1.0, q);
    lp.row_labels.push_back(sources[r].label);
  }
  return lp;
}

Eigen::VectorXd unit_objective(const LinearProgram& lp, std::pair<int, int> target) {
  if (target.first < 0 || target.first > lp.n_cut || target.second < 0 || target.second > lp.n_cut)
    throw std::invalid_argument("bound_yield: target outside variable range");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(lp.n_vars());
  c[lp.var_index(target.first, target.second)] = 1.0;
  return c;
}

Eigen::VectorXd y2_objective(const LinearProgram& lp, const Y2Weights& w) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(lp.n_vars());
  c[lp.var_index(2, 0)] = w.w20;
  c[lp.var_index(1, 1)] = w.w11;
  c[lp.var_index(0, 2)] = w.w02;
  return c;
}

// Warm-startable certified solver pair. Bounds are taken from the safe dual
// certificate; when the double-precision certificate is more than kCertGap
// away from its own vertex value (ill-conditioned basis), the solve is
// escalated to the long double instantiation.
class CertifiedYieldSolver {
 public:
  explicit CertifiedYieldSolver(const LinearProgram& lp)
      : lp_(lp),
        fast_(lp.rows, lp.lower, lp.upper, Eigen::VectorXd::Zero(lp.n_vars()),
              Eigen::VectorXd::Ones(lp.n_vars())) {}

  BoundResult bound(const Eigen::VectorXd& objective, bool maximize) {
    const auto res = fast_.solve(objective, maximize);
    if (res.status == BoundedSimplex::Status::optimal &&
        std::abs(res.certified - res.objective) <= kCertGap) {
      return {true, res.certified};
    }
    // Loose certificate or a (possibly spurious) infeasibility verdict:
    // escalate to the long double instantiation.
    if (!slow_) {
      slow_.emplace(lp_.rows.cast<long double>().eval(), lp_.lower.cast<long double>().eval(),
                    lp_.upper.cast<long double>().eval(),
                    BoundedSimplexT<long double>::Vector::Zero(lp_.n_vars()).eval(),
                    BoundedSimplexT<long double>::Vector::Ones(lp_.n_vars()).eval());
    }
    const auto refined = slow_->solve(objective.cast<long double>(), maximize);
    if (refined.status != BoundedSimplexT<long double>::Status::optimal) return {false, 0.0};
    return {true, static_cast<double>(refined.certified)};
  }

 private:
  static constexpr double kCertGap = 1e-9;
  const LinearProgram& lp_;
  BoundedSimplex fast_;
  std::optional<BoundedSimplexT<long double>> slow_;
};

}  // namespace

std::vector<std::pair<ModePattern, ModePattern>> select_gain_pairs(int n_detectors,
                                                                   GainSelection selection) {
  if (n_detectors < 1 || n_detectors > 8)
    throw std::invalid_argument("select_gain_pairs: unsupported detector count");
  const std::uint32_t n_patterns = 1u << n_detectors;
  std::vector<std::pair<ModePattern, ModePattern>> pairs;

  const auto pat = [&](std::uint32_t bits) { return ModePattern(bits, n_detectors); };

  switch (selection) {
    case GainSelection::all_pairs:
      for (std::uint32_t i = 0; i < n_patterns; ++i)
        for (std::uint32_t j = 0; j < n_patterns; ++j) pairs.emplace_back(pat(i), pat(j));
      break;
    case GainSelection::paper_four: {
      if (n_detectors != 2)
        throw std::invalid_argument("select_gain_pairs: paper_four needs two detectors");
      // Mode order 1..4 = 00, 10, 01, 11; the published ten-gain list.
      const std::array<std::uint32_t, 4> mode = {0b00, 0b01, 0b10, 0b11};
      const auto add = [&](int i, int j) {
        pairs.emplace_back(pat(mode[static_cast<std::size_t>(i - 1)]),
                           pat(mode[static_cast<std::size_t>(j - 1)]));
      };
      add(4, 4);
      add(1, 4);
      add(2, 4);
      add(3, 4);
      add(4, 1);
      add(4, 2);
      add(4, 3);
      add(1, 1);
      add(2, 2);
      add(3, 3);
      break;
    }
    case GainSelection::default_eight:
      for (std::uint32_t i = 0; i < n_patterns; ++i) pairs.emplace_back(pat(i), pat(i));
      for (std::uint32_t i = 1; i < n_patterns; ++i) {
        pairs.emplace_back(pat(i), pat(0));
        pairs.emplace_back(pat(0), pat(i));
      }
      break;
  }
  return pairs;
}

LinearProgram build_constraints(const DecoyModeFamily& alice, const DecoyModeFamily& bob,
                                const DecoyObservables& gains, int n_cut) {
  std::vector<RowSource> sources;
  sources.reserve(gains.decoy_gains.size());
  for (const auto& [key, gain] : gains.decoy_gains) {
    const int ia = alice.find(key.first);
    const int ib = bob.find(key.second);
    if (ia < 0 || ib < 0)
      throw std::invalid_argument("build_constraints: gain pattern missing from distributions");
    sources.push_back({&alice.conditional[static_cast<std::size_t>(ia)],
                       &bob.conditional[static_cast<std::size_t>(ib)], gain,
                       key.first.str() + "|" + key.second.str()});
  }
  return assemble(sources, n_cut);
}

LinearProgram build_constraints(const std::map<ModePattern, PhotonPmf>& alice,
                                const std::map<ModePattern, PhotonPmf>& bob,
                                const DecoyObservables& gains, int n_cut) {
  std::vector<RowSource> sources;
  sources.reserve(gains.decoy_gains.size());
  for (const auto& [key, gain] : gains.decoy_gains) {
    const auto ia = alice.find(key.first);
    const auto ib = bob.find(key.second);
    if (ia == alice.end() || ib == bob.end())
      throw std::invalid_argument("build_constraints: gain pattern missing from distributions");
    sources.push_back(
        {&ia->second, &ib->second, gain, key.first.str() + "|" + key.second.str()});
  }
  return assemble(sources, n_cut);
}

BoundResult bound_yield(const LinearProgram& lp, std::pair<int, int> target, bool maximize) {
  CertifiedYieldSolver solver(lp);
  return solver.bound(unit_objective(lp, target), maximize);
}

BoundResult bound_yield_y2(const LinearProgram& lp, const Y2Weights& weights, bool maximize) {
  CertifiedYieldSolver solver(lp);
  return solver.bound(y2_objective(lp, weights), maximize);
}

std::optional<YieldBounds> solve_yield_bounds(const LinearProgram& lp, const Y2Weights& weights,
                                              bool need_lower) {
  CertifiedYieldSolver solver(lp);
  YieldBounds bounds;
  for (const auto& key : kBoundedYields) {
    const auto up = solver.bound(unit_objective(lp, key), /*maximize=*/true);
    if (!up.feasible) return std::nullopt;
    bounds.upper[key] = std::clamp(up.value, 0.0, 1.0);
    if (need_lower) {
      const auto lo = solver.bound(unit_objective(lp, key), /*maximize=*/false);
      if (!lo.feasible) return std::nullopt;
      bounds.lower[key] = std::clamp(lo.value, 0.0, bounds.upper[key]);
    } else {
      bounds.lower[key] = 0.0;
    }
  }
  const auto y2 = solver.bound(y2_objective(lp, weights), /*maximize=*/true);
  if (!y2.feasible) return std::nullopt;
  bounds.y2_upper = std::clamp(y2.value, 0.0, 1.0);
  return bounds;
}

std::map<ModePattern, PhotonPmf> active_decoy_distributions(const std::vector<double>& intensities,
                                                            int n_cut) {
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    if (intensities[i] < 0.0)
      throw std::domain_error("active_decoy_distributions: negative intensity");
    for (std::size_t j = i + 1; j < intensities.size(); ++j) {
      if (intensities[i] == intensities[j])
        throw std::invalid_argument("active_decoy_distributions: duplicate intensity");
    }
  }
  const int n = static_cast<int>(intensities.size());
  std::map<ModePattern, PhotonPmf> dists;
  for (int i = 0; i < n; ++i)
    dists[ModePattern(1u << i, n)] = poisson_pmf(intensities[static_cast<std::size_t>(i)], n_cut);
  return dists;
}

YieldBounds infinite_decoy_bounds(const ChannelSpec& ch, const Y2Weights& weights) {
  YieldBounds bounds;
  for (const auto& key : kBoundedYields) {
    const double y = yield_nm(key.first, key.second, ch);
    bounds.upper[key] = y;
    bounds.lower[key] = y;
  }
  bounds.y2_upper = weights.w20 * yield_nm(2, 0, ch) + weights.w11 * yield_nm(1, 1, ch) +
                    weights.w02 * yield_nm(0, 2, ch);
  return bounds;
}

void dump_lp(const LinearProgram& lp, std::ostream& os) {
  os << "variables " << lp.n_vars() << " (Y_{n,m}, n,m = 0.." << lp.n_cut << ", box [0,1])\n";
  os << "constraints " << lp.rows.rows() << "\n";
  for (Eigen::Index r = 0; r < lp.rows.rows(); ++r) {
    os << (r < static_cast<Eigen::Index>(lp.row_labels.size()) ? lp.row_labels[static_cast<std::size_t>(r)]
                                                               : std::string("row"))
       << "  lo=" << lp.lower[r] << "  hi=" << lp.upper[r] << "\n";
    for (int n = 0; n <= lp.n_cut; ++n) {
      for (int m = 0; m <= lp.n_cut; ++m) {
        const double c = lp.rows(r, lp.var_index(n, m));
        if (c != 0.0) os << "  Y[" << n << "," << m << "] " << c << "\n";
      }
    }
  }
}

}  // namespace pdtf
