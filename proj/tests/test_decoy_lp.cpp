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

#include <cmath>
#include <sstream>

#include "pdtf/decoy_lp.hpp"
#include "pdtf/fock_optics.hpp"

using namespace pdtf;

namespace {

ChannelSpec table_channel(double distance_km) {
  ChannelSpec ch;
  ch.distance_km = distance_km;
  return ch;
}

DecoyModeFamily passive_family(double mu_laser, int n_detectors, int n_cut) {
  SourceOptics optics;
  optics.mu_laser = mu_laser;
  optics.t1 = 0.5;
  optics.t2 = 0.5;
  optics.cascade_ts = {0.7, 0.6};
  const DetectorSpec det{0.2, 1e-7};
  return build_decoy_family(optics, det, n_detectors, n_cut);
}

LinearProgram honest_lp(double distance_km, int n_detectors, GainSelection selection,
                        int n_cut = 10) {
  const DecoyModeFamily family = passive_family(0.1, n_detectors, n_cut);
  const ChannelSpec ch = table_channel(distance_km);
  const auto pairs = select_gain_pairs(n_detectors, selection);
  const DecoyObservables obs = decoy_gains(family, family, pairs, ch, 0.025, n_cut);
  return build_constraints(family, family, obs, n_cut);
}

}  // namespace

TEST_CASE("bounded simplex on hand-checkable programs") {
  SUBCASE("single variable, single range") {
    Eigen::MatrixXd a(1, 1);
    a << 1.0;
    BoundedSimplex solver(a, Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(1, 0.5),
                          Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    Eigen::VectorXd c(1);
    c << 1.0;
    const auto up = solver.solve(c, true);
    REQUIRE(up.status == BoundedSimplex::Status::optimal);
    CHECK(up.objective == doctest::Approx(0.5).epsilon(1e-12));
    const auto lo = solver.solve(c, false);
    CHECK(lo.objective == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("two variables, a shared budget") {
    // max x + 2y st x + y <= 1, boxes [0,1]: optimum (0,1) value 2.
    Eigen::MatrixXd a(1, 2);
    a << 1.0, 1.0;
    BoundedSimplex solver(a, Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0),
                          Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
    Eigen::VectorXd c(2);
    c << 1.0, 2.0;
    const auto res = solver.solve(c, true);
    REQUIRE(res.status == BoundedSimplex::Status::optimal);
    CHECK(res.objective == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.x[0] == doctest::Approx(0.0));
    CHECK(res.x[1] == doctest::Approx(1.0));
  }
  SUBCASE("infeasible ranges are detected") {
    // x >= 2 with x in [0,1].
    Eigen::MatrixXd a(1, 1);
    a << 1.0;
    BoundedSimplex solver(a, Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 3.0),
                          Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    Eigen::VectorXd c(1);
    c << 1.0;
    CHECK(solver.solve(c, true).status == BoundedSimplex::Status::infeasible);
  }
  SUBCASE("conflicting equalities are infeasible") {
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 1.0;
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.2, 0.6;
    hi << 0.2, 0.6;
    BoundedSimplex solver(a, lo, hi, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    Eigen::VectorXd c(1);
    c << 1.0;
    CHECK(solver.solve(c, true).status == BoundedSimplex::Status::infeasible);
  }
  SUBCASE("degenerate ranged system with equalities") {
    // x + y = 0.5 exactly, y - x in [0, 0.1]; max x -> x = 0.25, min -> 0.2.
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 1.0, -1.0, 1.0;
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.5, 0.0;
    hi << 0.5, 0.1;
    BoundedSimplex solver(a, lo, hi, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
    Eigen::VectorXd c(2);
    c << 1.0, 0.0;
    const auto up = solver.solve(c, true);
    REQUIRE(up.status == BoundedSimplex::Status::optimal);
    CHECK(up.objective == doctest::Approx(0.25).epsilon(1e-10));
    const auto lo_res = solver.solve(c, false);
    CHECK(lo_res.objective == doctest::Approx(0.2).epsilon(1e-10));
  }
}

TEST_CASE("constraint assembly") {
  SUBCASE("pattern-pair counts per setup") {
    CHECK(select_gain_pairs(1, GainSelection::all_pairs).size() == 4);
    CHECK(select_gain_pairs(2, GainSelection::paper_four).size() == 10);
    CHECK(select_gain_pairs(2, GainSelection::all_pairs).size() == 16);
    CHECK(select_gain_pairs(3, GainSelection::default_eight).size() == 22);
    CHECK(select_gain_pairs(3, GainSelection::all_pairs).size() == 64);
  }
  SUBCASE("rows carry the distribution products and the tail slack") {
    const LinearProgram lp = honest_lp(100.0, 1, GainSelection::all_pairs);
    CHECK(lp.rows.rows() == 4);
    for (Eigen::Index r = 0; r < lp.rows.rows(); ++r) {
      CHECK(lp.lower[r] <= lp.upper[r]);
      CHECK(lp.lower[r] >= 0.0);
      CHECK((lp.rows.row(r).array() >= 0.0).all());
      CHECK(lp.rows.row(r).sum() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("point-mass distributions pin a yield") {
    DecoyModeFamily family;
    family.n_detectors = 1;
    family.patterns = {ModePattern::from_string("0")};
    family.mode_prob = {1.0};
    family.conditional = {PhotonPmf::point_mass(0, 10)};
    const ChannelSpec ch = table_channel(100.0);
    const auto pairs = std::vector<std::pair<ModePattern, ModePattern>>{
        {family.patterns[0], family.patterns[0]}};
    const DecoyObservables obs = decoy_gains(family, family, pairs, ch, 0.02, 10);
    const LinearProgram lp = build_constraints(family, family, obs, 10);
    const auto up = bound_yield(lp, {0, 0}, true);
    const auto lo = bound_yield(lp, {0, 0}, false);
    REQUIRE(up.feasible);
    CHECK(up.value == doctest::Approx(yield_nm(0, 0, ch)).epsilon(1e-9));
    CHECK(lo.value == doctest::Approx(up.value).epsilon(1e-9));
  }
}

TEST_CASE("yield bounds on honest data") {
  SUBCASE("box bound without constraints") {
    LinearProgram lp;
    lp.n_cut = 3;
    lp.rows = Eigen::MatrixXd::Zero(0, lp.n_vars());
    lp.lower = Eigen::VectorXd::Zero(0);
    lp.upper = Eigen::VectorXd::Zero(0);
    const auto up = bound_yield(lp, {1, 1}, true);
    REQUIRE(up.feasible);
    CHECK(up.value == doctest::Approx(1.0));
    CHECK(bound_yield(lp, {1, 1}, false).value == doctest::Approx(0.0));
  }

  SUBCASE("soundness and tightening across setups and distances") {
    for (double distance : {0.0, 100.0, 200.0, 300.0}) {
      const ChannelSpec ch = table_channel(distance);
      const LinearProgram lp2 = honest_lp(distance, 1, GainSelection::all_pairs);
      const LinearProgram lp4 = honest_lp(distance, 2, GainSelection::paper_four);
      const auto b2 = solve_yield_bounds(lp2, {}, true);
      const auto b4 = solve_yield_bounds(lp4, {}, true);
      REQUIRE(b2.has_value());
      REQUIRE(b4.has_value());
      for (const auto& key : kBoundedYields) {
        const double truth = yield_nm(key.first, key.second, ch);
        CHECK(b2->upper.at(key) >= truth - 1e-9);
        CHECK(b2->lower.at(key) <= truth + 1e-9);
        CHECK(b4->upper.at(key) >= truth - 1e-9);
        CHECK(b4->lower.at(key) <= truth + 1e-9);
      }
    }
  }

  SUBCASE("regression pin: the two-intensity Y11 gap at 100 km") {
    const ChannelSpec ch = table_channel(100.0);
    const LinearProgram lp = honest_lp(100.0, 1, GainSelection::all_pairs);
    const auto up = bound_yield(lp, {1, 1}, true);
    REQUIRE(up.feasible);
    CHECK(up.value >= yield_nm(1, 1, ch) - 1e-9);
  }
}

TEST_CASE("solver behaviour") {
  SUBCASE("determinism across repeated solves") {
    const LinearProgram lp = honest_lp(150.0, 2, GainSelection::paper_four);
    const auto a = bound_yield(lp, {1, 1}, true);
    const auto b = bound_yield(lp, {1, 1}, true);
    CHECK(a.value == b.value);
  }
  SUBCASE("scale invariance of the optimum") {
    LinearProgram lp = honest_lp(150.0, 1, GainSelection::all_pairs);
    const auto base = bound_yield(lp, {0, 1}, true);
    lp.rows *= 3.5;
    lp.lower *= 3.5;
    lp.upper *= 3.5;
    const auto scaled = bound_yield(lp, {0, 1}, true);
    REQUIRE(base.feasible);
    REQUIRE(scaled.feasible);
    CHECK(scaled.value == doctest::Approx(base.value).epsilon(1e-9));
  }
  SUBCASE("adding constraints never loosens a bound") {
    const std::vector<double> single = {0.1};
    const std::vector<double> both = {0.0, 0.1};
    const ChannelSpec ch = table_channel(120.0);
    const auto dist1 = active_decoy_distributions(single, 10);
    const auto dist2 = active_decoy_distributions(both, 10);

    const auto mk = [&](const std::map<ModePattern, PhotonPmf>& dists) {
      std::vector<std::pair<ModePattern, ModePattern>> pairs;
      for (const auto& [pa, _] : dists)
        for (const auto& [pb, __] : dists) pairs.emplace_back(pa, pb);
      DecoyModeFamily family;
      family.n_detectors = static_cast<int>(dists.size());
      for (const auto& [p, pmf] : dists) {
        family.patterns.push_back(p);
        family.mode_prob.push_back(1.0);
        family.conditional.push_back(pmf);
      }
      const DecoyObservables obs = decoy_gains(family, family, pairs, ch, 0.05, 10);
      return build_constraints(family, family, obs, 10);
    };
    // Ensure nesting: the single-intensity pair set is a subset of the pair
    // set of {0, 0.1} (the 0.1/0.1 pair appears in both).
    const auto upper1 = bound_yield(mk(dist1), {1, 1}, true);
    const auto upper2 = bound_yield(mk(dist2), {1, 1}, true);
    REQUIRE(upper1.feasible);
    REQUIRE(upper2.feasible);
    CHECK(upper2.value <= upper1.value + 1e-9);
  }
}

TEST_CASE("active decoy distributions and the perfect reference") {
  SUBCASE("construction") {
    const auto dists = active_decoy_distributions({0.01, 0.1}, 8);
    CHECK(dists.size() == 2);
    for (const auto& [pattern, pmf] : dists) {
      CHECK(pattern.size == 2);
      CHECK(std::abs(pmf.total() - 1.0) < 1e-12);
    }
  }
  SUBCASE("vacuum row pins the dark yield region") {
    const auto dists = active_decoy_distributions({0.0}, 8);
    const PhotonPmf& vac = dists.begin()->second;
    CHECK(vac.probs[0] == 1.0);
    CHECK(vac.tail == 0.0);
  }
  SUBCASE("duplicates are rejected") {
    CHECK_THROWS_AS(active_decoy_distributions({0.1, 0.1}, 8), std::invalid_argument);
    CHECK_THROWS_AS(active_decoy_distributions({-0.1}, 8), std::domain_error);
  }
  SUBCASE("infinite-decoy reference is tight and dominated") {
    const ChannelSpec ch = table_channel(100.0);
    const YieldBounds inf = infinite_decoy_bounds(ch, {});
    for (const auto& key : kBoundedYields) {
      CHECK(inf.upper.at(key) == inf.lower.at(key));
      CHECK(inf.upper.at(key) == doctest::Approx(yield_nm(key.first, key.second, ch)));
    }
    const auto finite = solve_yield_bounds(honest_lp(100.0, 1, GainSelection::all_pairs), {}, true);
    REQUIRE(finite.has_value());
    for (const auto& key : kBoundedYields) {
      CHECK(finite->upper.at(key) >= inf.upper.at(key) - 1e-9);
      CHECK(finite->lower.at(key) <= inf.lower.at(key) + 1e-9);
    }
  }
}

TEST_CASE("LP dump is readable text") {
  const LinearProgram lp = honest_lp(100.0, 1, GainSelection::all_pairs);
  std::ostringstream ss;
  dump_lp(lp, ss);
  const std::string text = ss.str();
  CHECK(text.find("variables 121") != std::string::npos);
  CHECK(text.find("constraints 4") != std::string::npos);
  CHECK(text.find("Y[0,0]") != std::string::npos);
}
