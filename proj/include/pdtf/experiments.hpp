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

#ifndef PDTF_EXPERIMENTS_HPP_
#define PDTF_EXPERIMENTS_HPP_

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdtf/channel.hpp"
#include "pdtf/decoy_lp.hpp"
#include "pdtf/keyrate.hpp"

namespace pdtf {

enum class Scheme { passive2, passive4, passive8, active2, active4, infinite, plob };

/// Canonical emission order of the schemes.
inline constexpr std::array<Scheme, 7> kAllSchemes = {
    Scheme::passive2, Scheme::passive4, Scheme::passive8, Scheme::active2,
    Scheme::active4,  Scheme::infinite, Scheme::plob};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Number of local detectors in a passive scheme's cascade, 0 otherwise.
int scheme_detectors(Scheme s);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
  std::vector<double> values() const;
  double step() const { return points > 1 ? (hi - lo) / (points - 1) : 0.0; }
};

struct ExperimentConfig {
  ChannelSpec channel;       // distance_km filled per evaluation
  DetectorSpec local_det;    // the parties' cascade detectors
  double extinction_db = 20.0;

  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<double> distances_km;

  GridRange mu{0.02, 0.6, 15};
  GridRange t1{0.3, 0.95, 8};
  GridRange t2{0.3, 0.95, 8};
  GridRange cascade{0.55, 0.95, 5};
  int infinite_mu_points = 127;

  int n_cut = 10;
  GainSelection four_gains = GainSelection::paper_four;
  GainSelection eight_gains = GainSelection::default_eight;
  Y2Weights y2_weights;
  int series_cut = 20;

  std::vector<double> active2_intensities{0.0, 0.1};
  std::vector<double> active4_intensities{0.0, 0.02, 0.1, 0.3};
  bool plob_include_det_eff = true;

  std::string out_path = "sweep.csv";
  double rate_floor = 1e-12;
  int precision = 10;

  void validate() const;
};

ExperimentConfig default_config();
/// Flat key=value text, '#' comments, unknown keys rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// One point in a scheme's parameter space. Active and infinite schemes use
/// mu_laser directly as the code intensity and ignore the rest.
struct PointParams {
  double mu_laser = 0.0;
  double t1 = 0.5;
  double t2 = 0.5;
  std::vector<double> cascade_ts;
};

struct KeyRateReport {
  Scheme scheme = Scheme::plob;
  double distance_km = 0.0;
  PointParams params;
  double mu_code = 0.0;
  double rate = 0.0;
  double i_ae = 0.0;
  double q_mu = 0.0;
  double er_mu = 0.0;
  LeakageCaps caps;
  YieldBounds yields;
  double lp_gap_y11 = 0.0;  // Y11 upper bound minus the channel's true Y11
  bool feasible = true;
  std::string diagnostic;
};

/// Full pipeline at one parameter point: source statistics, observables,
/// yield LP, leakage caps, key rate. Deterministic.
KeyRateReport evaluate_point(const ExperimentConfig& config, Scheme scheme, double distance_km,
                             const PointParams& params);

struct OptimizeResult {
  PointParams params;
  KeyRateReport report;
  bool all_nonpositive = false;
};

/// Coarse grid search plus one half-step local refinement; ties break toward
/// smaller mu_laser, then smaller t1. Deterministic.
OptimizeResult optimize_point(const ExperimentConfig& config, Scheme scheme, double distance_km);

/// Writes the scheme-major, distance-ascending sweep CSV.
void run_sweep(const ExperimentConfig& config, std::ostream& csv, int threads = 1);

/// The yield LP a finite-decoy scheme solves at one point, for external
/// inspection; nullopt for schemes without one (infinite, plob).
std::optional<LinearProgram> build_point_lp(const ExperimentConfig& config, Scheme scheme,
                                            double distance_km, const PointParams& params);

/// Cross-check report (oracle equivalence, conditioning identities, LP
/// soundness spot checks, leakage solver agreement, modulator-leakage
/// discrepancy note). Returns the number of failed checks.
int validation_report(std::ostream& os);

}  // namespace pdtf

#endif  // PDTF_EXPERIMENTS_HPP_
