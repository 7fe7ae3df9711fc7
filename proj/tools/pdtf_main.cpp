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

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include "pdtf/experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_sweep_command(const std::string& config_path, const std::string& out_override,
                      int threads) {
  pdtf::ExperimentConfig config = pdtf::parse_config_file(config_path);
  const std::string out_path = out_override.empty() ? config.out_path : out_override;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file: " << out_path << "\n";
    return kExitConfigError;
  }
  pdtf::run_sweep(config, out, threads);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_optimize_command(const std::string& config_path, const std::string& scheme_name,
                         double distance, const std::string& dump_lp_path) {
  pdtf::ExperimentConfig config = pdtf::parse_config_file(config_path);
  const pdtf::Scheme scheme = pdtf::scheme_from_name(scheme_name);
  const pdtf::OptimizeResult result = pdtf::optimize_point(config, scheme, distance);
  const pdtf::KeyRateReport& r = result.report;

  std::cout << "scheme " << pdtf::scheme_name(scheme) << " at " << distance << " km\n";
  std::cout << "  mu_laser " << r.params.mu_laser;
  if (pdtf::scheme_detectors(scheme) > 0) {
    std::cout << "  t1 " << r.params.t1 << "  t2 " << r.params.t2;
    for (std::size_t i = 0; i < r.params.cascade_ts.size(); ++i)
      std::cout << "  t" << (3 + i) << " " << r.params.cascade_ts[i];
  }
  std::cout << "\n";
  std::cout << "  rate " << r.rate << "  i_ae " << r.i_ae << "  q_mu " << r.q_mu << "  er_mu "
            << r.er_mu << "\n";
  if (!r.feasible) std::cout << "  diagnostic: " << r.diagnostic << "\n";
  if (result.all_nonpositive) std::cout << "  note: no parameter point achieved a positive rate\n";

  if (!dump_lp_path.empty()) {
    const auto lp = pdtf::build_point_lp(config, scheme, distance, r.params);
    if (lp) {
      std::ofstream dump(dump_lp_path);
      if (!dump) {
        std::cerr << "error: cannot open " << dump_lp_path << "\n";
        return kExitConfigError;
      }
      pdtf::dump_lp(*lp, dump);
      std::cout << "  wrote LP dump to " << dump_lp_path << "\n";
    } else {
      std::cout << "  (scheme has no yield LP to dump)\n";
    }
  }
  return r.feasible ? 0 : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"passive-decoy twin-field QKD key-rate simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string scheme_name;
  std::string dump_lp_path;
  double distance = 0.0;
  int threads = default_threads();
  bool seedless = false;

  auto* sweep = app.add_subcommand("sweep", "run the configured distance sweep and emit CSV");
  sweep->add_option("config", config_path, "configuration file")->required();
  sweep->add_option("--out", out_path, "output CSV path (overrides output.path)");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_flag("--seedless", seedless,
                  "assert that no randomness is involved (all computation is deterministic)");

  auto* validate = app.add_subcommand("validate", "run the oracle/property cross-check report");
  validate->add_option("--out", out_path, "write the report to a file instead of stdout");

  auto* optimize = app.add_subcommand("optimize", "optimize one scheme at one distance");
  optimize->add_option("config", config_path, "configuration file")->required();
  optimize->add_option("--scheme", scheme_name, "scheme name")->required();
  optimize->add_option("--distance", distance, "distance in km")->required();
  optimize->add_option("--dump-lp", dump_lp_path, "write the point's yield LP in tabular form");
  optimize->add_option("--threads", threads, "worker threads");
  optimize->add_flag("--seedless", seedless,
                     "assert that no randomness is involved (all computation is deterministic)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_sweep_command(config_path, out_path, threads);
    if (validate->parsed()) {
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
          std::cerr << "error: cannot open " << out_path << "\n";
          return kExitConfigError;
        }
        return pdtf::validation_report(out) == 0 ? 0 : 1;
      }
      return pdtf::validation_report(std::cout) == 0 ? 0 : 1;
    }
    if (optimize->parsed())
      return run_optimize_command(config_path, scheme_name, distance, dump_lp_path);
  } catch (const pdtf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return 0;
}
