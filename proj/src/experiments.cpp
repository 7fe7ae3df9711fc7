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

#include "pdtf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "pdtf/fock_optics.hpp"
#include "pdtf/math_util.hpp"

namespace pdtf {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::passive2: return "passive2";
    case Scheme::passive4: return "passive4";
    case Scheme::passive8: return "passive8";
    case Scheme::active2: return "active2";
    case Scheme::active4: return "active4";
    case Scheme::infinite: return "infinite";
    case Scheme::plob: return "plob";
  }
  return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : kAllSchemes)
    if (scheme_name(s) == name) return s;
  throw ConfigError("unknown scheme: " + name);
}

int scheme_detectors(Scheme s) {
  switch (s) {
    case Scheme::passive2: return 1;
    case Scheme::passive4: return 2;
    case Scheme::passive8: return 3;
    default: return 0;
  }
}

std::vector<double> GridRange::values() const {
  std::vector<double> v;
  if (points <= 1) {
    v.push_back(lo);
    return v;
  }
  v.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v.push_back(lo + (hi - lo) * i / (points - 1));
  return v;
}

void ExperimentConfig::validate() const {
  channel.validate();
  local_det.validate();
  if (extinction_db <= 0.0) throw ConfigError("optics.extinction_db must be positive");
  if (schemes.empty()) throw ConfigError("schemes must not be empty");
  for (double d : distances_km)
    if (d < 0.0) throw ConfigError("distances_km must be nonnegative");
  if (mu.lo < 0.0 || mu.hi < mu.lo || mu.points < 1) throw ConfigError("bad optimizer.mu range");
  const auto check_t = [](const GridRange& g, const char* name, double lo, double hi) {
    if (!(g.lo > lo && g.hi < hi && g.hi >= g.lo && g.points >= 1))
      throw ConfigError(std::string("bad optimizer range for ") + name);
  };
  check_t(t1, "t1", 0.0, 1.0);
  check_t(t2, "t2", 0.0, 1.0);
  check_t(cascade, "cascade", 0.5, 1.0);  // strictly inside (0.5, 1)
  if (infinite_mu_points < 2) throw ConfigError("optimizer.infinite_mu_points must be >= 2");
  if (n_cut < 2) throw ConfigError("lp.n_cut must be >= 2");
  if (series_cut < n_cut) throw ConfigError("leakage.series_cut must be >= lp.n_cut");
  if (active2_intensities.size() != 2) throw ConfigError("optics.active2.intensities needs 2 entries");
  if (active4_intensities.size() != 4) throw ConfigError("optics.active4.intensities needs 4 entries");
  if (rate_floor <= 0.0) throw ConfigError("output.rate_floor must be positive");
  if (precision < 1 || precision > 17) throw ConfigError("output.precision must be in 1..17");
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  for (int d = 0; d <= 400; d += 20) config.distances_km.push_back(d);
  return config;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw ConfigError("expected integer for " + key);
  return i;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, trim(item)));
  return out;
}

// "a:b:step" ranges or plain comma lists.
std::vector<double> parse_distances(const std::string& value) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) return parse_double_list("distances_km", value);
  const auto parts = split_list(value);
  if (parts.size() != 1) throw ConfigError("distances_km: mix of ranges and lists not supported");
  std::vector<std::string> fields;
  std::string cur;
  for (char c : value) {
    if (c == ':') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 3) throw ConfigError("distances_km range must be start:stop:step");
  const double start = parse_double("distances_km", trim(fields[0]));
  const double stop = parse_double("distances_km", trim(fields[1]));
  const double step = parse_double("distances_km", trim(fields[2]));
  if (step <= 0.0) throw ConfigError("distances_km step must be positive");
  std::vector<double> out;
  for (double d = start; d <= stop + 1e-9; d += step) out.push_back(d);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config = default_config();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "channel.loss_db_per_km") {
      config.channel.loss_db_per_km = parse_double(key, value);
    } else if (key == "channel.e_d") {
      config.channel.e_d = parse_double(key, value);
    } else if (key == "channel.f_ec") {
      config.channel.f_ec = parse_double(key, value);
    } else if (key == "channel.charlie.eta") {
      config.channel.charlie_det.eta = parse_double(key, value);
    } else if (key == "channel.charlie.dark") {
      config.channel.charlie_det.dark = parse_double(key, value);
    } else if (key == "optics.detector.eta") {
      config.local_det.eta = parse_double(key, value);
    } else if (key == "optics.detector.dark") {
      config.local_det.dark = parse_double(key, value);
    } else if (key == "optics.extinction_db") {
      config.extinction_db = parse_double(key, value);
    } else if (key == "optics.active2.intensities") {
      config.active2_intensities = parse_double_list(key, value);
    } else if (key == "optics.active4.intensities") {
      config.active4_intensities = parse_double_list(key, value);
    } else if (key == "schemes") {
      config.schemes.clear();
      for (const auto& name : split_list(value)) config.schemes.push_back(scheme_from_name(trim(name)));
    } else if (key == "distances_km") {
      config.distances_km = parse_distances(value);
    } else if (key == "optimizer.mu.min") {
      config.mu.lo = parse_double(key, value);
    } else if (key == "optimizer.mu.max") {
      config.mu.hi = parse_double(key, value);
    } else if (key == "optimizer.mu.points") {
      config.mu.points = parse_int(key, value);
    } else if (key == "optimizer.t1.min") {
      config.t1.lo = parse_double(key, value);
    } else if (key == "optimizer.t1.max") {
      config.t1.hi = parse_double(key, value);
    } else if (key == "optimizer.t1.points") {
      config.t1.points = parse_int(key, value);
    } else if (key == "optimizer.t2.min") {
      config.t2.lo = parse_double(key, value);
    } else if (key == "optimizer.t2.max") {
      config.t2.hi = parse_double(key, value);
    } else if (key == "optimizer.t2.points") {
      config.t2.points = parse_int(key, value);
    } else if (key == "optimizer.cascade.min") {
      config.cascade.lo = parse_double(key, value);
    } else if (key == "optimizer.cascade.max") {
      config.cascade.hi = parse_double(key, value);
    } else if (key == "optimizer.cascade.points") {
      config.cascade.points = parse_int(key, value);
    } else if (key == "optimizer.infinite_mu_points") {
      config.infinite_mu_points = parse_int(key, value);
    } else if (key == "lp.n_cut") {
      config.n_cut = parse_int(key, value);
    } else if (key == "lp.four_intensity_gains") {
      if (value == "paper10") {
        config.four_gains = GainSelection::paper_four;
      } else if (value == "all") {
        config.four_gains = GainSelection::all_pairs;
      } else {
        throw ConfigError("lp.four_intensity_gains must be paper10 or all");
      }
    } else if (key == "lp.eight_intensity_gains") {
      if (value == "default22") {
        config.eight_gains = GainSelection::default_eight;
      } else if (value == "all") {
        config.eight_gains = GainSelection::all_pairs;
      } else {
        throw ConfigError("lp.eight_intensity_gains must be default22 or all");
      }
    } else if (key == "lp.y2_weights") {
      const auto w = parse_double_list(key, value);
      if (w.size() != 3) throw ConfigError("lp.y2_weights needs 3 entries");
      config.y2_weights = {w[0], w[1], w[2]};
    } else if (key == "leakage.series_cut") {
      config.series_cut = parse_int(key, value);
    } else if (key == "output.path") {
      config.out_path = value;
    } else if (key == "output.rate_floor") {
      config.rate_floor = parse_double(key, value);
    } else if (key == "output.precision") {
      config.precision = parse_int(key, value);
    } else {
      throw ConfigError("unknown configuration key: " + key);
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

namespace {

ChannelSpec channel_at(const ExperimentConfig& config, double distance_km) {
  ChannelSpec ch = config.channel;
  ch.distance_km = distance_km;
  return ch;
}

SourceOptics optics_for(const ExperimentConfig& config, const PointParams& params,
                        int n_detectors) {
  SourceOptics optics;
  optics.mu_laser = params.mu_laser;
  optics.t1 = params.t1;
  optics.t2 = params.t2;
  optics.cascade_ts.assign(params.cascade_ts.begin(), params.cascade_ts.end());
  optics.cascade_ts.resize(static_cast<std::size_t>(std::max(0, n_detectors - 1)),
                           0.5 * (config.cascade.lo + config.cascade.hi));
  optics.extinction_db = config.extinction_db;
  return optics;
}

GainSelection passive_selection(const ExperimentConfig& config, int n_detectors) {
  if (n_detectors == 2) return config.four_gains;
  if (n_detectors == 3) return config.eight_gains;
  return GainSelection::all_pairs;
}

const std::vector<double>& active_intensities(const ExperimentConfig& config, Scheme scheme) {
  return scheme == Scheme::active2 ? config.active2_intensities : config.active4_intensities;
}

std::vector<std::pair<ModePattern, ModePattern>> active_pairs(int n_intensities) {
  std::vector<std::pair<ModePattern, ModePattern>> pairs;
  for (int i = 0; i < n_intensities; ++i)
    for (int j = 0; j < n_intensities; ++j)
      pairs.emplace_back(ModePattern(1u << i, n_intensities), ModePattern(1u << j, n_intensities));
  return pairs;
}

// Rate from certified yield bounds and code observables; fills the report.
void finish_report(const ExperimentConfig& config, const ChannelSpec& ch, double mu_code,
                   const CodeModeStats& code, const YieldBounds& bounds, KeyRateReport& report) {
  report.mu_code = mu_code;
  report.q_mu = code.gain;
  report.er_mu = code.error_rate;
  report.yields = bounds;
  report.lp_gap_y11 = bounds.upper.at({1, 1}) - yield_nm(1, 1, ch);
  report.caps = x_upper_bounds(mu_code, bounds, config.series_cut, code.gain);
  report.i_ae = information_leakage(report.caps);
  report.rate = secret_key_rate(code.gain, code.error_rate, report.i_ae, ch.f_ec);
}

KeyRateReport evaluate_passive(const ExperimentConfig& config, Scheme scheme, double distance_km,
                               const PointParams& params, const DecoyModeFamily* cached_family,
                               bool need_lower) {
  const int n_det = scheme_detectors(scheme);
  KeyRateReport report;
  report.scheme = scheme;
  report.distance_km = distance_km;
  report.params = params;

  const ChannelSpec ch = channel_at(config, distance_km);
  const SourceOptics optics = optics_for(config, params, n_det);
  report.params.cascade_ts = optics.cascade_ts;

  DecoyModeFamily local;
  const DecoyModeFamily* family = cached_family;
  if (family == nullptr) {
    local = build_decoy_family(optics, config.local_det, n_det, config.n_cut);
    family = &local;
  }

  try {
    const auto pairs = select_gain_pairs(n_det, passive_selection(config, n_det));
    const DecoyObservables obs =
        decoy_gains(*family, *family, pairs, ch, optics.mu_code(), config.n_cut);
    const LinearProgram lp = build_constraints(*family, *family, obs, config.n_cut);
    const auto bounds = solve_yield_bounds(lp, config.y2_weights, need_lower);
    if (!bounds) {
      report.feasible = false;
      report.diagnostic = "yield LP infeasible";
      report.rate = kNan;
      return report;
    }
    finish_report(config, ch, optics.mu_code(), {obs.q_code, obs.er_code}, *bounds, report);
  } catch (const InfeasibleCapsError& e) {
    report.feasible = false;
    report.diagnostic = e.what();
    report.rate = kNan;
  } catch (const ConditioningError& e) {
    report.feasible = false;
    report.diagnostic = e.what();
    report.rate = kNan;
  }
  return report;
}

KeyRateReport evaluate_active(const ExperimentConfig& config, Scheme scheme, double distance_km,
                              const PointParams& params, bool need_lower) {
  KeyRateReport report;
  report.scheme = scheme;
  report.distance_km = distance_km;
  report.params = params;
  report.params.cascade_ts.clear();

  const ChannelSpec ch = channel_at(config, distance_km);
  const auto& intensities = active_intensities(config, scheme);
  const auto dists = active_decoy_distributions(intensities, config.n_cut);

  // Re-key the family interface onto the synthetic patterns.
  DecoyModeFamily family;
  family.n_detectors = static_cast<int>(intensities.size());
  for (const auto& [pattern, pmf] : dists) {
    family.patterns.push_back(pattern);
    family.mode_prob.push_back(1.0 / static_cast<double>(intensities.size()));
    family.conditional.push_back(pmf);
  }

  try {
    const auto pairs = active_pairs(static_cast<int>(intensities.size()));
    const double mu_code = params.mu_laser;
    const DecoyObservables obs = decoy_gains(family, family, pairs, ch, mu_code, config.n_cut);
    const LinearProgram lp = build_constraints(family, family, obs, config.n_cut);
    const auto bounds = solve_yield_bounds(lp, config.y2_weights, need_lower);
    if (!bounds) {
      report.feasible = false;
      report.diagnostic = "yield LP infeasible";
      report.rate = kNan;
      return report;
    }
    finish_report(config, ch, mu_code, {obs.q_code, obs.er_code}, *bounds, report);
  } catch (const InfeasibleCapsError& e) {
    report.feasible = false;
    report.diagnostic = e.what();
    report.rate = kNan;
  }
  return report;
}

KeyRateReport evaluate_infinite(const ExperimentConfig& config, double distance_km,
                                const PointParams& params) {
  KeyRateReport report;
  report.scheme = Scheme::infinite;
  report.distance_km = distance_km;
  report.params = params;
  report.params.cascade_ts.clear();

  const ChannelSpec ch = channel_at(config, distance_km);
  const YieldBounds bounds = infinite_decoy_bounds(ch, config.y2_weights);
  const double mu_code = params.mu_laser;
  try {
    const CodeModeStats code = code_mode_observables(ch, mu_code);
    finish_report(config, ch, mu_code, code, bounds, report);
  } catch (const InfeasibleCapsError& e) {
    report.feasible = false;
    report.diagnostic = e.what();
    report.rate = kNan;
  }
  return report;
}

KeyRateReport evaluate_plob(const ExperimentConfig& config, double distance_km) {
  KeyRateReport report;
  report.scheme = Scheme::plob;
  report.distance_km = distance_km;
  report.params = {};
  report.rate = plob_bound(channel_at(config, distance_km).eta_end_to_end(config.plob_include_det_eff));
  report.i_ae = kNan;
  report.q_mu = kNan;
  report.er_mu = kNan;
  report.mu_code = kNan;
  report.lp_gap_y11 = kNan;
  return report;
}

}  // namespace

KeyRateReport evaluate_point(const ExperimentConfig& config, Scheme scheme, double distance_km,
                             const PointParams& params) {
  config.validate();
  switch (scheme) {
    case Scheme::passive2:
    case Scheme::passive4:
    case Scheme::passive8:
      return evaluate_passive(config, scheme, distance_km, params, nullptr, /*need_lower=*/true);
    case Scheme::active2:
    case Scheme::active4:
      return evaluate_active(config, scheme, distance_km, params, /*need_lower=*/true);
    case Scheme::infinite:
      return evaluate_infinite(config, distance_km, params);
    case Scheme::plob:
      return evaluate_plob(config, distance_km);
  }
  throw std::logic_error("evaluate_point: unhandled scheme");
}

namespace {

// Exact pruning bound: the rate at any finite-decoy point cannot exceed the
// rate with perfectly known yields at the same code intensity, because the
// caps only grow when yields are replaced by upper bounds.
class InfiniteLeakageCache {
 public:
  InfiniteLeakageCache(const ExperimentConfig& config, const ChannelSpec& ch)
      : config_(config), ch_(ch), bounds_(infinite_decoy_bounds(ch, config.y2_weights)) {}

  // Returns an upper bound on the achievable rate at this code intensity.
  double rate_upper_bound(double mu_code) {
    const auto it = cache_.find(mu_code);
    if (it != cache_.end()) return it->second;
    double bound;
    try {
      const CodeModeStats code = code_mode_observables(ch_, mu_code);
      const LeakageCaps caps = x_upper_bounds(mu_code, bounds_, config_.series_cut, code.gain);
      const double i_ae = information_leakage(caps);
      bound = secret_key_rate(code.gain, code.error_rate, i_ae, ch_.f_ec);
    } catch (const std::exception&) {
      // A finite scheme has larger caps than the reference, so it may still
      // be feasible where the reference is not: never prune in that case.
      bound = std::numeric_limits<double>::infinity();
    }
    cache_.emplace(mu_code, bound);
    return bound;
  }

 private:
  const ExperimentConfig& config_;
  ChannelSpec ch_;
  YieldBounds bounds_;
  std::map<double, double> cache_;
};

bool better_point(double rate, const PointParams& params, double best_rate,
                  const PointParams& best_params) {
  if (std::isnan(rate)) return false;
  if (rate > best_rate) return true;
  if (rate < best_rate) return false;
  if (params.mu_laser != best_params.mu_laser) return params.mu_laser < best_params.mu_laser;
  if (params.t1 != best_params.t1) return params.t1 < best_params.t1;
  if (params.t2 != best_params.t2) return params.t2 < best_params.t2;
  return params.cascade_ts < best_params.cascade_ts;
}

// Cached conditioned distributions of one passive grid, shared by distances.
struct PassiveGrid {
  std::vector<PointParams> params;
  std::vector<DecoyModeFamily> families;
};

std::vector<PointParams> passive_grid_points(const ExperimentConfig& config, int n_detectors) {
  const auto mus = config.mu.values();
  const auto t1s = config.t1.values();
  const auto t2s = config.t2.values();
  const auto cas = config.cascade.values();
  const int n_cascade = n_detectors - 1;

  std::vector<PointParams> points;
  std::vector<int> cas_idx(static_cast<std::size_t>(std::max(0, n_cascade)), 0);
  for (double mu : mus) {
    for (double t1 : t1s) {
      for (double t2 : t2s) {
        // Odometer over the cascade axes.
        std::fill(cas_idx.begin(), cas_idx.end(), 0);
        while (true) {
          PointParams p;
          p.mu_laser = mu;
          p.t1 = t1;
          p.t2 = t2;
          for (int i : cas_idx) p.cascade_ts.push_back(cas[static_cast<std::size_t>(i)]);
          points.push_back(std::move(p));
          int axis = n_cascade - 1;
          while (axis >= 0) {
            if (++cas_idx[static_cast<std::size_t>(axis)] < static_cast<int>(cas.size())) break;
            cas_idx[static_cast<std::size_t>(axis)] = 0;
            --axis;
          }
          if (axis < 0 || n_cascade == 0) break;
        }
      }
    }
  }
  return points;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

PassiveGrid build_passive_grid(const ExperimentConfig& config, int n_detectors, int threads) {
  PassiveGrid grid;
  grid.params = passive_grid_points(config, n_detectors);
  grid.families.resize(grid.params.size());
  parallel_for(static_cast<int>(grid.params.size()), threads, [&](int i) {
    const SourceOptics optics =
        optics_for(config, grid.params[static_cast<std::size_t>(i)], n_detectors);
    grid.families[static_cast<std::size_t>(i)] =
        build_decoy_family(optics, config.local_det, n_detectors, config.n_cut);
  });
  return grid;
}

OptimizeResult optimize_passive(const ExperimentConfig& config, Scheme scheme, double distance_km,
                                const PassiveGrid* grid) {
  const int n_det = scheme_detectors(scheme);
  InfiniteLeakageCache prune(config, channel_at(config, distance_km));

  std::optional<KeyRateReport> best;
  double best_rate = kNegInf;

  const auto consider = [&](const PointParams& params, const DecoyModeFamily* family) {
    if (best && prune.rate_upper_bound(optics_for(config, params, n_det).mu_code()) <= best_rate)
      return;
    KeyRateReport report =
        evaluate_passive(config, scheme, distance_km, params, family, /*need_lower=*/false);
    const double rate = report.feasible ? report.rate : kNegInf;
    if (!best || better_point(rate, report.params, best_rate, best->params)) {
      best_rate = rate;
      best = std::move(report);
    }
  };

  std::vector<PointParams> points;
  if (grid == nullptr) points = passive_grid_points(config, n_det);
  const std::size_t n_points = grid ? grid->params.size() : points.size();
  for (std::size_t i = 0; i < n_points; ++i) {
    if (grid) {
      consider(grid->params[i], &grid->families[i]);
    } else {
      consider(points[i], nullptr);
    }
  }

  // One refinement pass at half the grid step around the incumbent.
  if (best) {
    const PointParams center = best->params;
    const auto offsets = [](double step, double v, double lo, double hi) {
      std::vector<double> out{v};
      if (step > 0.0) {
        out.push_back(std::clamp(v - step / 2.0, lo, hi));
        out.push_back(std::clamp(v + step / 2.0, lo, hi));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    const auto mus = offsets(config.mu.step(), center.mu_laser, config.mu.lo, config.mu.hi);
    const auto t1s = offsets(config.t1.step(), center.t1, config.t1.lo, config.t1.hi);
    const auto t2s = offsets(config.t2.step(), center.t2, config.t2.lo, config.t2.hi);
    std::vector<std::vector<double>> cass;
    for (double tc : center.cascade_ts)
      cass.push_back(offsets(config.cascade.step(), tc, config.cascade.lo, config.cascade.hi));

    std::vector<PointParams> refined;
    std::vector<std::size_t> idx(cass.size(), 0);
    for (double mu : mus) {
      for (double t1 : t1s) {
        for (double t2 : t2s) {
          std::fill(idx.begin(), idx.end(), 0);
          while (true) {
            PointParams p;
            p.mu_laser = mu;
            p.t1 = t1;
            p.t2 = t2;
            for (std::size_t a = 0; a < cass.size(); ++a) p.cascade_ts.push_back(cass[a][idx[a]]);
            refined.push_back(std::move(p));
            int axis = static_cast<int>(cass.size()) - 1;
            while (axis >= 0) {
              if (++idx[static_cast<std::size_t>(axis)] < cass[static_cast<std::size_t>(axis)].size()) break;
              idx[static_cast<std::size_t>(axis)] = 0;
              --axis;
            }
            if (axis < 0 || cass.empty()) break;
          }
        }
      }
    }
    std::sort(refined.begin(), refined.end(), [](const PointParams& a, const PointParams& b) {
      if (a.mu_laser != b.mu_laser) return a.mu_laser < b.mu_laser;
      if (a.t1 != b.t1) return a.t1 < b.t1;
      if (a.t2 != b.t2) return a.t2 < b.t2;
      return a.cascade_ts < b.cascade_ts;
    });
    for (const auto& p : refined) consider(p, nullptr);
  }

  OptimizeResult result;
  if (best) {
    // Re-evaluate the winner with lower bounds for the full report.
    result.report = evaluate_passive(config, scheme, distance_km, best->params, nullptr,
                                     /*need_lower=*/true);
    result.params = result.report.params;
    result.all_nonpositive = !(result.report.feasible && result.report.rate > 0.0);
  } else {
    result.all_nonpositive = true;
  }
  return result;
}

OptimizeResult optimize_scalar_mu(const ExperimentConfig& config, Scheme scheme,
                                  double distance_km) {
  std::vector<double> mus;
  if (scheme == Scheme::infinite) {
    GridRange fine = config.mu;
    fine.points = std::max(config.infinite_mu_points, config.mu.points);
    mus = fine.values();
    // Keep the shared coarse nodes so the reference curve dominates the
    // active schemes' grid exactly.
    for (double v : config.mu.values()) mus.push_back(v);
    std::sort(mus.begin(), mus.end());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
  } else {
    mus = config.mu.values();
  }

  const auto evaluate = [&](double mu) {
    PointParams p;
    p.mu_laser = mu;
    return scheme == Scheme::infinite ? evaluate_infinite(config, distance_km, p)
                                      : evaluate_active(config, scheme, distance_km, p,
                                                        /*need_lower=*/false);
  };

  std::optional<KeyRateReport> best;
  double best_rate = kNegInf;
  for (double mu : mus) {
    KeyRateReport report = evaluate(mu);
    const double rate = report.feasible ? report.rate : kNegInf;
    if (!best || better_point(rate, report.params, best_rate, best->params)) {
      best_rate = rate;
      best = std::move(report);
    }
  }
  // Half-step refinement on the mu axis.
  if (best && mus.size() > 1) {
    const double step = mus[1] - mus[0];
    const double center = best->params.mu_laser;
    for (double mu : {center - step / 2.0, center + step / 2.0}) {
      if (mu < mus.front() || mu > mus.back()) continue;
      KeyRateReport report = evaluate(mu);
      const double rate = report.feasible ? report.rate : kNegInf;
      if (better_point(rate, report.params, best_rate, best->params)) {
        best_rate = rate;
        best = std::move(report);
      }
    }
  }

  OptimizeResult result;
  if (best && scheme != Scheme::infinite) {
    PointParams p;
    p.mu_laser = best->params.mu_laser;
    result.report = evaluate_active(config, scheme, distance_km, p, /*need_lower=*/true);
  } else if (best) {
    result.report = *best;
  }
  result.params = result.report.params;
  result.all_nonpositive = !(result.report.feasible && result.report.rate > 0.0);
  return result;
}

OptimizeResult optimize_with_cache(const ExperimentConfig& config, Scheme scheme,
                                   double distance_km, const PassiveGrid* grid) {
  switch (scheme) {
    case Scheme::passive2:
    case Scheme::passive4:
    case Scheme::passive8:
      return optimize_passive(config, scheme, distance_km, grid);
    case Scheme::active2:
    case Scheme::active4:
    case Scheme::infinite:
      return optimize_scalar_mu(config, scheme, distance_km);
    case Scheme::plob: {
      OptimizeResult result;
      result.report = evaluate_plob(config, distance_km);
      return result;
    }
  }
  throw std::logic_error("optimize_point: unhandled scheme");
}

}  // namespace

OptimizeResult optimize_point(const ExperimentConfig& config, Scheme scheme, double distance_km) {
  config.validate();
  return optimize_with_cache(config, scheme, distance_km, nullptr);
}

std::optional<LinearProgram> build_point_lp(const ExperimentConfig& config, Scheme scheme,
                                            double distance_km, const PointParams& params) {
  config.validate();
  const ChannelSpec ch = channel_at(config, distance_km);
  const int n_det = scheme_detectors(scheme);
  if (n_det > 0) {
    const SourceOptics optics = optics_for(config, params, n_det);
    const DecoyModeFamily family = build_decoy_family(optics, config.local_det, n_det, config.n_cut);
    const auto pairs = select_gain_pairs(n_det, passive_selection(config, n_det));
    const DecoyObservables obs = decoy_gains(family, family, pairs, ch, optics.mu_code(), config.n_cut);
    return build_constraints(family, family, obs, config.n_cut);
  }
  if (scheme == Scheme::active2 || scheme == Scheme::active4) {
    const auto& intensities = active_intensities(config, scheme);
    const auto dists = active_decoy_distributions(intensities, config.n_cut);
    DecoyModeFamily family;
    family.n_detectors = static_cast<int>(intensities.size());
    for (const auto& [pattern, pmf] : dists) {
      family.patterns.push_back(pattern);
      family.mode_prob.push_back(1.0 / static_cast<double>(intensities.size()));
      family.conditional.push_back(pmf);
    }
    const DecoyObservables obs = decoy_gains(family, family,
                                             active_pairs(static_cast<int>(intensities.size())),
                                             ch, params.mu_laser, config.n_cut);
    return build_constraints(family, family, obs, config.n_cut);
  }
  return std::nullopt;
}

namespace {

void format_value(std::string& row, double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  row += buf;
}

std::string csv_row(const ExperimentConfig& config, const KeyRateReport& r) {
  std::string row = scheme_name(r.scheme);
  const auto add = [&](double v) {
    row += ',';
    format_value(row, v, config.precision);
  };
  add(r.distance_km);
  add(r.rate);
  add(std::log10(std::max(r.feasible && !std::isnan(r.rate) ? r.rate : config.rate_floor,
                          config.rate_floor)));
  add(r.i_ae);
  add(r.q_mu);
  add(r.er_mu);
  add(r.scheme == Scheme::plob ? kNan : r.params.mu_laser);
  const bool passive = scheme_detectors(r.scheme) > 0;
  add(passive ? r.params.t1 : kNan);
  add(passive ? r.params.t2 : kNan);
  add(r.params.cascade_ts.size() > 0 ? r.params.cascade_ts[0] : kNan);
  add(r.params.cascade_ts.size() > 1 ? r.params.cascade_ts[1] : kNan);
  add(r.lp_gap_y11);
  return row;
}

}  // namespace

void run_sweep(const ExperimentConfig& config, std::ostream& csv, int threads) {
  config.validate();
  csv << "scheme,distance_km,rate,log10_rate,i_ae,q_mu,er_mu,mu_laser,t1,t2,t3,t4,lp_gap_y11\n";

  std::vector<double> distances = config.distances_km;
  std::sort(distances.begin(), distances.end());

  for (Scheme scheme : kAllSchemes) {
    if (std::find(config.schemes.begin(), config.schemes.end(), scheme) == config.schemes.end())
      continue;
    // Passive conditioned distributions are distance-independent: build the
    // grid once per scheme and share it across distances.
    std::optional<PassiveGrid> grid;
    if (scheme_detectors(scheme) > 0 && !distances.empty())
      grid = build_passive_grid(config, scheme_detectors(scheme), threads);

    std::vector<std::string> rows(distances.size());
    parallel_for(static_cast<int>(distances.size()), threads, [&](int i) {
      const OptimizeResult result = optimize_with_cache(
          config, scheme, distances[static_cast<std::size_t>(i)], grid ? &*grid : nullptr);
      rows[static_cast<std::size_t>(i)] = csv_row(config, result.report);
    });
    for (const auto& row : rows) csv << row << "\n";
  }
}

}  // namespace pdtf
