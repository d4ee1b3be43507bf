#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsched/config_space.hpp"
#include "rsched/reconstruct.hpp"
#include "rsched/sampling.hpp"
#include "rsched/workload.hpp"

namespace rsched {

// Piecewise-constant schedule of (time ms, value) points.
struct Schedule {
  std::vector<std::pair<double, double>> points;

  static Schedule constant(double value) { return {{{0.0, value}}}; }
  double at(double t_ms) const;
  // Times strictly inside (t0, t1) where the value changes.
  std::vector<double> change_points(double t0, double t1) const;
};

// Durations (ms) of the management phases; defaults are the published costs.
struct PhaseCosts {
  double profile_ms = 2.0;
  double reconstruct_ms = 4.8;
  double dds_ms = 1.3;
  double gating_profile_ms = 1.0;
  double pair_sampling_ms = 2.0;      // heterogeneous big/small pair sampling
  double class_sampling_ms = 8.0;     // 3MM3 + small-core sampling, two-step
  double one_step_sampling_ms = 18.0;
  double search_ms = 0.9;             // serial DDS/GA time, heterogeneous managers
  double sync_overhead = 0.10;
  double reconfig_ms = 0.0;           // per reconfiguration; not charged when 0
};

struct Scenario {
  ConfigSpace space = ConfigSpace::homogeneous();
  std::vector<AppProfile> apps;  // batch apps first, then at most one LC service
  TrainingDb training;
  std::size_t n_cores = 32;
  std::size_t lc_initial_cores = 16;
  double qos_ms = 0.0;
  double qos_slack = 0.2;
  double quantum_ms = 100.0;
  double max_power = 0.0;  // watts at cap 1.0
  double cache_ways = 32.0;
  Schedule power_cap = Schedule::constant(1.0);
  Schedule load = Schedule::constant(0.6);
  PhaseCosts costs;
  NoiseModel noise;
  std::uint64_t seed = 1;

  std::size_t batch_count() const;
  const AppProfile* lc_app() const;  // nullptr when batch-only
  bool hetero() const { return space.hetero(); }
  std::uint64_t hash() const;
};

struct ReferenceOptions {
  std::uint64_t seed = 1;
  std::size_t n_cores = 32;
  bool hetero = false;
  std::size_t training_batch = 16;
  std::size_t training_lc = 8;
};

// Homogeneous: n_cores/2 batch apps plus one LC service on n_cores/2 cores.
// Heterogeneous: n_cores batch apps on n_cores/2 big and n_cores/2 small cores.
Scenario reference_scenario(const ReferenceOptions& options);

// Sum over cores of the widest-config power (LC at full load).
double full_chip_power(const Scenario& s);
// 1.1 x the LC tail latency at the top config with its initial cores at load 0.8.
double reference_qos(const Scenario& s);

nlohmann::json scenario_to_json(const Scenario& s, const std::string& profiles_file,
                                const std::string& training_file);
// Writes scenario.json, profiles.csv and training.csv into `dir`.
void save_scenario(const Scenario& s, const std::filesystem::path& dir);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace rsched
