#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rsched/config_space.hpp"
#include "rsched/rng.hpp"
#include "rsched/workload.hpp"

namespace rsched {

// Measurement noise: a slow sinusoidal program phase (random phase offset per
// measurement, averaged over the sampling window) times white noise whose
// standard deviation shrinks as sigma0 / sqrt(duration_ms).
struct NoiseModel {
  double sigma0 = 0.02;
  double phase_amplitude = 0.05;
  double phase_period_ms = 10.0;
};

struct Sample {
  std::string app_id;
  std::size_t config_index = 0;
  double duration_ms = 0.0;
  double bips = 0.0;
  double watts = 0.0;
  std::optional<double> latency_ms;
  double load = 0.0;
};

// One contiguous sample of `app` at `index` starting at `start_ms`.
Sample take_sample(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                   double duration_ms, const NoiseModel& noise, Rng& rng, double load = 0.0,
                   double start_ms = 0.0);

// `total_ms` split into `replicates` sub-samples spread evenly over one phase
// period; the result is their mean. replicates == 1 equals take_sample.
Sample replicated_sample(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                         const NoiseModel& noise, Rng& rng, std::size_t replicates = 8,
                         double total_ms = 1.0, double load = 0.0, double start_ms = 0.0);

struct PairProfile {
  std::vector<Sample> samples;  // per app: high sample, then low sample
  // Configuration each app runs in millisecond 1 and 2.
  std::vector<std::array<std::size_t, 2>> schedule;
  double wall_ms = 2.0;
};

// Two 1 ms samples per app at `high_index` and `low_index`. The first half of
// the apps run high in millisecond 1 and low in millisecond 2; the rest run
// the other way round, so the whole chip is never at the high config at once.
PairProfile profile_pair(const std::vector<const AppProfile*>& apps, const ConfigSpace& space,
                         std::size_t high_index, std::size_t low_index, const NoiseModel& noise,
                         Rng& rng, const std::vector<double>& loads = {});

// Level-coded (fe, be, ls) runs; 0 = narrowest level.
struct SamplingDesign {
  std::vector<std::array<int, 3>> runs;
};

// The 3^(3-1) fraction {a + b + c = 0 mod 3}, top run first.
SamplingDesign three_mm3_design(int levels = 3);

// Core-config indices of the design's runs within `core_class`.
std::vector<std::size_t> design_cores(const SamplingDesign& design, const ConfigSpace& space,
                                      std::size_t core_class);

std::string samples_to_csv(const std::vector<Sample>& samples,
                           const std::vector<std::string>& comments = {});

}  // namespace rsched
