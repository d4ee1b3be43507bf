#include "rsched/sampling.hpp"

#include <cmath>
#include <numbers>

#include "rsched/error.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

namespace {

// Mean of A*sin(2*pi*t/P + phi) over [start, start + duration].
double mean_phase(const NoiseModel& noise, double phi, double start, double duration) {
  if (noise.phase_amplitude == 0.0) return 0.0;
  const double w = 2.0 * std::numbers::pi / noise.phase_period_ms;
  const double a = w * start + phi;
  const double b = w * (start + duration) + phi;
  return noise.phase_amplitude * (std::cos(a) - std::cos(b)) / (w * duration);
}

struct Draw {
  double bips, watts, latency;
};

Draw noisy_window(const GroundTruth& truth, const NoiseModel& noise, double phi, double start,
                  double duration, Rng& rng) {
  const double phase = mean_phase(noise, phi, start, duration);
  const double sd = noise.sigma0 / std::sqrt(duration);
  Draw d;
  d.bips = truth.bips * (1.0 + phase) * (1.0 + sd * rng.normal());
  d.watts = truth.watts * (1.0 + phase) * (1.0 + sd * rng.normal());
  d.latency = truth.latency_ms ? *truth.latency_ms * (1.0 - phase) * (1.0 + sd * rng.normal()) : 0.0;
  return d;
}

}  // namespace

Sample take_sample(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                   double duration_ms, const NoiseModel& noise, Rng& rng, double load,
                   double start_ms) {
  return replicated_sample(app, space, index, noise, rng, 1, duration_ms, load, start_ms);
}

Sample replicated_sample(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                         const NoiseModel& noise, Rng& rng, std::size_t replicates,
                         double total_ms, double load, double start_ms) {
  if (replicates == 0) throw DomainError("replicates must be at least 1");
  if (!(total_ms > 0.0)) throw DomainError("sampling time must be positive");
  const auto truth = ground_truth(app, space, index, load);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double sub = total_ms / static_cast<double>(replicates);
  const double spacing = noise.phase_period_ms / static_cast<double>(replicates);
  Draw sum{0.0, 0.0, 0.0};
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto d = noisy_window(truth, noise, phi, start_ms + spacing * static_cast<double>(r), sub, rng);
    sum.bips += d.bips;
    sum.watts += d.watts;
    sum.latency += d.latency;
  }
  const double n = static_cast<double>(replicates);
  Sample s;
  s.app_id = app.id;
  s.config_index = index;
  s.duration_ms = total_ms;
  s.bips = sum.bips / n;
  s.watts = sum.watts / n;
  if (truth.latency_ms) s.latency_ms = sum.latency / n;
  s.load = app.latency_critical() ? load : 0.0;
  return s;
}

PairProfile profile_pair(const std::vector<const AppProfile*>& apps, const ConfigSpace& space,
                         std::size_t high_index, std::size_t low_index, const NoiseModel& noise,
                         Rng& rng, const std::vector<double>& loads) {
  if (apps.size() < 2) throw DomainError("profile_pair needs at least two apps");
  PairProfile out;
  const std::size_t half = apps.size() / 2;
  for (std::size_t a = 0; a < apps.size(); ++a) {
    const bool high_first = a < half;
    const double load = loads.empty() ? 0.0 : loads.at(a);
    const double t_high = high_first ? 0.0 : 1.0;
    const double t_low = high_first ? 1.0 : 0.0;
    out.samples.push_back(take_sample(*apps[a], space, high_index, 1.0, noise, rng, load, t_high));
    out.samples.push_back(take_sample(*apps[a], space, low_index, 1.0, noise, rng, load, t_low));
    out.schedule.push_back(high_first ? std::array<std::size_t, 2>{high_index, low_index}
                                      : std::array<std::size_t, 2>{low_index, high_index});
  }
  return out;
}

SamplingDesign three_mm3_design(int levels) {
  if (levels != 3) throw DomainError("3MM3 design is defined for 3 levels per factor");
  SamplingDesign d;
  d.runs.push_back({2, 2, 2});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        if ((a + b + c) % 3 == 0 && !(a == 2 && b == 2 && c == 2)) d.runs.push_back({a, b, c});
  return d;
}

std::vector<std::size_t> design_cores(const SamplingDesign& design, const ConfigSpace& space,
                                      std::size_t core_class) {
  std::vector<std::size_t> out;
  for (const auto& run : design.runs) out.push_back(space.core_from_levels(run, core_class));
  return out;
}

std::string samples_to_csv(const std::vector<Sample>& samples, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "app_id,config_index,duration_ms,bips,watts,latency_ms\n";
  for (const auto& s : samples) {
    out += s.app_id + "," + std::to_string(s.config_index) + "," + format_roundtrip(s.duration_ms) + "," +
           format_roundtrip(s.bips) + "," + format_roundtrip(s.watts) + "," +
           (s.latency_ms ? format_roundtrip(*s.latency_ms) : std::string()) + "\n";
  }
  return out;
}

}  // namespace rsched
