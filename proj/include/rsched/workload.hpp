#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsched/config_space.hpp"

namespace rsched {

enum class AppKind { batch, latency_critical };

std::string_view to_string(AppKind kind);
AppKind app_kind_from_string(std::string_view text);

// Ground-truth behaviour of one application over every configuration.
//
// Batch apps carry a single power value per core config. Latency-critical apps
// carry their power and tail latency on a load grid; values between grid
// points are linearly interpolated.
struct AppProfile {
  std::string id;
  AppKind kind = AppKind::batch;
  std::vector<double> bips;        // [index], billions of instructions / s
  std::vector<double> load_grid;   // ascending, latency-critical only
  std::vector<double> watts;       // [core * grid_points() + g]
  std::vector<double> latency_ms;  // [index * grid_points() + g], latency-critical only

  bool latency_critical() const { return kind == AppKind::latency_critical; }
  std::size_t grid_points() const { return load_grid.empty() ? 1 : load_grid.size(); }

  double watts_at(std::size_t core, double load = 0.0) const;
  double latency_at(std::size_t index, double load) const;

  friend bool operator==(const AppProfile&, const AppProfile&) = default;
};

struct GroundTruth {
  double bips = 0.0;
  double watts = 0.0;
  std::optional<double> latency_ms;
};

// Exact oracle values. `load` is ignored for batch apps.
GroundTruth ground_truth(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                         double load = 0.0);

// Values at a fractional way count (log2-linear between cache options, clamped
// to the option range). Used for unpartitioned / equal-share cache models.
double bips_at_ways(const AppProfile& app, const ConfigSpace& space, std::size_t core, double ways);
double latency_at_ways(const AppProfile& app, const ConfigSpace& space, std::size_t core,
                       double ways, double load);

struct GeneratorOptions {
  std::uint64_t seed = 1;
  std::size_t n_batch = 16;
  std::size_t n_lc = 0;
  std::size_t family_count = 4;
  double noise_sigma = 0.03;  // log-normal, applied once at generation
  std::vector<double> load_grid;  // empty -> 0.00, 0.05, ..., 1.00
  std::string batch_prefix = "batch";
  std::string lc_prefix = "lc";
};

// Apps are noisy mixtures of `family_count` base response surfaces. Batch apps
// come first, then latency-critical ones. Deterministic for a fixed seed.
std::vector<AppProfile> generate_synthetic(const GeneratorOptions& options, const ConfigSpace& space);
std::vector<AppProfile> generate_synthetic(std::uint64_t seed, std::size_t n_batch,
                                           const ConfigSpace& space, std::size_t family_count);

// Monotonicity / structure scan over the whole index set.
std::vector<std::string> check_profile(const AppProfile& app, const ConfigSpace& space);

struct LoadedProfiles {
  std::vector<AppProfile> apps;
  std::vector<std::string> comments;  // '#' header lines, without the marker
  bool training = false;              // file carries a "training=1" flag
  bool non_monotone = false;
  std::vector<std::string> warnings;
};

LoadedProfiles parse_profiles(std::string_view text, const ConfigSpace& space);
LoadedProfiles load_profiles(const std::filesystem::path& path, const ConfigSpace& space);

std::string profiles_to_csv(const std::vector<AppProfile>& apps,
                            const std::vector<std::string>& comments = {});
// Writes the CSV plus a sibling "<stem>.summary.json" (app count, space hash).
void save_profiles(const std::vector<AppProfile>& apps, const ConfigSpace& space,
                   const std::filesystem::path& path, const std::vector<std::string>& comments = {});

}  // namespace rsched
