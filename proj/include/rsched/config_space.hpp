#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rsched {

// Widths (lanes) of the three pipeline sections: front-end, back-end, load/store.
struct CoreConfig {
  int fe = 0;
  int be = 0;
  int ls = 0;

  friend bool operator==(const CoreConfig&, const CoreConfig&) = default;
};

std::string to_string(const CoreConfig& c);

// A family of cores sharing one per-section level set (e.g. "big" or "small").
struct CoreClass {
  std::string name;
  std::vector<int> levels;  // ascending widths
};

struct ConfigPoint {
  std::size_t core_class = 0;
  CoreConfig core;
  std::size_t cache_index = 0;

  friend bool operator==(const ConfigPoint&, const ConfigPoint&) = default;
};

// Inclusive range of configuration indices.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  bool contains(std::size_t i) const { return i >= first && i <= last; }
  std::size_t size() const { return last - first + 1; }
};

// The discrete space of core configurations x cache allocations.
//
// Index layout is core-config-major: index = core * p + cache. Within a class,
// core configs run from widest to narrowest with LS varying slowest, then FE,
// then BE. Classes are laid out back to back in declaration order.
class ConfigSpace {
 public:
  ConfigSpace(std::vector<CoreClass> classes, std::vector<double> cache_options);

  // Default homogeneous space: widths {2,4,6}, caches {1/2,1,2,4} ways.
  static ConfigSpace homogeneous(std::vector<int> levels = {2, 4, 6},
                                 std::vector<double> cache_options = {0.5, 1.0, 2.0, 4.0});
  // Small cores {1,2} (indices 0..7) followed by big cores {2,3,4} (8..34), core-only.
  static ConfigSpace heterogeneous(std::vector<double> cache_options = {1.0});

  std::size_t core_count() const { return core_count_; }  // m
  std::size_t cache_count() const { return cache_options_.size(); }  // p
  std::size_t size() const { return core_count_ * cache_options_.size(); }
  bool hetero() const { return classes_.size() > 1; }

  const std::vector<CoreClass>& classes() const { return classes_; }
  const std::vector<double>& cache_options() const { return cache_options_; }

  std::vector<ConfigPoint> enumerate() const;
  std::size_t encode(const CoreConfig& config, std::size_t cache_index,
                     std::size_t core_class = 0) const;
  ConfigPoint decode(std::size_t index) const;

  std::size_t core_of(std::size_t index) const;
  std::size_t cache_of(std::size_t index) const;
  double cache_ways_of(std::size_t index) const;
  std::size_t index_of(std::size_t core, std::size_t cache_index) const;

  CoreConfig core_config(std::size_t core) const;
  std::size_t class_of_core(std::size_t core) const;
  // Per-section level codes, 0 = narrowest level of the core's class.
  std::array<int, 3> level_code(std::size_t core) const;
  std::size_t core_from_levels(const std::array<int, 3>& code, std::size_t core_class = 0) const;

  IndexRange core_range(std::size_t core_class) const;   // in core-config units
  IndexRange index_range(std::size_t core_class) const;  // in full-index units

  std::size_t widest_core(std::size_t core_class = 0) const { return core_range(core_class).first; }
  std::size_t narrowest_core(std::size_t core_class = 0) const { return core_range(core_class).last; }
  std::size_t cache_index_for(double ways) const;  // exact match, DomainError otherwise
  std::size_t max_cache_index() const;

  std::uint64_t hash() const;

  nlohmann::json to_json() const;
  static ConfigSpace from_json(const nlohmann::json& j);
  static ConfigSpace load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<CoreClass> classes_;
  std::vector<double> cache_options_;
  std::vector<std::size_t> class_offset_;  // first core index of each class
  std::size_t core_count_ = 0;
};

// Index ranges of the small and big classes of a heterogeneous space.
struct HeteroSpace {
  IndexRange small_range;
  IndexRange big_range;

  static HeteroSpace of(const ConfigSpace& space);
};

}  // namespace rsched
