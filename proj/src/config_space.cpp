#include "rsched/config_space.hpp"

#include <algorithm>
#include <cmath>

#include "rsched/error.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

std::string to_string(const CoreConfig& c) {
  return "{" + std::to_string(c.fe) + "," + std::to_string(c.be) + "," + std::to_string(c.ls) + "}";
}

ConfigSpace::ConfigSpace(std::vector<CoreClass> classes, std::vector<double> cache_options)
    : classes_(std::move(classes)), cache_options_(std::move(cache_options)) {
  if (classes_.empty()) throw DomainError("config space needs at least one core class");
  if (cache_options_.empty()) throw DomainError("config space needs at least one cache option");
  for (double ways : cache_options_)
    if (!(ways > 0.0)) throw DomainError("cache options must be positive");
  for (auto& cls : classes_) {
    if (cls.levels.empty()) throw DomainError("core class '" + cls.name + "' has no levels");
    std::sort(cls.levels.begin(), cls.levels.end());
    if (std::adjacent_find(cls.levels.begin(), cls.levels.end()) != cls.levels.end())
      throw DomainError("duplicate width level in class '" + cls.name + "'");
    if (cls.levels.front() <= 0) throw DomainError("widths must be positive");
    class_offset_.push_back(core_count_);
    const std::size_t n = cls.levels.size();
    core_count_ += n * n * n;
  }
}

ConfigSpace ConfigSpace::homogeneous(std::vector<int> levels, std::vector<double> cache_options) {
  return ConfigSpace({CoreClass{"core", std::move(levels)}}, std::move(cache_options));
}

ConfigSpace ConfigSpace::heterogeneous(std::vector<double> cache_options) {
  return ConfigSpace({CoreClass{"small", {1, 2}}, CoreClass{"big", {2, 3, 4}}},
                     std::move(cache_options));
}

std::vector<ConfigPoint> ConfigSpace::enumerate() const {
  std::vector<ConfigPoint> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(decode(i));
  return out;
}

std::size_t ConfigSpace::class_of_core(std::size_t core) const {
  if (core >= core_count_) throw DomainError("core config " + std::to_string(core) + " out of range");
  std::size_t cls = 0;
  while (cls + 1 < class_offset_.size() && class_offset_[cls + 1] <= core) ++cls;
  return cls;
}

std::array<int, 3> ConfigSpace::level_code(std::size_t core) const {
  const std::size_t cls = class_of_core(core);
  const int n = static_cast<int>(classes_[cls].levels.size());
  const int local = static_cast<int>(core - class_offset_[cls]);
  // Local position counts down from the widest level.
  const int ls_pos = local / (n * n);
  const int fe_pos = (local / n) % n;
  const int be_pos = local % n;
  return {n - 1 - fe_pos, n - 1 - be_pos, n - 1 - ls_pos};
}

std::size_t ConfigSpace::core_from_levels(const std::array<int, 3>& code,
                                          std::size_t core_class) const {
  if (core_class >= classes_.size()) throw DomainError("no such core class");
  const int n = static_cast<int>(classes_[core_class].levels.size());
  for (int c : code)
    if (c < 0 || c >= n) throw DomainError("level code out of range");
  const int fe_pos = n - 1 - code[0];
  const int be_pos = n - 1 - code[1];
  const int ls_pos = n - 1 - code[2];
  return class_offset_[core_class] + static_cast<std::size_t>(ls_pos * n * n + fe_pos * n + be_pos);
}

CoreConfig ConfigSpace::core_config(std::size_t core) const {
  const auto& levels = classes_[class_of_core(core)].levels;
  const auto code = level_code(core);
  return {levels[code[0]], levels[code[1]], levels[code[2]]};
}

std::size_t ConfigSpace::encode(const CoreConfig& config, std::size_t cache_index,
                                std::size_t core_class) const {
  if (core_class >= classes_.size()) throw DomainError("no such core class");
  if (cache_index >= cache_options_.size())
    throw DomainError("cache index " + std::to_string(cache_index) + " out of range");
  const auto& levels = classes_[core_class].levels;
  auto code_of = [&](int width) {
    auto it = std::find(levels.begin(), levels.end(), width);
    if (it == levels.end())
      throw DomainError("width " + std::to_string(width) + " not a level of class '" +
                        classes_[core_class].name + "'");
    return static_cast<int>(it - levels.begin());
  };
  const std::size_t core =
      core_from_levels({code_of(config.fe), code_of(config.be), code_of(config.ls)}, core_class);
  return core * cache_options_.size() + cache_index;
}

ConfigPoint ConfigSpace::decode(std::size_t index) const {
  if (index >= size()) throw DomainError("config index " + std::to_string(index) + " out of range");
  const std::size_t core = index / cache_options_.size();
  return {class_of_core(core), core_config(core), index % cache_options_.size()};
}

std::size_t ConfigSpace::core_of(std::size_t index) const {
  if (index >= size()) throw DomainError("config index " + std::to_string(index) + " out of range");
  return index / cache_options_.size();
}

std::size_t ConfigSpace::cache_of(std::size_t index) const {
  if (index >= size()) throw DomainError("config index " + std::to_string(index) + " out of range");
  return index % cache_options_.size();
}

double ConfigSpace::cache_ways_of(std::size_t index) const { return cache_options_[cache_of(index)]; }

std::size_t ConfigSpace::index_of(std::size_t core, std::size_t cache_index) const {
  if (core >= core_count_ || cache_index >= cache_options_.size())
    throw DomainError("core/cache pair out of range");
  return core * cache_options_.size() + cache_index;
}

IndexRange ConfigSpace::core_range(std::size_t core_class) const {
  if (core_class >= classes_.size()) throw DomainError("no such core class");
  const std::size_t n = classes_[core_class].levels.size();
  return {class_offset_[core_class], class_offset_[core_class] + n * n * n - 1};
}

IndexRange ConfigSpace::index_range(std::size_t core_class) const {
  const auto r = core_range(core_class);
  const std::size_t p = cache_options_.size();
  return {r.first * p, r.last * p + p - 1};
}

std::size_t ConfigSpace::cache_index_for(double ways) const {
  for (std::size_t k = 0; k < cache_options_.size(); ++k)
    if (std::abs(cache_options_[k] - ways) < 1e-12) return k;
  throw DomainError("no cache option with " + format_roundtrip(ways) + " ways");
}

std::size_t ConfigSpace::max_cache_index() const {
  return static_cast<std::size_t>(
      std::max_element(cache_options_.begin(), cache_options_.end()) - cache_options_.begin());
}

nlohmann::json ConfigSpace::to_json() const {
  nlohmann::json j;
  j["hetero"] = hetero();
  j["cache_options"] = cache_options_;
  if (hetero()) {
    j["small_levels"] = classes_[0].levels;
    j["big_levels"] = classes_[1].levels;
  } else {
    j["levels"] = classes_[0].levels;
  }
  return j;
}

ConfigSpace ConfigSpace::from_json(const nlohmann::json& j) {
  const bool hetero = j.value("hetero", false);
  if (hetero) {
    const auto cache = j.value("cache_options", std::vector<double>{1.0});
    return ConfigSpace({CoreClass{"small", j.value("small_levels", std::vector<int>{1, 2})},
                        CoreClass{"big", j.value("big_levels", std::vector<int>{2, 3, 4})}},
                       cache);
  }
  return homogeneous(j.value("levels", std::vector<int>{2, 4, 6}),
                     j.value("cache_options", std::vector<double>{0.5, 1.0, 2.0, 4.0}));
}

std::uint64_t ConfigSpace::hash() const { return fnv1a64(to_json().dump()); }

ConfigSpace ConfigSpace::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("space file: ") + e.what(), 1);
  }
}

void ConfigSpace::save(const std::filesystem::path& path) const {
  write_file(path, to_json().dump(2) + "\n");
}

HeteroSpace HeteroSpace::of(const ConfigSpace& space) {
  if (!space.hetero()) throw DomainError("space is not heterogeneous");
  return {space.index_range(0), space.index_range(1)};
}

}  // namespace rsched
