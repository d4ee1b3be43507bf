#include "rsched/workload.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rsched/error.hpp"
#include "rsched/rng.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

std::string_view to_string(AppKind kind) {
  return kind == AppKind::batch ? "batch" : "latency_critical";
}

AppKind app_kind_from_string(std::string_view text) {
  if (text == "batch") return AppKind::batch;
  if (text == "latency_critical" || text == "lc") return AppKind::latency_critical;
  throw DomainError("unknown app kind '" + std::string(text) + "'");
}

namespace {

// Linear interpolation of `values[base + g * stride]` over the load grid.
double interpolate_grid(const std::vector<double>& grid, const std::vector<double>& values,
                        std::size_t base, double load) {
  if (grid.size() <= 1) return values[base];
  if (load <= grid.front()) return values[base];
  if (load >= grid.back()) return values[base + grid.size() - 1];
  const auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), load) - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (load - grid[lo]) / (grid[hi] - grid[lo]);
  return values[base + lo] + t * (values[base + hi] - values[base + lo]);
}

}  // namespace

double AppProfile::watts_at(std::size_t core, double load) const {
  const std::size_t g = grid_points();
  if ((core + 1) * g > watts.size()) throw DomainError("core config out of range for " + id);
  if (!latency_critical()) return watts[core];
  return interpolate_grid(load_grid, watts, core * g, load);
}

double AppProfile::latency_at(std::size_t index, double load) const {
  if (!latency_critical()) throw DomainError(id + " is not latency-critical");
  const std::size_t g = grid_points();
  if ((index + 1) * g > latency_ms.size()) throw DomainError("config index out of range for " + id);
  return interpolate_grid(load_grid, latency_ms, index * g, load);
}

GroundTruth ground_truth(const AppProfile& app, const ConfigSpace& space, std::size_t index,
                         double load) {
  if (index >= space.size() || index >= app.bips.size())
    throw DomainError("config index " + std::to_string(index) + " out of range");
  GroundTruth out;
  out.bips = app.bips[index];
  out.watts = app.watts_at(space.core_of(index), load);
  if (app.latency_critical()) out.latency_ms = app.latency_at(index, load);
  return out;
}

namespace {

// Position of `ways` between cache options: (lower option, upper option, t).
struct CacheBracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double t = 0.0;
};

CacheBracket bracket_ways(const ConfigSpace& space, double ways) {
  const auto& opts = space.cache_options();
  std::vector<std::size_t> order(opts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return opts[a] < opts[b]; });
  if (ways <= opts[order.front()]) return {order.front(), order.front(), 0.0};
  if (ways >= opts[order.back()]) return {order.back(), order.back(), 0.0};
  for (std::size_t r = 1; r < order.size(); ++r) {
    if (ways <= opts[order[r]]) {
      const double a = std::log2(opts[order[r - 1]]);
      const double b = std::log2(opts[order[r]]);
      return {order[r - 1], order[r], (std::log2(ways) - a) / (b - a)};
    }
  }
  return {order.back(), order.back(), 0.0};
}

}  // namespace

double bips_at_ways(const AppProfile& app, const ConfigSpace& space, std::size_t core, double ways) {
  const auto b = bracket_ways(space, ways);
  const double lo = app.bips[space.index_of(core, b.lo)];
  const double hi = app.bips[space.index_of(core, b.hi)];
  return lo + b.t * (hi - lo);
}

double latency_at_ways(const AppProfile& app, const ConfigSpace& space, std::size_t core,
                       double ways, double load) {
  const auto b = bracket_ways(space, ways);
  const double lo = app.latency_at(space.index_of(core, b.lo), load);
  const double hi = app.latency_at(space.index_of(core, b.hi), load);
  return lo + b.t * (hi - lo);
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

namespace {

constexpr double kSectionExponent = 1.4;
constexpr double kCacheExponent = 1.2;
// Elasticities of throughput to the per-section and cache saturation curves.
constexpr double kSectionWeight = 0.5;
constexpr double kCacheWeight = 0.7;
constexpr double kLatencyGamma = 0.6;
constexpr double kLatencyCapFactor = 40.0;

struct Family {
  double peak_bips = 1.0;
  std::array<double, 3> section_sat{};  // fe, be, ls
  double cache_sat = 1.0;
  double activity = 1.0;
  std::array<double, 3> power_coef{};
};

double saturating(double x, double c, double exponent) {
  const double a = std::pow(x, exponent);
  return a / (a + c);
}

struct ClassTraits {
  double perf = 1.0;
  double static_power = 0.12;
};

ClassTraits class_traits(const ConfigSpace& space, std::size_t cls) {
  if (space.hetero() && space.classes()[cls].name == "small") return {0.9, 0.05};
  return {1.0, 0.12};
}

int max_width(const ConfigSpace& space) {
  int w = 0;
  for (const auto& cls : space.classes()) w = std::max(w, cls.levels.back());
  return w;
}

std::vector<double> family_throughput(const Family& fam, const ConfigSpace& space) {
  const double wmax = max_width(space);
  const auto& opts = space.cache_options();
  const double cmax = *std::max_element(opts.begin(), opts.end());
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto core = space.core_of(i);
    const auto cfg = space.core_config(core);
    const auto traits = class_traits(space, space.class_of_core(core));
    const std::array<double, 3> widths{double(cfg.fe), double(cfg.be), double(cfg.ls)};
    double v = fam.peak_bips * traits.perf;
    for (int s = 0; s < 3; ++s)
      v *= std::pow(saturating(widths[s], fam.section_sat[s], kSectionExponent) /
                        saturating(wmax, fam.section_sat[s], kSectionExponent),
                    kSectionWeight);
    v *= std::pow(saturating(space.cache_ways_of(i), fam.cache_sat, kCacheExponent) /
                      saturating(cmax, fam.cache_sat, kCacheExponent),
                  kCacheWeight);
    out[i] = v;
  }
  return out;
}

std::vector<double> family_power(const Family& fam, const ConfigSpace& space) {
  const double wmax = max_width(space);
  std::vector<double> out(space.core_count());
  for (std::size_t j = 0; j < space.core_count(); ++j) {
    const auto cfg = space.core_config(j);
    const auto traits = class_traits(space, space.class_of_core(j));
    const double dyn = fam.power_coef[0] * cfg.fe / wmax + fam.power_coef[1] * cfg.be / wmax +
                       fam.power_coef[2] * cfg.ls / wmax;
    out[j] = traits.static_power + fam.activity * dyn;
  }
  return out;
}

Family make_family(std::size_t f, std::size_t count, Rng& rng) {
  double mu = static_cast<double>(f) / static_cast<double>(count - 1);
  mu = std::clamp(mu + rng.uniform(-0.04, 0.04), 0.0, 1.0);
  Family fam;
  fam.peak_bips = 3.6 - 2.2 * mu;
  fam.section_sat = {1.0 + 4.0 * (1.0 - mu) * rng.uniform(0.8, 1.2),
                     1.0 + 5.0 * (1.0 - mu) * rng.uniform(0.8, 1.2),
                     1.0 + 3.0 * (0.3 + 0.4 * mu) * rng.uniform(0.8, 1.2)};
  fam.cache_sat = 0.05 + 2.0 * mu * rng.uniform(0.8, 1.2);
  fam.activity = 1.0 - 0.35 * mu;
  const double u = rng.uniform(0.95, 1.05);
  fam.power_coef = {0.30 * u, 0.36 * u, 0.22 * u};
  return fam;
}

// Sorted cache ranks (0 = fewest ways) for the envelope passes.
std::vector<int> cache_ranks(const ConfigSpace& space) {
  const auto& opts = space.cache_options();
  std::vector<int> rank(opts.size(), 0);
  for (std::size_t a = 0; a < opts.size(); ++a)
    for (std::size_t b = 0; b < opts.size(); ++b)
      if (opts[b] < opts[a]) ++rank[a];
  return rank;
}

// Projects `values` (indexed by full index, or by core when `per_core`) onto
// the monotone cone: non-decreasing (or non-increasing) along every width axis
// and, for full-index data, along cache ways.
void monotone_envelope(std::vector<double>& values, const ConfigSpace& space, bool per_core,
                       bool increasing) {
  const auto ranks = cache_ranks(space);
  const std::size_t p = per_core ? 1 : space.cache_count();
  auto better = [increasing](double a, double b) { return increasing ? std::max(a, b) : std::min(a, b); };
  for (std::size_t cls = 0; cls < space.classes().size(); ++cls) {
    const auto range = space.core_range(cls);
    const int n = static_cast<int>(space.classes()[cls].levels.size());
    for (int axis = 0; axis < 3; ++axis) {
      for (int level = 1; level < n; ++level) {
        for (std::size_t core = range.first; core <= range.last; ++core) {
          auto code = space.level_code(core);
          if (code[axis] != level) continue;
          auto lower = code;
          lower[axis] = level - 1;
          const std::size_t below = space.core_from_levels(lower, cls);
          for (std::size_t k = 0; k < p; ++k)
            values[core * p + k] = better(values[core * p + k], values[below * p + k]);
        }
      }
    }
    if (per_core) continue;
    const int nc = static_cast<int>(space.cache_count());
    for (int r = 1; r < nc; ++r) {
      const auto k = static_cast<std::size_t>(std::find(ranks.begin(), ranks.end(), r) - ranks.begin());
      const auto kb = static_cast<std::size_t>(std::find(ranks.begin(), ranks.end(), r - 1) - ranks.begin());
      for (std::size_t core = range.first; core <= range.last; ++core)
        values[core * p + k] = better(values[core * p + k], values[core * p + kb]);
    }
  }
}

std::vector<double> default_load_grid() {
  std::vector<double> grid;
  for (int g = 0; g <= 20; ++g) grid.push_back(g / 20.0);
  return grid;
}

}  // namespace

std::vector<AppProfile> generate_synthetic(const GeneratorOptions& options, const ConfigSpace& space) {
  if (options.family_count < 2) throw DomainError("family_count must be at least 2");
  if (options.n_batch == 0) throw DomainError("n_batch must be positive");
  if (options.noise_sigma < 0.0) throw DomainError("noise_sigma must be non-negative");

  Rng family_rng(options.seed, 1);
  std::vector<Family> families;
  std::vector<std::vector<double>> fam_bips, fam_power;
  for (std::size_t f = 0; f < options.family_count; ++f) {
    families.push_back(make_family(f, options.family_count, family_rng));
    fam_bips.push_back(family_throughput(families.back(), space));
    fam_power.push_back(family_power(families.back(), space));
  }

  const auto grid = options.load_grid.empty() ? default_load_grid() : options.load_grid;
  const double sigma = options.noise_sigma;
  const std::size_t top = space.index_of(space.widest_core(space.classes().size() - 1),
                                         space.max_cache_index());

  auto make_app = [&](bool lc, std::size_t ordinal) {
    Rng rng(options.seed, (lc ? 500000 : 1000) + ordinal);
    const double pos = rng.uniform(0.0, static_cast<double>(options.family_count - 1));
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, options.family_count - 1);
    const double frac = pos - static_cast<double>(lo);
    const double scale = std::exp(0.15 * rng.normal());
    const double power_scale = rng.uniform(0.9, 1.0);

    AppProfile app;
    app.kind = lc ? AppKind::latency_critical : AppKind::batch;
    char name[32];
    std::snprintf(name, sizeof(name), "%s%02zu", (lc ? options.lc_prefix : options.batch_prefix).c_str(), ordinal);
    app.id = name;

    std::vector<double> mix(space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      mix[i] = (1.0 - frac) * fam_bips[lo][i] + frac * fam_bips[hi][i];

    app.bips.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      app.bips[i] = scale * mix[i] * (sigma > 0.0 ? std::exp(sigma * rng.normal()) : 1.0);
    monotone_envelope(app.bips, space, false, true);

    std::vector<double> power(space.core_count());
    for (std::size_t j = 0; j < space.core_count(); ++j)
      power[j] = power_scale * ((1.0 - frac) * fam_power[lo][j] + frac * fam_power[hi][j]) *
                 (sigma > 0.0 ? std::exp(sigma * rng.normal()) : 1.0);
    monotone_envelope(power, space, true, true);

    if (!lc) {
      app.watts = std::move(power);
      return app;
    }

    // Queueing-style tail latency: T = s / (1 - load * s / s_max), clipped.
    const double s0 = rng.uniform(0.8, 1.6);
    const double kappa = rng.uniform(0.95, 1.1);
    const double s_max = kappa * s0;
    const double cap = kLatencyCapFactor * s0;
    std::vector<double> service(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double perf = mix[i] / mix[top];
      service[i] = s0 * (1.0 + kLatencyGamma * (1.0 / perf - 1.0)) *
                   (sigma > 0.0 ? std::exp(sigma * rng.normal()) : 1.0);
    }
    monotone_envelope(service, space, false, false);

    app.load_grid = grid;
    const std::size_t g = grid.size();
    app.latency_ms.resize(space.size() * g);
    for (std::size_t i = 0; i < space.size(); ++i) {
      for (std::size_t q = 0; q < g; ++q) {
        const double denom = 1.0 - grid[q] * service[i] / s_max;
        app.latency_ms[i * g + q] = denom > 0.0 ? std::min(cap, service[i] / denom) : cap;
      }
    }
    app.watts.resize(space.core_count() * g);
    for (std::size_t j = 0; j < space.core_count(); ++j)
      for (std::size_t q = 0; q < g; ++q) app.watts[j * g + q] = power[j] * (0.55 + 0.45 * grid[q]);
    return app;
  };

  std::vector<AppProfile> apps;
  for (std::size_t a = 0; a < options.n_batch; ++a) apps.push_back(make_app(false, a));
  for (std::size_t a = 0; a < options.n_lc; ++a) apps.push_back(make_app(true, a));
  return apps;
}

std::vector<AppProfile> generate_synthetic(std::uint64_t seed, std::size_t n_batch,
                                           const ConfigSpace& space, std::size_t family_count) {
  GeneratorOptions options;
  options.seed = seed;
  options.n_batch = n_batch;
  options.family_count = family_count;
  return generate_synthetic(options, space);
}

std::vector<std::string> check_profile(const AppProfile& app, const ConfigSpace& space) {
  std::vector<std::string> issues;
  auto note = [&](const std::string& s) {
    if (issues.size() < 20) issues.push_back(app.id + ": " + s);
  };
  if (app.bips.size() != space.size()) {
    note("bips table has wrong size");
    return issues;
  }
  const std::size_t g = app.grid_points();
  const auto ranks = cache_ranks(space);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!(app.bips[i] > 0.0)) note("non-positive bips at " + std::to_string(i));
    const auto core = space.core_of(i);
    const auto k = space.cache_of(i);
    const auto cls = space.class_of_core(core);
    const auto code = space.level_code(core);
    for (int axis = 0; axis < 3; ++axis) {
      if (code[axis] == 0) continue;
      auto lower = code;
      --lower[axis];
      const auto below = space.core_from_levels(lower, cls);
      const auto bi = space.index_of(below, k);
      if (app.bips[i] < app.bips[bi]) note("bips decreases with width at " + std::to_string(i));
      if (k == 0) {
        for (std::size_t q = 0; q < g; ++q)
          if (app.watts[core * g + q] < app.watts[below * g + q])
            note("power decreases with width at core " + std::to_string(core));
      }
      if (app.latency_critical())
        for (std::size_t q = 0; q < g; ++q)
          if (app.latency_ms[i * g + q] > app.latency_ms[bi * g + q])
            note("latency increases with width at " + std::to_string(i));
    }
    if (ranks[k] > 0) {
      const auto kb = static_cast<std::size_t>(std::find(ranks.begin(), ranks.end(), ranks[k] - 1) - ranks.begin());
      if (app.bips[i] < app.bips[space.index_of(core, kb)])
        note("bips decreases with cache at " + std::to_string(i));
    }
    if (app.latency_critical())
      for (std::size_t q = 1; q < g; ++q)
        if (app.latency_ms[i * g + q] < app.latency_ms[i * g + q - 1])
          note("latency decreases with load at " + std::to_string(i));
  }
  return issues;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "app_id", "kind", "config_index", "bips", "watts", "latency_ms", "load"};

}  // namespace

LoadedProfiles parse_profiles(std::string_view text, const ConfigSpace& space) {
  LoadedProfiles out;
  std::array<int, kColumns.size()> column{};
  column.fill(-1);
  bool have_header = false;

  struct Row {
    std::size_t index;
    double bips, watts, latency, load;
    std::size_t line;
  };
  std::vector<std::string> order;
  std::map<std::string, std::pair<AppKind, std::vector<Row>>> rows;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const auto body = std::string(trim(line.substr(1)));
      if (body == "training=1" || body.find("training=1") != std::string::npos) out.training = true;
      out.comments.push_back(body);
      continue;
    }
    const auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end())
          throw ParseError("missing column '" + std::string(kColumns[c]) + "'", line_no);
        column[c] = static_cast<int>(it - fields.begin());
      }
      have_header = true;
      continue;
    }
    const int needed = *std::max_element(column.begin(), column.end());
    if (static_cast<int>(fields.size()) <= needed)
      throw ParseError("expected " + std::to_string(needed + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    auto field = [&](std::size_t c) { return fields[static_cast<std::size_t>(column[c])]; };
    try {
      const std::string id(field(0));
      if (id.empty()) throw ParseError("empty app_id", line_no);
      const AppKind kind = app_kind_from_string(field(1));
      const long long idx = parse_int(field(2));
      if (idx < 0 || static_cast<std::size_t>(idx) >= space.size())
        throw ParseError("config_index " + std::to_string(idx) + " outside space of " +
                             std::to_string(space.size()),
                         line_no);
      Row row{static_cast<std::size_t>(idx), parse_double(field(3)), parse_double(field(4)), 0.0, 0.0, line_no};
      if (kind == AppKind::latency_critical) {
        if (field(5).empty() || field(6).empty())
          throw ParseError("latency-critical row needs latency_ms and load", line_no);
        row.latency = parse_double(field(5));
        row.load = parse_double(field(6));
      } else if (!field(5).empty() || !field(6).empty()) {
        throw ParseError("batch row must leave latency_ms and load empty", line_no);
      }
      auto [it, inserted] = rows.try_emplace(id, kind, std::vector<Row>{});
      if (inserted) order.push_back(id);
      if (it->second.first != kind) throw ParseError("app '" + id + "' changes kind", line_no);
      it->second.second.push_back(row);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_header) throw ParseError("missing header", line_no);

  for (const auto& id : order) {
    const auto& [kind, app_rows] = rows.at(id);
    AppProfile app;
    app.id = id;
    app.kind = kind;
    const std::size_t n = space.size();
    if (kind == AppKind::batch) {
      std::vector<bool> seen(n, false);
      app.bips.assign(n, 0.0);
      app.watts.assign(space.core_count(), -1.0);
      for (const auto& r : app_rows) {
        if (seen[r.index]) throw ParseError("duplicate row for " + id, r.line);
        seen[r.index] = true;
        app.bips[r.index] = r.bips;
        auto& w = app.watts[space.core_of(r.index)];
        if (w >= 0.0 && w != r.watts) throw ParseError("watts differ across cache options for " + id, r.line);
        w = r.watts;
      }
      for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) throw ParseError("app '" + id + "' missing config_index " + std::to_string(i), app_rows.back().line);
    } else {
      std::vector<double> grid;
      for (const auto& r : app_rows)
        if (r.index == app_rows.front().index) grid.push_back(r.load);
      std::sort(grid.begin(), grid.end());
      if (std::adjacent_find(grid.begin(), grid.end()) != grid.end())
        throw ParseError("duplicate load point for " + id, app_rows.front().line);
      const std::size_t g = grid.size();
      app.load_grid = grid;
      app.bips.assign(n, -1.0);
      app.latency_ms.assign(n * g, -1.0);
      app.watts.assign(space.core_count() * g, -1.0);
      std::vector<std::size_t> count(n, 0);
      for (const auto& r : app_rows) {
        const auto it = std::lower_bound(grid.begin(), grid.end(), r.load);
        if (it == grid.end() || *it != r.load)
          throw ParseError("load " + format_roundtrip(r.load) + " not on the grid of " + id, r.line);
        const auto q = static_cast<std::size_t>(it - grid.begin());
        if (app.latency_ms[r.index * g + q] >= 0.0) throw ParseError("duplicate row for " + id, r.line);
        if (app.bips[r.index] >= 0.0 && app.bips[r.index] != r.bips)
          throw ParseError("bips differ across load points for " + id, r.line);
        app.bips[r.index] = r.bips;
        app.latency_ms[r.index * g + q] = r.latency;
        auto& w = app.watts[space.core_of(r.index) * g + q];
        if (w >= 0.0 && w != r.watts) throw ParseError("watts differ across cache options for " + id, r.line);
        w = r.watts;
        ++count[r.index];
      }
      for (std::size_t i = 0; i < n; ++i)
        if (count[i] != g)
          throw ParseError("app '" + id + "' incomplete at config_index " + std::to_string(i), app_rows.back().line);
    }
    const auto issues = check_profile(app, space);
    if (!issues.empty()) {
      out.non_monotone = true;
      out.warnings.insert(out.warnings.end(), issues.begin(), issues.end());
    }
    out.apps.push_back(std::move(app));
  }
  return out;
}

LoadedProfiles load_profiles(const std::filesystem::path& path, const ConfigSpace& space) {
  return parse_profiles(read_file(path), space);
}

std::string profiles_to_csv(const std::vector<AppProfile>& apps, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "app_id,kind,config_index,bips,watts,latency_ms,load\n";
  for (const auto& app : apps) {
    const std::size_t g = app.grid_points();
    const std::size_t p = app.watts.size() / g == 0 ? 1 : app.bips.size() / (app.watts.size() / g);
    for (std::size_t i = 0; i < app.bips.size(); ++i) {
      const std::size_t core = i / p;
      if (!app.latency_critical()) {
        out += app.id + ",batch," + std::to_string(i) + "," + format_roundtrip(app.bips[i]) + "," +
               format_roundtrip(app.watts[core]) + ",,\n";
        continue;
      }
      for (std::size_t q = 0; q < g; ++q)
        out += app.id + ",latency_critical," + std::to_string(i) + "," + format_roundtrip(app.bips[i]) +
               "," + format_roundtrip(app.watts[core * g + q]) + "," +
               format_roundtrip(app.latency_ms[i * g + q]) + "," + format_roundtrip(app.load_grid[q]) + "\n";
    }
  }
  return out;
}

void save_profiles(const std::vector<AppProfile>& apps, const ConfigSpace& space,
                   const std::filesystem::path& path, const std::vector<std::string>& comments) {
  for (const auto& app : apps)
    if (app.bips.size() != space.size()) throw DomainError("profile " + app.id + " does not match the space");
  write_file(path, profiles_to_csv(apps, comments));
  nlohmann::ordered_json summary;
  summary["apps"] = apps.size();
  summary["batch"] = std::count_if(apps.begin(), apps.end(), [](auto& a) { return !a.latency_critical(); });
  summary["latency_critical"] = std::count_if(apps.begin(), apps.end(), [](auto& a) { return a.latency_critical(); });
  summary["space_hash"] = hex64(space.hash());
  auto summary_path = path;
  summary_path.replace_extension(".summary.json");
  write_file(summary_path, summary.dump(2) + "\n");
}

}  // namespace rsched
