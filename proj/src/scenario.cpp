#include "rsched/scenario.hpp"

#include <algorithm>

#include "rsched/error.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

double Schedule::at(double t_ms) const {
  if (points.empty()) throw DomainError("empty schedule");
  double v = points.front().second;
  for (const auto& [t, value] : points) {
    if (t > t_ms) break;
    v = value;
  }
  return v;
}

std::vector<double> Schedule::change_points(double t0, double t1) const {
  std::vector<double> out;
  for (const auto& [t, value] : points)
    if (t > t0 && t < t1) out.push_back(t);
  return out;
}

std::size_t Scenario::batch_count() const {
  return static_cast<std::size_t>(
      std::count_if(apps.begin(), apps.end(), [](const AppProfile& a) { return !a.latency_critical(); }));
}

const AppProfile* Scenario::lc_app() const {
  for (const auto& a : apps)
    if (a.latency_critical()) return &a;
  return nullptr;
}

std::uint64_t Scenario::hash() const {
  const auto j = scenario_to_json(*this, "profiles.csv", "training.csv");
  std::uint64_t h = fnv1a64(j.dump());
  h = fnv1a64(profiles_to_csv(apps), h);
  return h;
}

double full_chip_power(const Scenario& s) {
  if (s.hetero()) {
    const std::size_t n_big = s.n_cores / 2;
    const std::size_t n_small = s.n_cores - n_big;
    const std::size_t big = s.space.widest_core(1);
    const std::size_t small = s.space.widest_core(0);
    double pb = 0.0, ps = 0.0;
    for (const auto& a : s.apps) {
      pb += a.watts_at(big);
      ps += a.watts_at(small);
    }
    const double n = static_cast<double>(s.apps.size());
    return static_cast<double>(n_big) * pb / n + static_cast<double>(n_small) * ps / n;
  }
  const std::size_t top = s.space.widest_core();
  double p = 0.0;
  for (const auto& a : s.apps) {
    if (a.latency_critical()) p += static_cast<double>(s.lc_initial_cores) * a.watts_at(top, 1.0);
    else p += a.watts_at(top);
  }
  return p;
}

double reference_qos(const Scenario& s) {
  const AppProfile* lc = s.lc_app();
  if (!lc) return 0.0;
  const std::size_t top = s.space.index_of(s.space.widest_core(), s.space.max_cache_index());
  return 1.1 * lc->latency_at(top, 0.8);
}

Scenario reference_scenario(const ReferenceOptions& options) {
  if (options.n_cores < 2 || options.n_cores % 2 != 0) throw DomainError("core count must be even and >= 2");
  Scenario s;
  s.seed = options.seed;
  s.n_cores = options.n_cores;
  char name[32];
  if (options.hetero) {
    s.space = ConfigSpace::heterogeneous();
    GeneratorOptions g;
    g.seed = options.seed;
    g.n_batch = options.n_cores;
    s.apps = generate_synthetic(g, s.space);
    s.lc_initial_cores = 0;
    s.max_power = full_chip_power(s);
    return s;
  }
  GeneratorOptions g;
  g.seed = options.seed;
  g.n_batch = options.training_batch + options.n_cores / 2;
  g.n_lc = options.training_lc + 1;
  auto apps = generate_synthetic(g, s.space);
  for (std::size_t a = 0; a < g.n_batch; ++a) {
    auto app = apps[a];
    if (a < options.training_batch) {
      std::snprintf(name, sizeof(name), "train_b%02zu", a);
      app.id = name;
      s.training.batch.push_back(std::move(app));
    } else {
      std::snprintf(name, sizeof(name), "batch%02zu", a - options.training_batch);
      app.id = name;
      s.apps.push_back(std::move(app));
    }
  }
  for (std::size_t a = 0; a < g.n_lc; ++a) {
    auto app = apps[g.n_batch + a];
    if (a < options.training_lc) {
      std::snprintf(name, sizeof(name), "train_lc%02zu", a);
      app.id = name;
      s.training.latency_critical.push_back(std::move(app));
    } else {
      app.id = "lc_service";
      s.apps.push_back(std::move(app));
    }
  }
  s.lc_initial_cores = options.n_cores / 2;
  s.qos_ms = reference_qos(s);
  s.max_power = full_chip_power(s);
  return s;
}

namespace {

nlohmann::json schedule_json(const Schedule& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [t, v] : s.points) j.push_back({t, v});
  return j;
}

Schedule schedule_from(const nlohmann::json& j) {
  Schedule s;
  for (const auto& p : j) s.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  std::stable_sort(s.points.begin(), s.points.end(), [](auto& a, auto& b) { return a.first < b.first; });
  if (s.points.empty()) throw DomainError("schedule needs at least one point");
  return s;
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario& s, const std::string& profiles_file,
                                const std::string& training_file) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["space"] = s.space.to_json();
  j["n_cores"] = s.n_cores;
  j["lc_initial_cores"] = s.lc_initial_cores;
  j["qos_ms"] = s.qos_ms;
  j["qos_slack"] = s.qos_slack;
  j["quantum_ms"] = s.quantum_ms;
  j["max_power"] = s.max_power;
  j["cache_ways"] = s.cache_ways;
  j["power_cap"] = schedule_json(s.power_cap);
  j["load"] = schedule_json(s.load);
  j["phase_costs"] = {{"profile_ms", s.costs.profile_ms},
                      {"reconstruct_ms", s.costs.reconstruct_ms},
                      {"dds_ms", s.costs.dds_ms},
                      {"gating_profile_ms", s.costs.gating_profile_ms},
                      {"pair_sampling_ms", s.costs.pair_sampling_ms},
                      {"class_sampling_ms", s.costs.class_sampling_ms},
                      {"one_step_sampling_ms", s.costs.one_step_sampling_ms},
                      {"search_ms", s.costs.search_ms},
                      {"sync_overhead", s.costs.sync_overhead},
                      {"reconfig_ms", s.costs.reconfig_ms}};
  j["noise"] = {{"sigma0", s.noise.sigma0},
                {"phase_amplitude", s.noise.phase_amplitude},
                {"phase_period_ms", s.noise.phase_period_ms}};
  j["profiles"] = profiles_file;
  j["training"] = training_file;
  return nlohmann::json(j);
}

void save_scenario(const Scenario& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::vector<std::string> comments = {"seed=" + std::to_string(s.seed),
                                             "config_hash=" + hex64(s.space.hash())};
  save_profiles(s.apps, s.space, dir / "profiles.csv", comments);
  std::vector<AppProfile> training = s.training.batch;
  training.insert(training.end(), s.training.latency_critical.begin(), s.training.latency_critical.end());
  auto tcomments = comments;
  tcomments.push_back("training=1");
  save_profiles(training, s.space, dir / "training.csv", tcomments);
  write_file(dir / "scenario.json", scenario_to_json(s, "profiles.csv", "training.csv").dump(2) + "\n");
}

Scenario load_scenario(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what(), 1);
  }
  try {
    Scenario s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.space = ConfigSpace::from_json(j.value("space", nlohmann::json::object()));
    s.n_cores = j.at("n_cores").get<std::size_t>();
    s.lc_initial_cores = j.value("lc_initial_cores", s.n_cores / 2);
    s.qos_slack = j.value("qos_slack", 0.2);
    s.quantum_ms = j.value("quantum_ms", 100.0);
    s.cache_ways = j.value("cache_ways", 32.0);
    if (j.contains("power_cap")) s.power_cap = schedule_from(j["power_cap"]);
    if (j.contains("load")) s.load = schedule_from(j["load"]);
    if (j.contains("phase_costs")) {
      const auto& c = j["phase_costs"];
      s.costs.profile_ms = c.value("profile_ms", s.costs.profile_ms);
      s.costs.reconstruct_ms = c.value("reconstruct_ms", s.costs.reconstruct_ms);
      s.costs.dds_ms = c.value("dds_ms", s.costs.dds_ms);
      s.costs.gating_profile_ms = c.value("gating_profile_ms", s.costs.gating_profile_ms);
      s.costs.pair_sampling_ms = c.value("pair_sampling_ms", s.costs.pair_sampling_ms);
      s.costs.class_sampling_ms = c.value("class_sampling_ms", s.costs.class_sampling_ms);
      s.costs.one_step_sampling_ms = c.value("one_step_sampling_ms", s.costs.one_step_sampling_ms);
      s.costs.search_ms = c.value("search_ms", s.costs.search_ms);
      s.costs.sync_overhead = c.value("sync_overhead", s.costs.sync_overhead);
      s.costs.reconfig_ms = c.value("reconfig_ms", s.costs.reconfig_ms);
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      s.noise.sigma0 = n.value("sigma0", s.noise.sigma0);
      s.noise.phase_amplitude = n.value("phase_amplitude", s.noise.phase_amplitude);
      s.noise.phase_period_ms = n.value("phase_period_ms", s.noise.phase_period_ms);
    }
    const auto dir = path.parent_path();
    s.apps = load_profiles(dir / j.value("profiles", std::string("profiles.csv")), s.space).apps;
    const auto tpath = dir / j.value("training", std::string("training.csv"));
    if (std::filesystem::exists(tpath)) {
      for (auto& app : load_profiles(tpath, s.space).apps) {
        if (app.latency_critical()) s.training.latency_critical.push_back(std::move(app));
        else s.training.batch.push_back(std::move(app));
      }
    }
    std::stable_partition(s.apps.begin(), s.apps.end(), [](const AppProfile& a) { return !a.latency_critical(); });
    if (std::count_if(s.apps.begin(), s.apps.end(), [](auto& a) { return a.latency_critical(); }) > 1)
      throw DomainError("scenario supports at most one latency-critical service");
    s.qos_ms = j.contains("qos_ms") ? j["qos_ms"].get<double>() : reference_qos(s);
    s.max_power = j.contains("max_power") ? j["max_power"].get<double>() : full_chip_power(s);
    if (s.apps.empty()) throw DomainError("scenario has no applications");
    if (!s.lc_app()) s.lc_initial_cores = 0;
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what(), 1);
  }
}

}  // namespace rsched
