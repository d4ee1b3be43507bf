#include <doctest.h>

#include <sstream>

#include "rsched/error.hpp"
#include "rsched/experiment.hpp"
#include "rsched/text_io.hpp"
#include "test_util.hpp"

using namespace rsched;

namespace {

Scenario small(std::uint64_t seed = 1) {
  ReferenceOptions o;
  o.seed = seed;
  o.n_cores = 8;
  return reference_scenario(o);
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // header
}

}  // namespace

TEST_CASE("piecewise schedules") {
  Schedule s{{{0.0, 0.9}, {300.0, 0.6}, {600.0, 0.9}}};
  CHECK(s.at(0.0) == 0.9);
  CHECK(s.at(299.9) == 0.9);
  CHECK(s.at(300.0) == 0.6);
  CHECK(s.at(1e6) == 0.9);
  CHECK(s.change_points(0.0, 300.0).empty());
  CHECK(s.change_points(250.0, 350.0) == std::vector<double>{300.0});
  CHECK_THROWS_AS(Schedule{}.at(0.0), DomainError);
}

TEST_CASE("reference scenario shape") {
  const auto s = small();
  CHECK(s.batch_count() == 4);
  REQUIRE(s.lc_app() != nullptr);
  CHECK(s.lc_initial_cores == 4);
  CHECK(s.training.batch.size() == 16);
  CHECK(s.training.latency_critical.size() == 8);
  CHECK(s.qos_ms > 0.0);
  CHECK(s.max_power == doctest::Approx(full_chip_power(s)));
  CHECK_THROWS_AS(reference_scenario({1, 3}), DomainError);

  ReferenceOptions h;
  h.n_cores = 6;
  h.hetero = true;
  const auto hs = reference_scenario(h);
  CHECK(hs.batch_count() == 6);
  CHECK(hs.lc_app() == nullptr);
}

TEST_CASE("scenario save and load round trip") {
  TempDir dir("scenario_rt");
  auto s = small(7);
  s.power_cap = Schedule{{{0.0, 0.9}, {200.0, 0.6}}};
  s.load = Schedule{{{0.0, 0.3}, {100.0, 0.8}}};
  save_scenario(s, dir.path());
  const auto back = load_scenario(dir / "scenario.json");
  CHECK(back.hash() == s.hash());
  CHECK(back.apps == s.apps);
  CHECK(back.training.batch == s.training.batch);
  CHECK(back.power_cap.points == s.power_cap.points);
  CHECK(back.qos_ms == s.qos_ms);
}

TEST_CASE("scenario loading errors") {
  TempDir dir("scenario_bad");
  CHECK_THROWS_AS(load_scenario(dir / "missing.json"), IoError);
  write_file(dir / "scenario.json", "{ not json");
  CHECK_THROWS_AS(load_scenario(dir / "scenario.json"), ParseError);
  write_file(dir / "scenario.json", R"({"seed": 1})");
  CHECK_THROWS_AS(load_scenario(dir / "scenario.json"), ParseError);
}

TEST_CASE("experiment validation") {
  const auto s = small();
  ExperimentConfig c;
  c.duration_ms = 200.0;
  CHECK_NOTHROW(validate(c, s));
  c.managers.clear();
  CHECK_THROWS_AS(validate(c, s), DomainError);
  c.managers = {ManagerKind::cuttlesys};
  c.caps = {1.2};
  CHECK_THROWS_AS(validate(c, s), DomainError);
  c.caps = {0.0};
  CHECK_THROWS_AS(validate(c, s), DomainError);
  c.caps = {0.5};
  c.duration_ms = 150.0;
  CHECK_THROWS_AS(validate(c, s), DomainError);
  c.duration_ms = 0.0;
  CHECK_THROWS_AS(validate(c, s), DomainError);
}

TEST_CASE("manager fan-out and sweep rows") {
  const auto s = small(2);
  ExperimentConfig c;
  c.managers = {ManagerKind::cuttlesys, ManagerKind::core_gating};
  c.caps = {0.7};
  c.duration_ms = 300.0;
  const auto r = run_experiment(s, c);
  CHECK(r.quanta.size() == 6);
  CHECK(data_rows(quanta_csv(s, r)) == 6);
  CHECK(quanta_csv(s, r).rfind(provenance_line(s), 0) == 0);

  ExperimentConfig sw;
  sw.managers = {ManagerKind::cuttlesys, ManagerKind::core_gating, ManagerKind::asym_fixed_5050,
                 ManagerKind::no_gating};
  sw.caps = {0.9, 0.8, 0.7, 0.6, 0.5};
  sw.duration_ms = 100.0;
  const auto rs = run_experiment(s, sw);
  CHECK(rs.summaries.size() == 20);
  CHECK(data_rows(sweep_csv(s, rs)) == 20);
  for (const auto& m : rs.summaries) {
    CHECK(m.normalized_instr <= 1.0 + 1e-9);
    if (m.manager == "no_gating") CHECK(m.normalized_instr == doctest::Approx(1.0));
  }
  const auto j = summary_json(s, sw, rs);
  CHECK(j["managers"].size() == 20);
  CHECK(j["config_hash"] == hex64(s.hash()));
}

TEST_CASE("cap schedule dip and recovery") {
  auto s = small(3);
  s.power_cap = Schedule{{{0.0, 0.9}, {300.0, 0.6}, {600.0, 0.9}}};
  ExperimentConfig c;
  c.duration_ms = 900.0;
  const auto r = run_experiment(s, c);
  REQUIRE(r.quanta.size() == 9);
  CHECK(r.summaries.front().cap == std::nullopt);
  auto mean = [&](std::size_t a, std::size_t b) {
    double g = 0.0;
    for (std::size_t q = a; q < b; ++q) g += r.quanta[q].geomean_bips;
    return g / static_cast<double>(b - a);
  };
  const double high = mean(1, 3), low = mean(4, 6), back = mean(7, 9);
  CHECK(low < high);
  CHECK(back > low);
  for (std::size_t q = 3; q < 6; ++q) CHECK(r.quanta[q].cap == 0.6);
}

TEST_CASE("LC config follows the load") {
  auto s = small(4);
  s.load = Schedule{{{0.0, 0.2}, {500.0, 0.9}}};
  RuntimeOptions o;
  o.cap_override = 0.9;
  const auto reps = run_timeline(s, ManagerKind::cuttlesys, 1000.0, o);
  const auto lc = s.lc_app();
  const auto& sp = s.space;
  auto lc_power = [&](const QuantumReport& r) {
    return static_cast<double>(r.lc_cores) * lc->watts_at(sp.core_of(*r.lc_config), 0.9);
  };
  REQUIRE(reps[4].lc_config.has_value());
  REQUIRE(reps[9].lc_config.has_value());
  CHECK(lc_power(reps[9]) > lc_power(reps[4]));
}
