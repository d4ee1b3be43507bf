#include "rsched/experiment.hpp"

#include <cmath>

#include "rsched/error.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

void validate(const ExperimentConfig& config, const Scenario& scenario) {
  if (config.managers.empty()) throw DomainError("no managers requested");
  for (double cap : config.caps)
    if (!(cap > 0.0 && cap <= 1.0)) throw DomainError("cap " + format_roundtrip(cap) + " outside (0, 1]");
  const double n = config.duration_ms / scenario.quantum_ms;
  if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9)
    throw DomainError("duration must be a positive multiple of the quantum (" + format_roundtrip(scenario.quantum_ms) +
                      " ms)");
}

namespace {

ManagerSummary summarize(const std::vector<QuantumReport>& reps, std::optional<double> cap) {
  ManagerSummary m;
  m.manager = reps.front().manager;
  m.cap = cap;
  m.quanta = reps.size();
  std::size_t met = 0;
  for (const auto& r : reps) {
    m.total_instr += r.total_instr;
    m.mean_power += r.mean_power;
    m.mean_geomean += r.geomean_bips;
    m.over_budget_ms += r.over_budget_ms;
    m.over_budget_steady_ms += r.over_budget_steady_ms;
    met += r.qos_met ? 1 : 0;
    m.repair_failures += r.repair_ok ? 0 : 1;
    m.lc_not_found += r.lc_not_found ? 1 : 0;
    m.saturated += r.saturated ? 1 : 0;
    m.fallbacks += r.fallback ? 1 : 0;
  }
  const double n = static_cast<double>(reps.size());
  m.mean_power /= n;
  m.mean_geomean /= n;
  m.qos_met_fraction = static_cast<double>(met) / n;
  return m;
}

std::string cap_text(const std::optional<double>& cap) { return cap ? format_fixed(*cap, 2) : "schedule"; }

}  // namespace

ExperimentResult run_experiment(const Scenario& scenario, const ExperimentConfig& config) {
  validate(config, scenario);
  ExperimentResult out;
  RuntimeOptions base;
  base.workers = config.workers;
  // no_gating ignores the cap, so one reference run serves every cap.
  for (const auto& r : run_timeline(scenario, ManagerKind::no_gating, config.duration_ms, base))
    out.reference_instr += r.total_instr;

  std::vector<std::optional<double>> caps;
  for (double c : config.caps) caps.emplace_back(c);
  if (caps.empty()) caps.emplace_back(std::nullopt);
  for (const auto& cap : caps) {
    for (ManagerKind kind : config.managers) {
      RuntimeOptions opt = base;
      opt.cap_override = cap;
      log(LogLevel::info, "running " + std::string(to_string(kind)) + " at cap " + cap_text(cap));
      auto reps = run_timeline(scenario, kind, config.duration_ms, opt);
      auto sum = summarize(reps, cap);
      sum.normalized_instr = out.reference_instr > 0.0 ? sum.total_instr / out.reference_instr : 0.0;
      out.summaries.push_back(sum);
      for (auto& r : reps) out.quanta.push_back(std::move(r));
    }
  }
  return out;
}

std::string provenance_line(const Scenario& scenario) {
  return "# seed=" + std::to_string(scenario.seed) + " config_hash=" + hex64(scenario.hash()) + "\n";
}

std::string quanta_csv(const Scenario& scenario, const ExperimentResult& result) {
  std::string out = provenance_line(scenario);
  out += "t_ms,manager,cap,qps_load,lc_config,lc_cores,qos_met,tail_ms,geomean_bips,total_instr,mean_power,over_budget_ms\n";
  for (const auto& r : result.quanta) {
    out += format_fixed(r.t_ms, 1) + "," + r.manager + "," + format_fixed(r.cap, 4) + "," + format_fixed(r.load, 4) + ",";
    out += (r.lc_config ? std::to_string(*r.lc_config) : std::string()) + "," + std::to_string(r.lc_cores) + ",";
    out += std::string(r.qos_met ? "1" : "0") + "," + format_fixed(r.tail_ms, 6) + "," + format_fixed(r.geomean_bips, 6) +
           "," + format_fixed(r.total_instr, 6) + "," + format_fixed(r.mean_power, 6) + "," +
           format_fixed(r.over_budget_ms, 3) + "\n";
  }
  return out;
}

std::string sweep_csv(const Scenario& scenario, const ExperimentResult& result) {
  std::string out = provenance_line(scenario);
  out += "manager,cap,total_instr,normalized_instr,qos_met_fraction,mean_power,over_budget_ms\n";
  for (const auto& m : result.summaries)
    out += m.manager + "," + cap_text(m.cap) + "," + format_fixed(m.total_instr, 6) + "," +
           format_fixed(m.normalized_instr, 6) + "," + format_fixed(m.qos_met_fraction, 4) + "," +
           format_fixed(m.mean_power, 6) + "," + format_fixed(m.over_budget_ms, 3) + "\n";
  return out;
}

nlohmann::json summary_json(const Scenario& scenario, const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json j;
  j["seed"] = scenario.seed;
  j["config_hash"] = hex64(scenario.hash());
  j["duration_ms"] = config.duration_ms;
  j["quantum_ms"] = scenario.quantum_ms;
  j["max_power"] = scenario.max_power;
  j["reference"] = {{"manager", "no_gating"}, {"total_instr", result.reference_instr}};
  auto& rows = j["managers"] = nlohmann::json::array();
  for (const auto& m : result.summaries) {
    rows.push_back({{"manager", m.manager},
                    {"cap", m.cap ? nlohmann::json(*m.cap) : nlohmann::json("schedule")},
                    {"quanta", m.quanta},
                    {"total_instr", m.total_instr},
                    {"normalized_instr", m.normalized_instr},
                    {"qos_met_fraction", m.qos_met_fraction},
                    {"mean_power", m.mean_power},
                    {"mean_geomean_bips", m.mean_geomean},
                    {"over_budget_ms", m.over_budget_ms},
                    {"over_budget_steady_ms", m.over_budget_steady_ms},
                    {"warnings",
                     {{"repair_failures", m.repair_failures},
                      {"lc_not_found", m.lc_not_found},
                      {"saturated", m.saturated},
                      {"search_fallbacks", m.fallbacks}}}});
  }
  return j;
}

}  // namespace rsched
