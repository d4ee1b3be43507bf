#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsched/runtime.hpp"
#include "rsched/scenario.hpp"

namespace rsched {

struct ExperimentConfig {
  std::vector<ManagerKind> managers{ManagerKind::cuttlesys};
  std::vector<double> caps;  // empty: the scenario's own cap schedule
  double duration_ms = 1000.0;
  std::size_t workers = 0;   // 0 -> core count
};

// Throws DomainError for an empty manager list, caps outside (0, 1], or a
// duration that is not a positive multiple of the quantum.
void validate(const ExperimentConfig& config, const Scenario& scenario);

struct ManagerSummary {
  std::string manager;
  std::optional<double> cap;
  std::size_t quanta = 0;
  double total_instr = 0.0;
  double normalized_instr = 0.0;  // relative to no_gating on the same trace
  double qos_met_fraction = 1.0;
  double mean_power = 0.0;
  double mean_geomean = 0.0;
  double over_budget_ms = 0.0;
  double over_budget_steady_ms = 0.0;
  std::size_t repair_failures = 0;
  std::size_t lc_not_found = 0;
  std::size_t saturated = 0;
  std::size_t fallbacks = 0;
};

struct ExperimentResult {
  std::vector<QuantumReport> quanta;  // ordered by (cap, manager, t)
  std::vector<ManagerSummary> summaries;
  double reference_instr = 0.0;       // no_gating total over the trace
};

ExperimentResult run_experiment(const Scenario& scenario, const ExperimentConfig& config);

// "# seed=<seed> config_hash=<hash>"
std::string provenance_line(const Scenario& scenario);

// t_ms,manager,cap,qps_load,lc_config,lc_cores,qos_met,tail_ms,geomean_bips,total_instr,mean_power,over_budget_ms
std::string quanta_csv(const Scenario& scenario, const ExperimentResult& result);
// One row per (manager, cap).
std::string sweep_csv(const Scenario& scenario, const ExperimentResult& result);
nlohmann::json summary_json(const Scenario& scenario, const ExperimentConfig& config,
                            const ExperimentResult& result);

}  // namespace rsched
