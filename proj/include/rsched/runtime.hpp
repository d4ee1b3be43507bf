#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsched/reconstruct.hpp"
#include "rsched/scenario.hpp"
#include "rsched/search.hpp"

namespace rsched {

enum class ManagerKind {
  cuttlesys,
  two_step,
  one_step,
  core_gating,
  core_gating_waypart,
  asym_oracle,
  asym_fixed_5050,
  no_gating,
};

std::string_view to_string(ManagerKind kind);
ManagerKind manager_from_string(std::string_view name);
bool needs_hetero(ManagerKind kind);

enum class PhaseKind { profile, reconstruct, search, sampling, migration, reconfigure, steady };
std::string_view to_string(PhaseKind kind);

struct Phase {
  PhaseKind kind = PhaseKind::steady;
  double duration_ms = 0.0;
};

struct QuantumPlan {
  std::vector<Phase> phases;
  DecisionVector chosen;             // per batch app
  std::vector<bool> gated;           // per batch app
  std::optional<std::size_t> lc_config;
  std::size_t lc_cores = 0;
};

struct QuantumReport {
  double t_ms = 0.0;
  std::string manager;
  double cap = 0.0;   // at the quantum start
  double load = 0.0;  // at the quantum start
  std::vector<double> instructions;  // per batch app, billions
  double total_instr = 0.0;
  double geomean_bips = 0.0;  // over batch apps that did work
  double mean_power = 0.0;
  double peak_power = 0.0;
  double over_budget_ms = 0.0;
  double over_budget_steady_ms = 0.0;
  bool qos_met = true;
  double tail_ms = 0.0;
  std::optional<std::size_t> lc_config;
  std::size_t lc_cores = 0;

  bool schedule_changed = false;   // load or cap changed inside the quantum
  bool repair_ok = true;           // false: budget unreachable, all batch off
  bool lc_not_found = false;       // no LC config predicted to meet QoS
  bool saturated = false;          // wanted to reclaim a core but none left
  bool fallback = false;           // search found no valid point
  double steady_power = 0.0;       // ground truth at the decision-time load
  double steady_budget = 0.0;
  double steady_cache = 0.0;
  std::size_t search_evaluations = 0;   // excluding initial points
  std::size_t initial_evaluations = 0;
};

struct RuntimeOptions {
  std::size_t workers = 0;  // search workers; 0 -> core count
  CompletionOptions completion;
  std::optional<double> cap_override;
  double guard_band = 0.01;  // fraction of the budget kept free for prediction error
};

// LC core relocation at a quantum boundary: +1 when QoS was missed and no
// config was predicted to meet it, -1 when the tail sat below (1 - slack) * QoS
// with more than the initial cores. `saturated` is set when no batch core is
// left to reclaim.
std::size_t relocate_cores(std::size_t lc_cores, std::size_t lc_initial, std::size_t n_cores, bool qos_met,
                           bool no_feasible_config, double tail_ms, double qos_ms, double slack,
                           bool* saturated = nullptr);

// Apps sorted by big/small speedup (ties by app id); the first n_big go big.
std::vector<bool> greedy_map(const std::vector<double>& big, const std::vector<double>& small,
                             const std::vector<std::string>& ids, std::size_t n_big);

// Core-gating order: descending power, except that the last core switched off
// is the one that closes the gap with the smallest slack. Returns the gated
// positions in order.
std::vector<std::size_t> core_gating_select(const std::vector<double>& powers, double fixed_power, double budget);

// Simulates a scenario quantum by quantum under one manager.
class Runtime {
 public:
  Runtime(const Scenario& scenario, ManagerKind kind, RuntimeOptions options = {});
  ~Runtime();
  Runtime(Runtime&&) noexcept;

  std::pair<QuantumPlan, QuantumReport> step();
  double now_ms() const;
  std::size_t lc_cores() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<QuantumReport> run_timeline(const Scenario& scenario, ManagerKind kind, double duration_ms,
                                        const RuntimeOptions& options = {});

}  // namespace rsched
