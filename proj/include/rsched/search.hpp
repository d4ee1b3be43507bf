#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsched/config_space.hpp"

namespace rsched {

// Configuration index per application (dimension).
using DecisionVector = std::vector<std::size_t>;

// Geometric mean in log space; DomainError for any value <= 0 or empty input.
double geomean(const std::vector<double>& values);

struct Budget {
  double max_power = 0.0;
  double cache_ways = 32.0;
  double qos_ms = 0.0;
};

struct Evaluation {
  double score = 0.0;
  double geomean = 0.0;
  double power = 0.0;
  double cache = 0.0;
  bool feasible = true;
  bool valid = true;  // false: rejected candidate (counted, never selected)
};

using EvalFn = std::function<Evaluation(const DecisionVector&)>;

// Wraps a plain score function.
EvalFn score_function(std::function<double(const DecisionVector&)> fn);

// Penalized objective over per-dimension lookup tables ([dim][conf]).
// score = geomean(bips of dims in the geomean)
//         - penalty_power * max(0, power - max_power)
//         - penalty_cache * max(0, cache - max_cache)
struct TableObjective {
  std::vector<std::vector<double>> bips;
  std::vector<std::vector<double>> power;
  std::vector<std::vector<double>> cache;
  std::vector<bool> in_geomean;
  double max_power = 0.0;
  double max_cache = 32.0;
  double penalty_power = 2.0;
  double penalty_cache = 2.0;
  std::function<bool(const DecisionVector&)> validity;  // optional

  Evaluation operator()(const DecisionVector& x) const;
};

double system_power(const DecisionVector& x, const std::vector<std::vector<double>>& power_table);
double system_cache(const DecisionVector& x, const ConfigSpace& space);

// Cheapest index meeting `qos_ms`: minimal power, then minimal cache, then
// lowest index. nullopt when no index qualifies.
std::optional<std::size_t> lc_config_select(const std::vector<double>& latency,
                                            const std::vector<double>& power,
                                            const std::vector<double>& cache, double qos_ms);

// Inclusive per-dimension bounds; lo == hi fixes a dimension.
struct SearchDomain {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;

  static SearchDomain uniform(std::size_t n_dims, std::size_t n_confs);
  void fix(std::size_t dim, std::size_t value);
  std::size_t dims() const { return lo.size(); }
  bool is_free(std::size_t d) const { return lo[d] < hi[d]; }
  std::vector<std::size_t> free_dims() const;
};

struct SearchLogEntry {
  std::size_t iter = 0;  // 0 = initial points / generation 0
  std::size_t worker = 0;
  Evaluation eval;
};

std::string search_log_csv(const std::vector<SearchLogEntry>& log);

struct SearchResult {
  DecisionVector best;
  Evaluation best_eval;
  bool found_valid = false;
  std::size_t evaluations = 0;          // including initial points
  std::size_t initial_evaluations = 0;
  std::vector<double> best_history;     // best score after init and each iteration
  std::vector<SearchLogEntry> log;      // filled when keep_log is set
};

struct DdsParams {
  std::size_t initial_random_points = 50;
  std::vector<double> r_values{0.2, 0.3, 0.4, 0.5};
  double penalty_wt = 2.0;
  std::size_t points_per_iteration = 10;
  std::size_t max_iter = 40;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  std::vector<DecisionVector> initial_points;  // evaluated after the random ones
  bool keep_log = false;
};

// Perturbation probability for iteration i (1-based).
double dds_probability(std::size_t i, std::size_t max_iter);
// Reflects v into [lo, hi] until inside, then rounds.
std::size_t dds_reflect(double v, double lo, double hi);

SearchResult dds_search(const DdsParams& params, const EvalFn& objective, const SearchDomain& domain);

struct GaParams {
  std::size_t population = 20;
  std::size_t generations = 25;  // including the initial generation
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;   // < 0 -> 1 / (free dims)
  std::size_t tournament = 2;
  std::size_t elitism = 1;
  std::size_t workers = 1;       // independent islands
  std::uint64_t seed = 1;
  std::vector<DecisionVector> initial_points;  // fill the first population slots
  bool keep_log = false;
};

SearchResult ga_search(const GaParams& params, const EvalFn& objective, const SearchDomain& domain);

// Exhaustive argmax with lexicographic tie-break. Refuses (SearchSpaceTooLarge)
// beyond 1e7 points.
SearchResult brute_force(const EvalFn& objective, const SearchDomain& domain);

struct RepairResult {
  DecisionVector x;
  std::vector<std::size_t> turned_off;  // dims, in the order switched off
  double power = 0.0;
};

// Switches batch dims off in descending power (ties: lower dim first) until
// the total power fits. InfeasibleError when even all batch dims off is over.
RepairResult power_repair(const DecisionVector& x, const std::vector<std::vector<double>>& power_table,
                          const std::vector<bool>& is_lc, double max_power);

bool one_step_validity(const DecisionVector& x, const HeteroSpace& hetero, std::size_t n_big,
                       std::size_t n_small);

}  // namespace rsched
