#include "rsched/search.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "rsched/error.hpp"
#include "rsched/rng.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

double geomean(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("geomean of an empty set");
  double s = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw DomainError("geomean needs positive values, got " + format_roundtrip(v));
    s += std::log(v);
  }
  return std::exp(s / static_cast<double>(values.size()));
}

EvalFn score_function(std::function<double(const DecisionVector&)> fn) {
  return [fn = std::move(fn)](const DecisionVector& x) {
    Evaluation e;
    e.score = fn(x);
    e.geomean = e.score;
    return e;
  };
}

Evaluation TableObjective::operator()(const DecisionVector& x) const {
  Evaluation e;
  if (validity && !validity(x)) {
    e.valid = false;
    e.feasible = false;
    e.score = -std::numeric_limits<double>::infinity();
    return e;
  }
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    e.power += power[d][x[d]];
    e.cache += cache[d][x[d]];
    if (!in_geomean[d]) continue;
    const double b = bips[d][x[d]];
    if (!(b > 0.0)) throw DomainError("geomean needs positive values, got " + format_roundtrip(b));
    log_sum += std::log(b);
    ++count;
  }
  e.geomean = count ? std::exp(log_sum / static_cast<double>(count)) : 0.0;
  const double over_power = std::max(0.0, e.power - max_power);
  const double over_cache = std::max(0.0, e.cache - max_cache);
  e.feasible = over_power == 0.0 && over_cache == 0.0;
  e.score = e.geomean - penalty_power * over_power - penalty_cache * over_cache;
  return e;
}

double system_power(const DecisionVector& x, const std::vector<std::vector<double>>& power_table) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += power_table[d][x[d]];
  return s;
}

double system_cache(const DecisionVector& x, const ConfigSpace& space) {
  double s = 0.0;
  for (std::size_t i : x) s += space.cache_ways_of(i);
  return s;
}

std::optional<std::size_t> lc_config_select(const std::vector<double>& latency,
                                            const std::vector<double>& power,
                                            const std::vector<double>& cache, double qos_ms) {
  if (latency.size() != power.size() || latency.size() != cache.size())
    throw DomainError("prediction tables differ in length");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < latency.size(); ++i) {
    if (!(latency[i] <= qos_ms)) continue;
    if (!best || power[i] < power[*best] || (power[i] == power[*best] && cache[i] < cache[*best])) best = i;
  }
  return best;
}

SearchDomain SearchDomain::uniform(std::size_t n_dims, std::size_t n_confs) {
  if (n_confs == 0) throw DomainError("search needs at least one configuration");
  return {std::vector<std::size_t>(n_dims, 0), std::vector<std::size_t>(n_dims, n_confs - 1)};
}

void SearchDomain::fix(std::size_t dim, std::size_t value) {
  lo.at(dim) = value;
  hi.at(dim) = value;
}

std::vector<std::size_t> SearchDomain::free_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < dims(); ++d)
    if (is_free(d)) out.push_back(d);
  return out;
}

std::string search_log_csv(const std::vector<SearchLogEntry>& log) {
  std::string out = "iter,worker,score,power,cache,feasible\n";
  for (const auto& e : log)
    out += std::to_string(e.iter) + "," + std::to_string(e.worker) + "," + format_roundtrip(e.eval.score) + "," +
           format_roundtrip(e.eval.power) + "," + format_roundtrip(e.eval.cache) + "," +
           (e.eval.feasible ? "1" : "0") + "\n";
  return out;
}

double dds_probability(std::size_t i, std::size_t max_iter) {
  if (max_iter <= 1) return 1.0;
  return 1.0 - std::log(static_cast<double>(i)) / std::log(static_cast<double>(max_iter));
}

std::size_t dds_reflect(double v, double lo, double hi) {
  if (hi <= lo) return static_cast<std::size_t>(lo);
  while (v < lo || v > hi) {
    if (v > hi) v = 2.0 * hi - v;
    if (v < lo) v = 2.0 * lo - v;
  }
  return static_cast<std::size_t>(std::clamp(std::round(v), lo, hi));
}

namespace {

bool improves(const Evaluation& candidate, bool have_best, const Evaluation& best) {
  return candidate.valid && (!have_best || candidate.score > best.score);
}

DecisionVector random_point(const SearchDomain& domain, Rng& rng) {
  DecisionVector x(domain.dims());
  for (std::size_t d = 0; d < domain.dims(); ++d)
    x[d] = domain.is_free(d) ? domain.lo[d] + rng.below(domain.hi[d] - domain.lo[d] + 1) : domain.lo[d];
  return x;
}

DecisionVector clamp_point(DecisionVector x, const SearchDomain& domain) {
  if (x.size() != domain.dims()) throw DomainError("initial point has wrong dimension");
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], domain.lo[d], domain.hi[d]);
  return x;
}

std::size_t thread_count(std::size_t workers) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::min(workers, hw);
}

// Records the first exception thrown by any worker.
struct ErrorSlot {
  std::mutex mu;
  std::exception_ptr error;
  void capture() {
    std::lock_guard lock(mu);
    if (!error) error = std::current_exception();
  }
  void rethrow() {
    if (error) std::rethrow_exception(error);
  }
};

}  // namespace

SearchResult dds_search(const DdsParams& params, const EvalFn& objective, const SearchDomain& domain) {
  if (domain.dims() == 0) throw DomainError("search needs at least one dimension");
  if (params.workers == 0) throw DomainError("workers must be at least 1");
  if (params.r_values.empty()) throw DomainError("r_values must not be empty");
  SearchResult res;

  auto consider = [&](const DecisionVector& x, const Evaluation& e, std::size_t iter, std::size_t worker) {
    ++res.evaluations;
    if (params.keep_log) res.log.push_back({iter, worker, e});
    if (res.best.empty() || improves(e, res.found_valid, res.best_eval)) {
      res.best = x;
      res.best_eval = e;
      res.found_valid = e.valid;
    }
  };

  Rng init_rng(params.seed, 77);
  for (std::size_t k = 0; k < params.initial_random_points; ++k) {
    const auto x = random_point(domain, init_rng);
    consider(x, objective(x), 0, 0);
  }
  for (const auto& p : params.initial_points) {
    const auto x = clamp_point(p, domain);
    consider(x, objective(x), 0, 0);
  }
  if (res.best.empty()) {
    const auto x = clamp_point(DecisionVector(domain.lo), domain);
    consider(x, objective(x), 0, 0);
  }
  res.initial_evaluations = res.evaluations;
  res.best_history.push_back(res.best_eval.score);

  const auto free = domain.free_dims();
  if (free.empty() || params.max_iter == 0) return res;

  const std::size_t W = params.workers;
  struct WorkerOut {
    bool has = false;
    DecisionVector x;
    Evaluation e;
    std::vector<SearchLogEntry> log;
  };
  std::vector<WorkerOut> outs(W);
  std::vector<Rng> rngs;
  for (std::size_t w = 0; w < W; ++w) rngs.emplace_back(params.seed, 1000 + w);
  std::size_t iter = 1;
  ErrorSlot errors;

  auto run_worker = [&](std::size_t w) {
    try {
      auto& out = outs[w];
      auto& rng = rngs[w];
      out = WorkerOut{};
      const std::size_t group = std::min(w * params.r_values.size() / W, params.r_values.size() - 1);
      const double r = params.r_values[group];
      const double p = dds_probability(iter, params.max_iter);
      std::vector<std::size_t> selected;
      DecisionVector local = res.best;
      Evaluation local_eval = res.best_eval;
      bool local_valid = res.found_valid;
      for (std::size_t pt = 0; pt < params.points_per_iteration; ++pt) {
        DecisionVector cand = local;
        selected.clear();
        for (std::size_t d : free)
          if (rng.bernoulli(p)) selected.push_back(d);
        if (selected.empty()) selected.push_back(free[rng.below(free.size())]);
        for (std::size_t d : selected) {
          const double lo = static_cast<double>(domain.lo[d]);
          const double hi = static_cast<double>(domain.hi[d]);
          const double width = hi - lo + 1.0;
          const double cur = static_cast<double>(cand[d]);
          std::size_t next = dds_reflect(cur + r * width * rng.normal(), lo, hi);
          if (next == cand[d]) next = dds_reflect(cur + r * width * rng.normal(), lo, hi);
          cand[d] = next;
        }
        const Evaluation e = objective(cand);
        if (params.keep_log) out.log.push_back({iter, w, e});
        if (improves(e, local_valid, local_eval)) {
          out.has = true;
          out.x = cand;
          out.e = e;
          local = std::move(cand);
          local_eval = e;
          local_valid = true;
        }
      }
    } catch (...) {
      errors.capture();
    }
  };

  // Worker 0's role: fold the local bests into the shared best (ties go to
  // the lowest worker) before the next iteration starts.
  auto reduce = [&]() noexcept {
    for (std::size_t w = 0; w < W; ++w) {
      res.evaluations += params.points_per_iteration;
      if (params.keep_log) res.log.insert(res.log.end(), outs[w].log.begin(), outs[w].log.end());
      if (outs[w].has && improves(outs[w].e, res.found_valid, res.best_eval)) {
        res.best = outs[w].x;
        res.best_eval = outs[w].e;
        res.found_valid = true;
      }
    }
    res.best_history.push_back(res.best_eval.score);
    ++iter;
  };

  const std::size_t T = thread_count(W);
  if (T == 1) {
    for (std::size_t i = 1; i <= params.max_iter; ++i) {
      for (std::size_t w = 0; w < W; ++w) run_worker(w);
      reduce();
      errors.rethrow();
    }
    return res;
  }
  std::barrier sync(static_cast<std::ptrdiff_t>(T), reduce);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < T; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = 1; i <= params.max_iter; ++i) {
        for (std::size_t w = t; w < W; w += T) run_worker(w);
        sync.arrive_and_wait();
      }
    });
  for (auto& th : threads) th.join();
  errors.rethrow();
  return res;
}

SearchResult ga_search(const GaParams& params, const EvalFn& objective, const SearchDomain& domain) {
  if (domain.dims() == 0) throw DomainError("search needs at least one dimension");
  if (params.workers == 0 || params.population == 0 || params.generations == 0)
    throw DomainError("GA needs workers, population and generations >= 1");
  const auto free = domain.free_dims();
  const double mutation =
      params.mutation_rate >= 0.0 ? params.mutation_rate : (free.empty() ? 0.0 : 1.0 / static_cast<double>(free.size()));
  const std::size_t W = params.workers;
  std::vector<SearchResult> islands(W);
  ErrorSlot errors;

  auto run_island = [&](std::size_t w) {
    try {
      Rng rng(params.seed, 5000 + w);
      auto& res = islands[w];
      std::vector<DecisionVector> pop;
      for (const auto& p : params.initial_points)
        if (pop.size() < params.population) pop.push_back(clamp_point(p, domain));
      while (pop.size() < params.population) pop.push_back(random_point(domain, rng));
      std::vector<Evaluation> fit(pop.size());

      auto evaluate_all = [&](std::size_t gen) {
        for (std::size_t k = 0; k < pop.size(); ++k) {
          fit[k] = objective(pop[k]);
          ++res.evaluations;
          if (params.keep_log) res.log.push_back({gen, w, fit[k]});
          if (res.best.empty() || improves(fit[k], res.found_valid, res.best_eval)) {
            res.best = pop[k];
            res.best_eval = fit[k];
            res.found_valid = fit[k].valid;
          }
        }
        res.best_history.push_back(res.best_eval.score);
      };
      auto better = [&](std::size_t a, std::size_t b) {
        if (fit[a].valid != fit[b].valid) return fit[a].valid;
        return fit[a].score > fit[b].score;
      };
      auto tournament = [&]() {
        std::size_t best = rng.below(pop.size());
        for (std::size_t t = 1; t < params.tournament; ++t) {
          const std::size_t c = rng.below(pop.size());
          if (better(c, best)) best = c;
        }
        return best;
      };

      evaluate_all(0);
      res.initial_evaluations = res.evaluations;
      for (std::size_t g = 1; g < params.generations; ++g) {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), better);
        std::vector<DecisionVector> next;
        for (std::size_t e = 0; e < std::min(params.elitism, pop.size()); ++e) next.push_back(pop[order[e]]);
        while (next.size() < params.population) {
          DecisionVector child = pop[tournament()];
          const DecisionVector& other = pop[tournament()];
          if (rng.bernoulli(params.crossover_rate))
            for (std::size_t d : free)
              if (rng.bernoulli(0.5)) child[d] = other[d];
          for (std::size_t d : free)
            if (rng.bernoulli(mutation)) child[d] = domain.lo[d] + rng.below(domain.hi[d] - domain.lo[d] + 1);
          next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate_all(g);
      }
    } catch (...) {
      errors.capture();
    }
  };

  const std::size_t T = thread_count(W);
  if (T == 1) {
    for (std::size_t w = 0; w < W; ++w) run_island(w);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < T; ++t)
      threads.emplace_back([&, t] {
        for (std::size_t w = t; w < W; w += T) run_island(w);
      });
    for (auto& th : threads) th.join();
  }
  errors.rethrow();

  SearchResult out;
  for (std::size_t w = 0; w < W; ++w) {
    auto& isl = islands[w];
    out.evaluations += isl.evaluations;
    out.initial_evaluations += isl.initial_evaluations;
    if (params.keep_log) out.log.insert(out.log.end(), isl.log.begin(), isl.log.end());
    if (out.best.empty() || (isl.found_valid && (!out.found_valid || isl.best_eval.score > out.best_eval.score))) {
      out.best = isl.best;
      out.best_eval = isl.best_eval;
      out.found_valid = isl.found_valid;
    }
  }
  // Best-so-far across islands, generation by generation.
  for (std::size_t g = 0; g < params.generations; ++g) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& isl : islands) v = std::max(v, isl.best_history[g]);
    out.best_history.push_back(v);
  }
  return out;
}

SearchResult brute_force(const EvalFn& objective, const SearchDomain& domain) {
  if (domain.dims() == 0) throw DomainError("search needs at least one dimension");
  double total = 1.0;
  for (std::size_t d = 0; d < domain.dims(); ++d) total *= static_cast<double>(domain.hi[d] - domain.lo[d] + 1);
  if (total > 1e7) throw SearchSpaceTooLarge("brute force refuses " + format_roundtrip(total) + " points");
  SearchResult res;
  DecisionVector x(domain.lo);
  while (true) {
    const Evaluation e = objective(x);
    ++res.evaluations;
    if (res.best.empty() || improves(e, res.found_valid, res.best_eval)) {
      res.best = x;
      res.best_eval = e;
      res.found_valid = e.valid;
    }
    std::size_t d = domain.dims();
    while (d > 0) {
      --d;
      if (x[d] < domain.hi[d]) {
        ++x[d];
        break;
      }
      x[d] = domain.lo[d];
      if (d == 0) {
        res.best_history.push_back(res.best_eval.score);
        return res;
      }
    }
  }
}

RepairResult power_repair(const DecisionVector& x, const std::vector<std::vector<double>>& power_table,
                          const std::vector<bool>& is_lc, double max_power) {
  RepairResult out;
  out.x = x;
  out.power = system_power(x, power_table);
  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < x.size(); ++d)
    if (!is_lc[d]) order.push_back(d);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return power_table[a][x[a]] > power_table[b][x[b]];
  });
  for (std::size_t d : order) {
    if (out.power <= max_power) break;
    out.power -= power_table[d][x[d]];
    out.turned_off.push_back(d);
  }
  if (out.power > max_power) throw InfeasibleError("power budget unreachable with every batch core off");
  return out;
}

bool one_step_validity(const DecisionVector& x, const HeteroSpace& hetero, std::size_t n_big,
                       std::size_t n_small) {
  std::size_t big = 0;
  std::size_t small = 0;
  for (std::size_t i : x) {
    if (hetero.big_range.contains(i)) ++big;
    else if (hetero.small_range.contains(i)) ++small;
  }
  return big <= n_big && small <= n_small;
}

}  // namespace rsched
