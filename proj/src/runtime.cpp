#include "rsched/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsched/error.hpp"
#include "rsched/rng.hpp"
#include "rsched/sampling.hpp"
#include "rsched/surrogate.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

std::string_view to_string(ManagerKind kind) {
  switch (kind) {
    case ManagerKind::cuttlesys: return "cuttlesys";
    case ManagerKind::two_step: return "two_step";
    case ManagerKind::one_step: return "one_step";
    case ManagerKind::core_gating: return "core_gating";
    case ManagerKind::core_gating_waypart: return "core_gating_waypart";
    case ManagerKind::asym_oracle: return "asym_oracle";
    case ManagerKind::asym_fixed_5050: return "asym_fixed_5050";
    case ManagerKind::no_gating: return "no_gating";
  }
  return "unknown";
}

ManagerKind manager_from_string(std::string_view name) {
  for (auto k : {ManagerKind::cuttlesys, ManagerKind::two_step, ManagerKind::one_step, ManagerKind::core_gating,
                 ManagerKind::core_gating_waypart, ManagerKind::asym_oracle, ManagerKind::asym_fixed_5050,
                 ManagerKind::no_gating})
    if (to_string(k) == name) return k;
  throw DomainError("unknown manager '" + std::string(name) + "'");
}

bool needs_hetero(ManagerKind kind) { return kind == ManagerKind::two_step || kind == ManagerKind::one_step; }

std::string_view to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::profile: return "profile";
    case PhaseKind::reconstruct: return "reconstruct";
    case PhaseKind::search: return "search";
    case PhaseKind::sampling: return "sampling";
    case PhaseKind::migration: return "migration";
    case PhaseKind::reconfigure: return "reconfigure";
    case PhaseKind::steady: return "steady";
  }
  return "unknown";
}

std::size_t relocate_cores(std::size_t lc_cores, std::size_t lc_initial, std::size_t n_cores, bool qos_met,
                           bool no_feasible_config, double tail_ms, double qos_ms, double slack,
                           bool* saturated) {
  if (saturated) *saturated = false;
  if (!qos_met && no_feasible_config) {
    // Keep at least one core for the batch apps.
    if (lc_cores + 1 >= n_cores) {
      if (saturated) *saturated = true;
      return lc_cores;
    }
    return lc_cores + 1;
  }
  if (qos_met && tail_ms <= (1.0 - slack) * qos_ms && lc_cores > lc_initial) return lc_cores - 1;
  return lc_cores;
}

std::vector<bool> greedy_map(const std::vector<double>& big, const std::vector<double>& small,
                             const std::vector<std::string>& ids, std::size_t n_big) {
  if (big.size() != small.size() || big.size() != ids.size()) throw DomainError("greedy_map inputs differ in length");
  std::vector<std::size_t> order(big.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = big[a] / small[a];
    const double rb = big[b] / small[b];
    if (ra != rb) return ra > rb;
    return ids[a] < ids[b];
  });
  std::vector<bool> out(big.size(), false);
  for (std::size_t k = 0; k < std::min(n_big, order.size()); ++k) out[order[k]] = true;
  return out;
}

std::vector<std::size_t> core_gating_select(const std::vector<double>& powers, double fixed_power, double budget) {
  std::vector<std::size_t> gated;
  std::vector<bool> off(powers.size(), false);
  double total = fixed_power + std::accumulate(powers.begin(), powers.end(), 0.0);
  while (total > budget) {
    const double excess = total - budget;
    std::optional<std::size_t> closer;  // gating it alone closes the gap, smallest slack
    std::optional<std::size_t> largest;
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (off[i]) continue;
      if (powers[i] >= excess && (!closer || powers[i] < powers[*closer])) closer = i;
      if (!largest || powers[i] > powers[*largest]) largest = i;
    }
    if (!largest) break;
    const std::size_t pick = closer ? *closer : *largest;
    off[pick] = true;
    gated.push_back(pick);
    total -= powers[pick];
  }
  return gated;
}

namespace {

struct BatchAssign {
  std::size_t index = 0;
  bool gated = false;
  bool working = true;
  double ways = -1.0;  // < 0: the index's own cache option
  double share = 1.0;  // time-multiplexing share of a core
};

struct LcAssign {
  std::size_t index = 0;
  std::size_t cores = 0;
  double ways = -1.0;
};

struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  PhaseKind phase = PhaseKind::steady;
  std::vector<BatchAssign> batch;
  std::optional<LcAssign> lc;
};

struct Accum {
  std::vector<double> instr;
  double energy = 0.0;  // watt * ms
  double peak = 0.0;
  double over = 0.0;
  double over_steady = 0.0;
  std::vector<std::pair<double, double>> latency;  // (ms, request weight)
};

double tail_p99(std::vector<std::pair<double, double>> pieces) {
  double total = 0.0;
  for (const auto& p : pieces) total += p.second;
  if (total <= 0.0) return 0.0;
  std::sort(pieces.begin(), pieces.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double acc = 0.0;
  for (const auto& [lat, w] : pieces) {
    acc += w;
    if (acc >= 0.01 * total) return lat;
  }
  return pieces.back().first;
}

// Instructions and power with predicted tables for one batch app.
struct Predictions {
  std::vector<std::vector<double>> bips;   // [app][index]
  std::vector<std::vector<double>> power;  // [app][index], cache-independent
  double lc_power = 0.0;                   // LC service total at its chosen config
};

}  // namespace

struct Runtime::Impl {
  Scenario s;
  ManagerKind kind;
  RuntimeOptions options;
  double t = 0.0;
  std::size_t q = 0;
  std::size_t nb = 0;
  const AppProfile* lc = nullptr;

  std::vector<BatchAssign> prev_batch;
  std::optional<LcAssign> prev_lc;
  std::size_t lc_cores = 0;
  bool last_met = true;
  bool last_not_found = false;
  double last_tail = 0.0;

  // CuttleSys observation store.
  std::vector<std::map<std::size_t, double>> bips_obs;
  std::vector<std::map<std::size_t, double>> power_obs;
  std::map<std::size_t, std::pair<double, double>> lc_lat_obs;  // index -> (ms, rho)
  std::map<std::size_t, std::pair<double, double>> lc_pow_obs;  // core -> (W per core, rho)

  Impl(const Scenario& scenario, ManagerKind k, RuntimeOptions o) : s(scenario), kind(k), options(std::move(o)) {
    if (needs_hetero(kind) && !s.hetero())
      throw DomainError(std::string(to_string(kind)) + " needs a heterogeneous scenario");
    if (!needs_hetero(kind) && kind != ManagerKind::no_gating && s.hetero())
      throw DomainError(std::string(to_string(kind)) + " needs a homogeneous scenario");
    if (s.apps.empty()) throw DomainError("scenario has no applications");
    if (!(s.quantum_ms > 0.0)) throw DomainError("quantum must be positive");
    nb = s.batch_count();
    lc = s.lc_app();
    if (nb == 0) throw DomainError("scenario has no batch applications");
    if (s.hetero() && lc) throw DomainError("heterogeneous scenarios are batch-only");
    if (s.hetero() && nb != s.n_cores) throw DomainError("heterogeneous scenarios run one app per core");
    if (lc && (s.lc_initial_cores == 0 || s.lc_initial_cores >= s.n_cores))
      throw DomainError("LC service needs between 1 and n_cores - 1 cores");
    if (options.workers == 0) options.workers = s.n_cores;
    lc_cores = lc ? s.lc_initial_cores : 0;
    bips_obs.resize(nb);
    power_obs.resize(nb);
    // Before the first decision: batch apps on the narrowest core with 1 way,
    // the LC service on the widest.
    const std::size_t one_way = cache_index_near(1.0);
    for (std::size_t i = 0; i < nb; ++i) {
      BatchAssign b;
      b.index = s.space.index_of(s.space.narrowest_core(), one_way);
      prev_batch.push_back(b);
    }
    if (lc) prev_lc = LcAssign{s.space.index_of(s.space.widest_core(), one_way), lc_cores, -1.0};
  }

  std::size_t cache_index_near(double ways) const {
    const auto& opts = s.space.cache_options();
    std::size_t best = 0;
    for (std::size_t k = 1; k < opts.size(); ++k)
      if (std::abs(opts[k] - ways) < std::abs(opts[best] - ways)) best = k;
    return best;
  }

  double cap_at(double time) const { return options.cap_override ? *options.cap_override : s.power_cap.at(time); }
  double load_at(double time) const { return lc ? s.load.at(time) : 0.0; }
  double rho(double load, std::size_t cores) const {
    if (!lc || cores == 0) return 0.0;
    return std::min(1.0, load * static_cast<double>(s.lc_initial_cores) / static_cast<double>(cores));
  }
  double share() const {
    const std::size_t batch_cores = s.n_cores - lc_cores;
    return std::min(1.0, static_cast<double>(batch_cores) / static_cast<double>(nb));
  }

  // ---- ground truth helpers ----------------------------------------------

  double true_bips(std::size_t app, const BatchAssign& b) const {
    const auto& a = s.apps[app];
    if (b.ways < 0.0) return a.bips[b.index];
    return bips_at_ways(a, s.space, s.space.core_of(b.index), b.ways);
  }

  double true_batch_power(std::size_t app, const BatchAssign& b) const {
    if (b.gated) return 0.0;
    return b.share * s.apps[app].watts_at(s.space.core_of(b.index));
  }

  double true_lc_power(const LcAssign& l, double load) const {
    return static_cast<double>(l.cores) * lc->watts_at(s.space.core_of(l.index), rho(load, l.cores));
  }

  double true_lc_latency(const LcAssign& l, double load) const {
    const double r = rho(load, l.cores);
    if (l.ways < 0.0) return lc->latency_at(l.index, r);
    return latency_at_ways(*lc, s.space, s.space.core_of(l.index), l.ways, r);
  }

  double plan_true_power(const std::vector<BatchAssign>& batch, const std::optional<LcAssign>& l, double load) const {
    double p = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) p += true_batch_power(i, batch[i]);
    if (l) p += true_lc_power(*l, load);
    return p;
  }

  // ---- integration --------------------------------------------------------

  void integrate(const Segment& seg, Accum& acc) const {
    std::vector<double> cuts{seg.t0};
    for (double c : s.load.change_points(seg.t0, seg.t1)) cuts.push_back(c);
    if (!options.cap_override)
      for (double c : s.power_cap.change_points(seg.t0, seg.t1)) cuts.push_back(c);
    cuts.push_back(seg.t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = cuts[k + 1];
      const double dt = b - a;
      if (dt <= 0.0) continue;
      const double load = load_at(a);
      double power = 0.0;
      for (std::size_t i = 0; i < seg.batch.size(); ++i) {
        const auto& ba = seg.batch[i];
        if (ba.gated) continue;
        power += true_batch_power(i, ba);
        if (ba.working) acc.instr[i] += ba.share * true_bips(i, ba) * dt / 1000.0;
      }
      if (seg.lc) {
        power += true_lc_power(*seg.lc, load);
        acc.latency.emplace_back(true_lc_latency(*seg.lc, load), load * dt);
      }
      acc.energy += power * dt;
      acc.peak = std::max(acc.peak, power);
      if (power > cap_at(a) * s.max_power * (1.0 + 1e-12)) {
        acc.over += dt;
        if (seg.phase == PhaseKind::steady) acc.over_steady += dt;
      }
    }
  }

  // ---- shared decision helpers -------------------------------------------

  bool same_class(std::size_t a, std::size_t b) const {
    return s.space.class_of_core(s.space.core_of(a)) == s.space.class_of_core(s.space.core_of(b));
  }

  double pred_power(const Predictions& p, const DecisionVector& x, const std::vector<bool>& gated) const {
    double w = p.lc_power;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!gated[i]) w += p.power[i][x[i]];
    return w;
  }

  double plan_cache(const DecisionVector& x, const std::vector<bool>& gated, const std::optional<LcAssign>& l) const {
    double c = l ? s.space.cache_ways_of(l->index) : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!gated[i]) c += s.space.cache_ways_of(x[i]);
    return c;
  }

  // Cheapest single-app downgrade (predicted log-throughput lost per unit of
  // power or cache saved) that never increases the other resource.
  bool downgrade_step(const Predictions& p, DecisionVector& x, const std::vector<bool>& gated, bool for_cache) const {
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_app = 0, best_idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (gated[i]) continue;
      const std::size_t cur = x[i];
      const double pc = p.power[i][cur];
      const double cc = s.space.cache_ways_of(cur);
      const double bc = std::log(std::max(p.bips[i][cur], 1e-9));
      for (std::size_t y = 0; y < s.space.size(); ++y) {
        if (y == cur || !same_class(y, cur)) continue;
        const double py = p.power[i][y];
        const double cy = s.space.cache_ways_of(y);
        double gain = 0.0;
        if (for_cache) {
          if (!(cy < cc) || py > pc) continue;
          gain = cc - cy;
        } else {
          if (!(py < pc) || cy > cc) continue;
          gain = pc - py;
        }
        const double cost = (bc - std::log(std::max(p.bips[i][y], 1e-9))) / gain;
        if (cost < best_cost) {
          best_cost = cost;
          best_app = i;
          best_idx = y;
          found = true;
        }
      }
    }
    if (found) x[best_app] = best_idx;
    return found;
  }

  // Brings a searched plan within the cache and (guarded) power budgets using
  // the predictions, then checks the chip power meter at steady-state entry.
  void repair_plan(const Predictions& p, DecisionVector& x, std::vector<bool>& gated, const std::optional<LcAssign>& l,
                   double load0, double budget, QuantumReport& rep) const {
    const double guarded = budget * (1.0 - options.guard_band);
    while (plan_cache(x, gated, l) > s.cache_ways && downgrade_step(p, x, gated, true)) {
    }
    while (pred_power(p, x, gated) > guarded && downgrade_step(p, x, gated, false)) {
    }
    if (pred_power(p, x, gated) > guarded) {
      std::vector<std::vector<double>> table;
      DecisionVector full;
      std::vector<bool> is_lc;
      for (std::size_t i = 0; i < x.size(); ++i) {
        table.push_back({gated[i] ? 0.0 : p.power[i][x[i]]});
        full.push_back(0);
        is_lc.push_back(false);
      }
      table.push_back({p.lc_power});
      full.push_back(0);
      is_lc.push_back(true);
      try {
        for (std::size_t d : power_repair(full, table, is_lc, guarded).turned_off) gated[d] = true;
      } catch (const InfeasibleError&) {
        std::fill(gated.begin(), gated.end(), true);
        rep.repair_ok = false;
      }
    }
    // Power meter check with the real draw at the decision-time load.
    auto meter = [&] { return plan_true_power(to_assign(x, gated), l, load0); };
    while (meter() > budget) {
      if (downgrade_step(p, x, gated, false)) continue;
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!gated[i] && (!pick || p.power[i][x[i]] > p.power[*pick][x[*pick]])) pick = i;
      if (!pick) {
        rep.repair_ok = false;
        break;
      }
      gated[*pick] = true;
    }
  }

  std::vector<BatchAssign> to_assign(const DecisionVector& x, const std::vector<bool>& gated) const {
    std::vector<BatchAssign> out(x.size());
    const double sh = share();
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i].index = x[i];
      out[i].gated = gated[i];
      out[i].share = sh;
    }
    return out;
  }

  std::vector<BatchAssign> with_share(std::vector<BatchAssign> v) const {
    const double sh = share();
    for (auto& b : v) b.share = sh;
    return v;
  }

  Segment segment(double t0, double t1, PhaseKind phase, std::vector<BatchAssign> batch, std::optional<LcAssign> l) const {
    return Segment{t0, t1, phase, std::move(batch), l};
  }

  void fill_steady(QuantumReport& rep, const std::vector<BatchAssign>& batch, const std::optional<LcAssign>& l,
                   double load0, double cache) const {
    rep.steady_power = plan_true_power(batch, l, load0);
    rep.steady_budget = cap_at(t) * s.max_power;
    rep.steady_cache = cache;
  }

  // ---- CuttleSys -----------------------------------------------------------

  void cuttlesys(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs) {
    const auto& c = s.costs;
    const double T = s.quantum_ms;
    const double overhead = c.profile_ms + c.reconstruct_ms + c.dds_ms;
    if (overhead >= T) throw DomainError("management phases exceed the quantum");
    const std::size_t cores_before = lc_cores;
    if (lc && q > 0)
      lc_cores = relocate_cores(lc_cores, s.lc_initial_cores, s.n_cores, last_met, last_not_found, last_tail, s.qos_ms,
                                s.qos_slack, &rep.saturated);
    const double sh = share();
    const double load0 = load_at(t);
    const double rho0 = rho(load0, lc_cores);
    if (prev_lc) prev_lc->cores = lc_cores;
    auto prev = with_share(prev_batch);

    // Profiling: every core sampled at the widest and narrowest core config with 1 way.
    Rng rng(s.seed, 0x5A0000 + q);
    const std::size_t one_way = cache_index_near(1.0);
    const std::size_t high = s.space.index_of(s.space.widest_core(), one_way);
    const std::size_t low = s.space.index_of(s.space.narrowest_core(), one_way);
    std::vector<const AppProfile*> ptrs;
    std::vector<double> loads;
    for (std::size_t i = 0; i < nb; ++i) {
      ptrs.push_back(&s.apps[i]);
      loads.push_back(0.0);
    }
    if (lc) {
      ptrs.push_back(lc);
      loads.push_back(rho0);
    }
    const auto pp = profile_pair(ptrs, s.space, high, low, s.noise, rng, loads);
    const double ms = c.profile_ms / 2.0;
    for (int half = 0; half < 2; ++half) {
      auto batch = prev;
      for (std::size_t i = 0; i < nb; ++i) {
        batch[i].index = pp.schedule[i][static_cast<std::size_t>(half)];
        batch[i].gated = false;
        batch[i].working = true;
      }
      segs.push_back(segment(t + ms * half, t + ms * (half + 1), PhaseKind::profile, batch, prev_lc));
    }
    for (std::size_t i = 0; i < nb; ++i)
      for (int k = 0; k < 2; ++k) {
        const auto& smp = pp.samples[2 * i + static_cast<std::size_t>(k)];
        bips_obs[i][smp.config_index] = smp.bips;
        power_obs[i][s.space.core_of(smp.config_index)] = smp.watts;
      }
    if (lc)
      for (int k = 0; k < 2; ++k) {
        const auto& smp = pp.samples[2 * nb + static_cast<std::size_t>(k)];
        lc_lat_obs[smp.config_index] = {*smp.latency_ms, rho0};
        lc_pow_obs[s.space.core_of(smp.config_index)] = {smp.watts, rho0};
      }
    segs.push_back(segment(t + c.profile_ms, t + c.profile_ms + c.reconstruct_ms, PhaseKind::reconstruct, prev, prev_lc));
    segs.push_back(segment(t + c.profile_ms + c.reconstruct_ms, t + overhead, PhaseKind::search, prev, prev_lc));

    // Reconstruction.
    ActiveObservations obs;
    obs.batch_apps = nb;
    for (std::size_t i = 0; i < nb; ++i) {
      obs.throughput.emplace_back(bips_obs[i].begin(), bips_obs[i].end());
      obs.power.emplace_back(power_obs[i].begin(), power_obs[i].end());
    }
    if (lc) {
      std::vector<std::pair<std::size_t, double>> lat, pw;
      for (const auto& [idx, v] : lc_lat_obs)
        if (std::abs(v.second - rho0) <= 0.02) lat.emplace_back(idx, v.first);
      for (const auto& [core, v] : lc_pow_obs)
        if (std::abs(v.second - rho0) <= 0.02) pw.emplace_back(core, v.first);
      obs.power.push_back(pw);
      obs.latency.push_back(lat);
      obs.lc_load.push_back(rho0);
    }
    const auto rec = run_three_reconstructions(s.space, s.training, obs, options.completion, c.reconstruct_ms);

    Predictions pred;
    for (std::size_t i = 0; i < nb; ++i) {
      std::vector<double> b(s.space.size()), w(s.space.size());
      for (std::size_t idx = 0; idx < s.space.size(); ++idx) {
        b[idx] = sh * rec.throughput[i][idx];
        w[idx] = sh * rec.power[i][s.space.core_of(idx)];
      }
      pred.bips.push_back(std::move(b));
      pred.power.push_back(std::move(w));
    }

    // LC configuration.
    std::optional<LcAssign> lc_plan;
    std::vector<double> lc_power_idx;
    if (lc) {
      const auto& lat = rec.latency.front();
      std::vector<double> cache(s.space.size());
      lc_power_idx.resize(s.space.size());
      for (std::size_t idx = 0; idx < s.space.size(); ++idx) {
        lc_power_idx[idx] = static_cast<double>(lc_cores) * rec.power[nb][s.space.core_of(idx)];
        cache[idx] = s.space.cache_ways_of(idx);
      }
      auto pick = lc_config_select(lat, lc_power_idx, cache, s.qos_ms);
      if (!pick) {
        rep.lc_not_found = true;
        std::size_t best = 0;
        for (std::size_t idx = 1; idx < lat.size(); ++idx)
          if (lat[idx] < lat[best] || (lat[idx] == lat[best] && lc_power_idx[idx] < lc_power_idx[best])) best = idx;
        pick = best;
      } else if (q > 0 && !last_met && prev_lc && *pick == prev_lc->index && lc_cores == cores_before) {
        // Same allocation after a miss: move to a config predicted faster, else ask for a core.
        std::optional<std::size_t> up;
        for (std::size_t idx = 0; idx < lat.size(); ++idx) {
          if (lat[idx] > s.qos_ms || !(lat[idx] < lat[prev_lc->index])) continue;
          if (!up || lc_power_idx[idx] < lc_power_idx[*up]) up = idx;
        }
        if (up)
          pick = up;
        else
          rep.lc_not_found = true;
      }
      lc_plan = LcAssign{*pick, lc_cores, -1.0};
      pred.lc_power = lc_power_idx[*pick];
    }

    // Batch search with the LC dimension fixed.
    const double budget = cap_at(t) * s.max_power;
    TableObjective obj;
    std::vector<std::vector<double>> cache_table(nb + (lc ? 1 : 0), std::vector<double>(s.space.size()));
    for (auto& row : cache_table)
      for (std::size_t idx = 0; idx < s.space.size(); ++idx) row[idx] = s.space.cache_ways_of(idx);
    obj.bips = pred.bips;
    obj.power = pred.power;
    obj.cache = cache_table;
    obj.in_geomean.assign(nb, true);
    if (lc) {
      obj.bips.push_back(std::vector<double>(s.space.size(), 1.0));
      obj.power.push_back(lc_power_idx);
      obj.in_geomean.push_back(false);
    }
    obj.max_power = budget * (1.0 - options.guard_band);
    obj.max_cache = s.cache_ways;
    auto domain = SearchDomain::uniform(obj.bips.size(), s.space.size());
    if (lc) domain.fix(nb, lc_plan->index);
    DdsParams params;
    params.workers = options.workers;
    params.seed = derive_seed(s.seed, 0xDD0000 + q);
    obj.penalty_power = obj.penalty_cache = params.penalty_wt;
    const auto res = dds_search(params, [&obj](const DecisionVector& x) { return obj(x); }, domain);
    rep.search_evaluations = res.evaluations - res.initial_evaluations;
    rep.initial_evaluations = res.initial_evaluations;

    DecisionVector x(res.best.begin(), res.best.begin() + static_cast<std::ptrdiff_t>(nb));
    std::vector<bool> gated(nb, false);
    repair_plan(pred, x, gated, lc_plan, load0, budget, rep);

    auto steady = to_assign(x, gated);
    segs.push_back(segment(t + overhead, t + T, PhaseKind::steady, steady, lc_plan));
    fill_steady(rep, steady, lc_plan, load0, plan_cache(x, gated, lc_plan));

    plan.phases = {{PhaseKind::profile, c.profile_ms},
                   {PhaseKind::reconstruct, c.reconstruct_ms},
                   {PhaseKind::search, c.dds_ms},
                   {PhaseKind::steady, T - overhead}};
    plan.chosen = x;
    plan.gated = gated;
    plan.lc_config = lc_plan ? std::optional<std::size_t>(lc_plan->index) : std::nullopt;
    plan.lc_cores = lc_cores;
    prev_batch = steady;
    prev_lc = lc_plan;
  }

  // Steady-state measurements written back into the observation store.
  void cuttlesys_write_back(const QuantumPlan& plan, const QuantumReport& rep) {
    Rng rng(s.seed, 0x5B0000 + q);
    const double steady_ms = plan.phases.back().duration_ms;
    for (std::size_t i = 0; i < nb; ++i) {
      if (plan.gated[i]) continue;
      const auto smp = take_sample(s.apps[i], s.space, plan.chosen[i], steady_ms, s.noise, rng);
      bips_obs[i][plan.chosen[i]] = smp.bips;
      power_obs[i][s.space.core_of(plan.chosen[i])] = smp.watts;
    }
    if (lc && plan.lc_config && !rep.schedule_changed) {
      const double r = rho(rep.load, plan.lc_cores);
      const auto smp = take_sample(*lc, s.space, *plan.lc_config, steady_ms, s.noise, rng, r);
      lc_lat_obs[*plan.lc_config] = {*smp.latency_ms, r};
      lc_pow_obs[s.space.core_of(*plan.lc_config)] = {smp.watts, r};
    }
  }

  // ---- core gating / no gating / asymmetric -------------------------------

  std::size_t top_index() const { return s.space.index_of(s.space.widest_core(), s.space.max_cache_index()); }

  void core_gating(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs, bool waypart) {
    const double T = s.quantum_ms;
    const double prof = s.costs.gating_profile_ms;
    if (prof >= T) throw DomainError("management phases exceed the quantum");
    const double load0 = load_at(t);
    const std::size_t top_core = s.space.widest_core();
    auto ways_for = [&](std::size_t active) {
      const double w = s.cache_ways / static_cast<double>(active + (lc ? 1 : 0));
      return waypart ? w : 0.75 * w;
    };
    auto assign = [&](const std::vector<bool>& gated) {
      std::size_t active = 0;
      for (bool g : gated) active += g ? 0 : 1;
      const double w = ways_for(std::max<std::size_t>(active, 1));
      std::vector<BatchAssign> out(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        out[i].index = s.space.index_of(top_core, 0);
        out[i].ways = w;
        out[i].gated = gated[i];
      }
      std::optional<LcAssign> l;
      if (lc) l = LcAssign{s.space.index_of(top_core, 0), s.lc_initial_cores, w};
      return std::pair{out, l};
    };

    Rng rng(s.seed, 0x5A0000 + q);
    std::vector<bool> gated(nb, false);
    auto [all_on, lc_on] = assign(gated);
    segs.push_back(segment(t, t + prof, PhaseKind::profile, all_on, lc_on));
    std::vector<double> measured(nb);
    for (std::size_t i = 0; i < nb; ++i)
      measured[i] = take_sample(s.apps[i], s.space, s.space.index_of(top_core, 0), prof, s.noise, rng).watts;
    double lc_measured = 0.0;
    if (lc)
      lc_measured = static_cast<double>(s.lc_initial_cores) *
                    take_sample(*lc, s.space, s.space.index_of(top_core, 0), prof, s.noise, rng, rho(load0, s.lc_initial_cores)).watts;

    const double budget = cap_at(t) * s.max_power;
    for (std::size_t i : core_gating_select(measured, lc_measured, budget)) gated[i] = true;
    // Chip power meter at steady-state entry.
    while (true) {
      auto [batch, l] = assign(gated);
      if (plan_true_power(batch, l, load0) <= budget) break;
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < nb; ++i)
        if (!gated[i] && (!pick || measured[i] > measured[*pick])) pick = i;
      if (!pick) {
        rep.repair_ok = false;
        break;
      }
      gated[*pick] = true;
    }
    auto [steady, l] = assign(gated);
    segs.push_back(segment(t + prof, t + T, PhaseKind::steady, steady, l));
    std::size_t active = 0;
    for (bool g : gated) active += g ? 0 : 1;
    fill_steady(rep, steady, l, load0, ways_for(std::max<std::size_t>(active, 1)) * static_cast<double>(active + (lc ? 1 : 0)));
    plan.phases = {{PhaseKind::profile, prof}, {PhaseKind::steady, T - prof}};
    plan.chosen.assign(nb, s.space.index_of(top_core, 0));
    plan.gated = gated;
    if (l) plan.lc_config = l->index;
    plan.lc_cores = lc_cores;
  }

  void no_gating(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs) {
    DecisionVector x(nb, top_index());
    if (s.hetero()) {
      // Fully provisioned big and small cores, apps placed by true speedup.
      std::vector<double> big(nb), small(nb);
      std::vector<std::string> ids(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        big[i] = s.apps[i].bips[big_top()];
        small[i] = s.apps[i].bips[small_top()];
        ids[i] = s.apps[i].id;
      }
      const auto map = greedy_map(big, small, ids, s.n_cores / 2);
      for (std::size_t i = 0; i < nb; ++i) x[i] = map[i] ? big_top() : small_top();
    }
    std::vector<BatchAssign> batch(nb);
    for (std::size_t i = 0; i < nb; ++i) batch[i].index = x[i];
    std::optional<LcAssign> l;
    if (lc) l = LcAssign{top_index(), s.lc_initial_cores, -1.0};
    segs.push_back(segment(t, t + s.quantum_ms, PhaseKind::steady, batch, l));
    fill_steady(rep, batch, l, load_at(t), plan_cache(x, std::vector<bool>(nb, false), l));
    plan.phases = {{PhaseKind::steady, s.quantum_ms}};
    plan.chosen = x;
    plan.gated.assign(nb, false);
    if (l) plan.lc_config = l->index;
    plan.lc_cores = lc_cores;
  }

  // Best big/small split (or the 50/50 one) with ground-truth knowledge.
  void asymmetric(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs, bool fixed_half) {
    const double load0 = load_at(t);
    const double budget = cap_at(t) * s.max_power;
    const std::size_t big_core = s.space.widest_core();
    const std::size_t small_core = s.space.narrowest_core();
    const double w = s.cache_ways / static_cast<double>(nb + (lc ? 1 : 0));
    std::optional<LcAssign> l;
    if (lc) l = LcAssign{s.space.index_of(big_core, 0), s.lc_initial_cores, w};

    std::vector<double> big(nb), small(nb);
    std::vector<std::string> ids(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      big[i] = bips_at_ways(s.apps[i], s.space, big_core, w);
      small[i] = bips_at_ways(s.apps[i], s.space, small_core, w);
      ids[i] = s.apps[i].id;
    }
    struct Candidate {
      std::vector<BatchAssign> batch;
      double score = -1.0;
      bool ok = true;
    };
    auto evaluate = [&](std::size_t n_big) {
      Candidate cand;
      const auto map = greedy_map(big, small, ids, n_big);
      cand.batch.resize(nb);
      std::vector<std::vector<double>> table;
      std::vector<bool> is_lc;
      DecisionVector zero;
      for (std::size_t i = 0; i < nb; ++i) {
        cand.batch[i].index = s.space.index_of(map[i] ? big_core : small_core, 0);
        cand.batch[i].ways = w;
        table.push_back({true_batch_power(i, cand.batch[i])});
        is_lc.push_back(false);
        zero.push_back(0);
      }
      if (l) {
        table.push_back({true_lc_power(*l, load0)});
        is_lc.push_back(true);
        zero.push_back(0);
      }
      try {
        for (std::size_t d : power_repair(zero, table, is_lc, budget).turned_off) cand.batch[d].gated = true;
      } catch (const InfeasibleError&) {
        for (auto& b : cand.batch) b.gated = true;
        cand.ok = false;
      }
      // Batch geomean; a gated app counts as a near-zero rate.
      std::vector<double> rates(nb);
      for (std::size_t i = 0; i < nb; ++i) rates[i] = cand.batch[i].gated ? 1e-3 : true_bips(i, cand.batch[i]);
      cand.score = geomean(rates);
      return cand;
    };
    const std::size_t batch_cores = s.n_cores - s.lc_initial_cores;
    const std::size_t max_big = std::min(nb, batch_cores);
    Candidate best;
    if (fixed_half) {
      best = evaluate(max_big / 2);
    } else {
      for (std::size_t n_big = 0; n_big <= max_big; ++n_big) {
        auto cand = evaluate(n_big);
        if (best.batch.empty() || cand.score > best.score) best = std::move(cand);
      }
    }
    rep.repair_ok = best.ok;
    segs.push_back(segment(t, t + s.quantum_ms, PhaseKind::steady, best.batch, l));
    std::size_t active = 0;
    for (const auto& b : best.batch) active += b.gated ? 0 : 1;
    fill_steady(rep, best.batch, l, load0, w * static_cast<double>(active + (lc ? 1 : 0)));
    plan.phases = {{PhaseKind::steady, s.quantum_ms}};
    for (const auto& b : best.batch) {
      plan.chosen.push_back(b.index);
      plan.gated.push_back(b.gated);
    }
    if (l) plan.lc_config = l->index;
    plan.lc_cores = lc_cores;
  }

  // ---- heterogeneous managers ---------------------------------------------

  struct HeteroPredictions {
    Predictions pred;
    std::vector<bool> has_big, has_small;
  };

  std::size_t big_top() const { return s.space.index_of(s.space.widest_core(1), 0); }
  std::size_t small_top() const { return s.space.index_of(s.space.widest_core(0), 0); }

  // RBF fill of the big-core table from 3MM3 samples (plus exact small samples).
  void fill_big(Predictions& p, std::size_t app, const std::vector<Sample>& big_samples) const {
    std::vector<std::pair<LevelPoint, double>> bb, pw;
    for (const auto& smp : big_samples) {
      const auto pt = level_point(s.space, s.space.core_of(smp.config_index));
      bb.emplace_back(pt, smp.bips);
      pw.emplace_back(pt, smp.watts);
    }
    const auto mb = fit_rbf(bb);
    const auto mp = fit_rbf(pw);
    const auto range = s.space.core_range(1);
    for (std::size_t core = range.first; core <= range.last; ++core) {
      const auto idx = s.space.index_of(core, 0);
      const auto pt = level_point(s.space, core);
      p.bips[app][idx] = std::max(1e-3, predict(mb, pt));
      p.power[app][idx] = std::max(1e-3, predict(mp, pt));
    }
    for (const auto& smp : big_samples) {
      p.bips[app][smp.config_index] = smp.bips;
      p.power[app][smp.config_index] = smp.watts;
    }
  }

  std::vector<BatchAssign> hetero_assign(const DecisionVector& x, const std::vector<bool>& gated, bool working) const {
    std::vector<BatchAssign> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i].index = x[i];
      out[i].gated = gated.empty() ? false : gated[i];
      out[i].working = working;
    }
    return out;
  }

  std::vector<std::size_t> mm3_big_cores() const { return design_cores(three_mm3_design(3), s.space, 1); }

  void search_and_finish(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs, Predictions& pred,
                         const SearchDomain& domain, bool joint, double t_search, double search_ms,
                         const DecisionVector& anchor) {
    const double T = s.quantum_ms;
    const double budget = cap_at(t) * s.max_power;
    const std::size_t n_big = s.n_cores / 2;
    const std::size_t n_small = s.n_cores - n_big;
    const auto hs = HeteroSpace::of(s.space);
    TableObjective obj;
    obj.bips = pred.bips;
    obj.power = pred.power;
    obj.cache.assign(nb, std::vector<double>(s.space.size(), 0.0));
    obj.in_geomean.assign(nb, true);
    obj.max_power = budget * (1.0 - options.guard_band);
    obj.max_cache = s.cache_ways;
    if (joint) obj.validity = [hs, n_big, n_small](const DecisionVector& x) { return one_step_validity(x, hs, n_big, n_small); };
    DdsParams params;
    params.workers = options.workers;
    params.seed = derive_seed(s.seed, 0xDD0000 + q);
    if (joint) {
      params.max_iter = 80;
      params.initial_points.push_back(anchor);
    }
    const auto res = dds_search(params, [&obj](const DecisionVector& x) { return obj(x); }, domain);
    rep.search_evaluations = res.evaluations - res.initial_evaluations;
    rep.initial_evaluations = res.initial_evaluations;
    DecisionVector x = res.best;
    if (!res.found_valid) {
      rep.fallback = true;
      log(LogLevel::warn, "one-step search found no valid mapping; using the greedy mapping");
      x = anchor;
    }
    std::vector<bool> gated(nb, false);
    repair_plan(pred, x, gated, std::nullopt, 0.0, budget, rep);
    segs.push_back(segment(t_search, t_search + search_ms, PhaseKind::search, hetero_assign(x, gated, false), std::nullopt));
    auto steady = hetero_assign(x, gated, true);
    segs.push_back(segment(t_search + search_ms, t + T, PhaseKind::steady, steady, std::nullopt));
    fill_steady(rep, steady, std::nullopt, 0.0, plan_cache(x, gated, std::nullopt));
    plan.chosen = x;
    plan.gated = gated;
  }

  void two_step(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs) {
    const auto& c = s.costs;
    const double T = s.quantum_ms;
    const std::size_t n_big = s.n_cores / 2;
    Rng rng(s.seed, 0x5A0000 + q);
    std::vector<const AppProfile*> ptrs;
    for (std::size_t i = 0; i < nb; ++i) ptrs.push_back(&s.apps[i]);
    const auto pp = profile_pair(ptrs, s.space, big_top(), small_top(), s.noise, rng);
    const double half = c.pair_sampling_ms / 2.0;
    for (int h = 0; h < 2; ++h) {
      DecisionVector x(nb);
      for (std::size_t i = 0; i < nb; ++i) x[i] = pp.schedule[i][static_cast<std::size_t>(h)];
      segs.push_back(segment(t + half * h, t + half * (h + 1), PhaseKind::migration, hetero_assign(x, {}, false), std::nullopt));
    }
    std::vector<double> big(nb), small(nb), big_w(nb), small_w(nb);
    std::vector<std::string> ids(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      big[i] = pp.samples[2 * i].bips;
      big_w[i] = pp.samples[2 * i].watts;
      small[i] = pp.samples[2 * i + 1].bips;
      small_w[i] = pp.samples[2 * i + 1].watts;
      ids[i] = s.apps[i].id;
    }
    const auto map = greedy_map(big, small, ids, n_big);
    DecisionVector full(nb);
    double measured = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      full[i] = map[i] ? big_top() : small_top();
      measured += map[i] ? big_w[i] : small_w[i];
    }
    const double budget = cap_at(t) * s.max_power;
    if (measured <= budget * (1.0 - options.guard_band)) {
      std::vector<bool> gated(nb, false);
      // Chip power meter check at steady-state entry.
      while (plan_true_power(hetero_assign(full, gated, true), std::nullopt, 0.0) > budget) {
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < nb; ++i)
          if (!gated[i] && (!pick || (map[i] ? big_w[i] : small_w[i]) > (map[*pick] ? big_w[*pick] : small_w[*pick]))) pick = i;
        if (!pick) {
          rep.repair_ok = false;
          break;
        }
        gated[*pick] = true;
      }
      auto steady = hetero_assign(full, gated, true);
      segs.push_back(segment(t + c.pair_sampling_ms, t + T, PhaseKind::steady, steady, std::nullopt));
      fill_steady(rep, steady, std::nullopt, 0.0, plan_cache(full, gated, std::nullopt));
      plan.phases = {{PhaseKind::migration, c.pair_sampling_ms}, {PhaseKind::steady, T - c.pair_sampling_ms}};
      plan.chosen = full;
      plan.gated = gated;
      return;
    }

    // Class sampling: 3MM3 on big cores (top run already sampled), all small configs on small cores.
    Predictions pred;
    pred.bips.assign(nb, std::vector<double>(s.space.size(), 1e-3));
    pred.power.assign(nb, std::vector<double>(s.space.size(), 1e9));
    const auto design = mm3_big_cores();
    const auto small_range = s.space.core_range(0);
    const std::size_t slots = static_cast<std::size_t>(std::llround(c.class_sampling_ms));
    std::vector<std::vector<std::size_t>> run(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      if (map[i]) {
        for (std::size_t k = 1; k < design.size(); ++k) run[i].push_back(s.space.index_of(design[k], 0));
      } else {
        for (std::size_t core = small_range.first; core <= small_range.last; ++core) run[i].push_back(s.space.index_of(core, 0));
      }
    }
    const double t_sample = t + c.pair_sampling_ms;
    const double slot_ms = c.class_sampling_ms / static_cast<double>(std::max<std::size_t>(slots, 1));
    std::vector<std::vector<Sample>> samples(nb);
    for (std::size_t k = 0; k < slots; ++k) {
      DecisionVector x(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        x[i] = k < run[i].size() ? run[i][k] : full[i];
        if (k < run[i].size())
          samples[i].push_back(replicated_sample(s.apps[i], s.space, x[i], s.noise, rng, 8, slot_ms, 0.0,
                                                 t_sample + slot_ms * static_cast<double>(k)));
      }
      segs.push_back(segment(t_sample + slot_ms * k, t_sample + slot_ms * (k + 1), PhaseKind::sampling,
                             hetero_assign(x, {}, true), std::nullopt));
    }
    auto domain = SearchDomain::uniform(nb, s.space.size());
    const auto big_range = s.space.index_range(1);
    const auto small_idx = s.space.index_range(0);
    for (std::size_t i = 0; i < nb; ++i) {
      if (map[i]) {
        auto big_samples = samples[i];
        Sample top = pp.samples[2 * i];
        big_samples.insert(big_samples.begin(), top);
        fill_big(pred, i, big_samples);
        domain.lo[i] = big_range.first;
        domain.hi[i] = big_range.last;
      } else {
        pred.bips[i][small_top()] = small[i];
        pred.power[i][small_top()] = small_w[i];
        for (const auto& smp : samples[i]) {
          pred.bips[i][smp.config_index] = smp.bips;
          pred.power[i][smp.config_index] = smp.watts;
        }
        domain.lo[i] = small_idx.first;
        domain.hi[i] = small_idx.last;
      }
    }
    const double search_ms = c.search_ms * (1.0 + c.sync_overhead);
    const double t_search = t_sample + c.class_sampling_ms;
    if (t_search + search_ms >= t + T) throw DomainError("management phases exceed the quantum");
    search_and_finish(plan, rep, segs, pred, domain, false, t_search, search_ms, full);
    plan.phases = {{PhaseKind::migration, c.pair_sampling_ms},
                   {PhaseKind::sampling, c.class_sampling_ms},
                   {PhaseKind::search, search_ms},
                   {PhaseKind::steady, T - c.pair_sampling_ms - c.class_sampling_ms - search_ms}};
  }

  void one_step(QuantumPlan& plan, QuantumReport& rep, std::vector<Segment>& segs) {
    const auto& c = s.costs;
    const double T = s.quantum_ms;
    const std::size_t n_big = s.n_cores / 2;
    Rng rng(s.seed, 0x5A0000 + q);
    const auto design = mm3_big_cores();
    const auto small_range = s.space.core_range(0);
    const std::size_t half_apps = nb / 2;
    const double group_ms = c.one_step_sampling_ms / 2.0;
    const std::size_t slots = design.size();
    const double slot_ms = group_ms / static_cast<double>(slots);
    std::vector<std::vector<Sample>> big_s(nb), small_s(nb);
    for (int g = 0; g < 2; ++g) {
      for (std::size_t k = 0; k < slots; ++k) {
        const double t0 = t + group_ms * g + slot_ms * static_cast<double>(k);
        DecisionVector x(nb);
        for (std::size_t i = 0; i < nb; ++i) {
          const bool on_big = (i < half_apps) == (g == 0);
          if (on_big) {
            x[i] = s.space.index_of(design[k], 0);
            big_s[i].push_back(replicated_sample(s.apps[i], s.space, x[i], s.noise, rng, 8, slot_ms, 0.0, t0));
          } else {
            const std::size_t core = small_range.first + k;
            if (core <= small_range.last) {
              x[i] = s.space.index_of(core, 0);
              small_s[i].push_back(replicated_sample(s.apps[i], s.space, x[i], s.noise, rng, 8, slot_ms, 0.0, t0));
            } else {
              x[i] = small_top();
            }
          }
        }
        segs.push_back(segment(t0, t0 + slot_ms, PhaseKind::sampling, hetero_assign(x, {}, true), std::nullopt));
      }
    }
    Predictions pred;
    pred.bips.assign(nb, std::vector<double>(s.space.size(), 1e-3));
    pred.power.assign(nb, std::vector<double>(s.space.size(), 1e9));
    std::vector<double> big(nb), small(nb);
    std::vector<std::string> ids(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      fill_big(pred, i, big_s[i]);
      for (const auto& smp : small_s[i]) {
        pred.bips[i][smp.config_index] = smp.bips;
        pred.power[i][smp.config_index] = smp.watts;
      }
      big[i] = pred.bips[i][big_top()];
      small[i] = pred.bips[i][small_top()];
      ids[i] = s.apps[i].id;
    }
    const auto map = greedy_map(big, small, ids, n_big);
    DecisionVector anchor(nb);
    for (std::size_t i = 0; i < nb; ++i) anchor[i] = map[i] ? big_top() : small_top();
    const double search_ms = 2.0 * c.search_ms * (1.0 + c.sync_overhead);
    const double t_search = t + c.one_step_sampling_ms;
    if (t_search + search_ms >= t + T) throw DomainError("management phases exceed the quantum");
    search_and_finish(plan, rep, segs, pred, SearchDomain::uniform(nb, s.space.size()), true, t_search, search_ms, anchor);
    plan.phases = {{PhaseKind::sampling, c.one_step_sampling_ms},
                   {PhaseKind::search, search_ms},
                   {PhaseKind::steady, T - c.one_step_sampling_ms - search_ms}};
  }

  // ---- driver ---------------------------------------------------------------

  std::pair<QuantumPlan, QuantumReport> step() {
    QuantumReport rep;
    QuantumPlan plan;
    rep.t_ms = t;
    rep.manager = std::string(to_string(kind));
    rep.cap = cap_at(t);
    rep.load = load_at(t);
    rep.schedule_changed = !s.load.change_points(t, t + s.quantum_ms).empty() ||
                           (!options.cap_override && !s.power_cap.change_points(t, t + s.quantum_ms).empty());
    std::vector<Segment> segs;
    switch (kind) {
      case ManagerKind::cuttlesys: cuttlesys(plan, rep, segs); break;
      case ManagerKind::two_step: two_step(plan, rep, segs); break;
      case ManagerKind::one_step: one_step(plan, rep, segs); break;
      case ManagerKind::core_gating: core_gating(plan, rep, segs, false); break;
      case ManagerKind::core_gating_waypart: core_gating(plan, rep, segs, true); break;
      case ManagerKind::asym_oracle: asymmetric(plan, rep, segs, false); break;
      case ManagerKind::asym_fixed_5050: asymmetric(plan, rep, segs, true); break;
      case ManagerKind::no_gating: no_gating(plan, rep, segs); break;
    }
    plan.lc_cores = lc_cores;

    Accum acc;
    acc.instr.assign(nb, 0.0);
    for (const auto& seg : segs) integrate(seg, acc);
    rep.instructions = acc.instr;
    rep.total_instr = std::accumulate(acc.instr.begin(), acc.instr.end(), 0.0);
    std::vector<double> rates;
    for (double v : acc.instr)
      if (v > 0.0) rates.push_back(v / (s.quantum_ms / 1000.0));
    rep.geomean_bips = rates.empty() ? 0.0 : geomean(rates);
    rep.mean_power = acc.energy / s.quantum_ms;
    rep.peak_power = acc.peak;
    rep.over_budget_ms = acc.over;
    rep.over_budget_steady_ms = acc.over_steady;
    if (lc) {
      rep.tail_ms = tail_p99(acc.latency);
      rep.qos_met = rep.tail_ms <= s.qos_ms;
    }
    rep.lc_config = plan.lc_config;
    rep.lc_cores = plan.lc_cores;

    if (kind == ManagerKind::cuttlesys) cuttlesys_write_back(plan, rep);
    last_met = rep.qos_met;
    last_tail = rep.tail_ms;
    last_not_found = rep.lc_not_found;
    if (!rep.repair_ok) log(LogLevel::warn, "t=" + format_fixed(t, 1) + " ms: power budget unreachable; batch cores off");
    t += s.quantum_ms;
    ++q;
    return {std::move(plan), std::move(rep)};
  }
};

Runtime::Runtime(const Scenario& scenario, ManagerKind kind, RuntimeOptions options)
    : impl_(std::make_unique<Impl>(scenario, kind, std::move(options))) {}
Runtime::~Runtime() = default;
Runtime::Runtime(Runtime&&) noexcept = default;

std::pair<QuantumPlan, QuantumReport> Runtime::step() { return impl_->step(); }
double Runtime::now_ms() const { return impl_->t; }
std::size_t Runtime::lc_cores() const { return impl_->lc_cores; }

std::vector<QuantumReport> run_timeline(const Scenario& scenario, ManagerKind kind, double duration_ms,
                                        const RuntimeOptions& options) {
  const double n = duration_ms / scenario.quantum_ms;
  if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9)
    throw DomainError("duration must be a positive multiple of the quantum");
  Runtime rt(scenario, kind, options);
  std::vector<QuantumReport> out;
  for (long k = 0; k < std::lround(n); ++k) out.push_back(rt.step().second);
  return out;
}

}  // namespace rsched
