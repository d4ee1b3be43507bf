// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsched/cli.hpp"
#include "rsched/error.hpp"
#include "rsched/experiment.hpp"
#include "rsched/reconstruct.hpp"
#include "rsched/rng.hpp"
#include "rsched/sampling.hpp"
#include "rsched/search.hpp"
#include "rsched/surrogate.hpp"
#include "rsched/text_io.hpp"
#include "test_util.hpp"

using namespace rsched;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))];
}

// 16 fully profiled training rows plus 16 active rows observed at two configs.
struct CompletionInstance {
  RatingsMatrix R;
  std::vector<AppProfile> active;
};

CompletionInstance completion_instance(std::uint64_t seed, const ConfigSpace& space) {
  const auto apps = generate_synthetic(seed, 32, space, 4);
  CompletionInstance inst;
  inst.R = RatingsMatrix(0, space.size());
  for (std::size_t a = 0; a < 16; ++a) inst.R.add_full_row(apps[a].bips);
  std::vector<const AppProfile*> act;
  for (std::size_t a = 16; a < 32; ++a) {
    inst.active.push_back(apps[a]);
    act.push_back(&apps[a]);
  }
  Rng rng(seed, 7);
  const auto pp = profile_pair(act, space, space.index_of(space.widest_core(), 1),
                               space.index_of(space.narrowest_core(), 1), NoiseModel{}, rng);
  for (std::size_t a = 0; a < 16; ++a) {
    const auto r = inst.R.add_row(RowKind::active);
    for (std::size_t k = 0; k < 2; ++k) inst.R.observe(r, pp.samples[2 * a + k].config_index, pp.samples[2 * a + k].bips);
  }
  return inst;
}

std::vector<double> hidden_relative_errors(const CompletionInstance& inst, const std::vector<double>& dense) {
  std::vector<double> out;
  const std::size_t cols = inst.R.cols;
  for (std::size_t a = 0; a < inst.active.size(); ++a) {
    const std::size_t r = 16 + a;
    for (std::size_t c = 0; c < cols; ++c)
      if (!inst.R.is_observed(r, c)) out.push_back(dense[r * cols + c] / inst.active[a].bips[c] - 1.0);
  }
  return out;
}

Verdict crit1() {
  const auto space = ConfigSpace::homogeneous();
  const auto t0 = Clock::now();
  std::vector<double> errs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = completion_instance(seed, space);
    const auto e = hidden_relative_errors(inst, complete_matrix(inst.R, CompletionOptions{}));
    errs.insert(errs.end(), e.begin(), e.end());
  }
  const double secs = seconds_since(t0) / 10.0;
  const double p5 = quantile(errs, 0.05), p25 = quantile(errs, 0.25), p75 = quantile(errs, 0.75),
               p95 = quantile(errs, 0.95);
  Verdict v;
  v.pass = p25 >= -0.10 && p75 <= 0.10 && p5 >= -0.25 && p95 <= 0.25 && secs < 10.0;
  v.detail = "p5=" + fmt("%.3f", p5) + " p25=" + fmt("%.3f", p25) + " p75=" + fmt("%.3f", p75) +
             " p95=" + fmt("%.3f", p95) + " (bounds +-0.10 / +-0.25) per-instance " + fmt("%.2f", secs) + "s";
  return v;
}

Verdict crit2() {
  const auto space = ConfigSpace::homogeneous();
  double worst = 0.0;
  bool bitwise = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = completion_instance(seed, space);
    auto rmse = [&](std::size_t workers) {
      CompletionOptions o;
      o.workers = workers;
      double s = 0.0;
      const auto e = hidden_relative_errors(inst, complete_matrix(inst.R, o));
      for (double x : e) s += x * x;
      return std::sqrt(s / static_cast<double>(e.size()));
    };
    const double serial = rmse(1), par = rmse(4);
    worst = std::max(worst, std::abs(par - serial) / serial);

    SgdParams p;
    const auto a = sgd_fit(inst.R, p);
    const auto b = parallel_sgd_fit(inst.R, p, 1);
    bitwise = bitwise && a.Q == b.Q && a.P == b.P;
  }
  Verdict v;
  v.pass = worst <= 0.02 && bitwise;
  v.detail = "worst relative RMSE deviation " + fmt("%.4f", worst) + " (<= 0.02), workers=1 bitwise " +
             (bitwise ? "equal" : "DIFFERENT");
  return v;
}

TableObjective table_objective(const ConfigSpace& space, const std::vector<AppProfile>& apps,
                               const std::vector<std::size_t>& confs, double cap, double ways) {
  TableObjective o;
  double max_total = 0.0;
  for (const auto& a : apps) {
    std::vector<double> b, p, c;
    double mx = 0.0;
    for (auto i : confs) {
      b.push_back(a.bips[i]);
      p.push_back(a.watts_at(space.core_of(i)));
      c.push_back(space.cache_ways_of(i));
      mx = std::max(mx, p.back());
    }
    o.bips.push_back(b);
    o.power.push_back(p);
    o.cache.push_back(c);
    o.in_geomean.push_back(true);
    max_total += mx;
  }
  o.max_power = cap * max_total;
  o.max_cache = ways;
  return o;
}

Verdict crit3() {
  const auto space = ConfigSpace::homogeneous();
  // Widest, middle and narrowest cores at all four cache sizes.
  std::vector<std::size_t> confs;
  for (std::size_t core : {std::size_t{0}, std::size_t{13}, std::size_t{26}})
    for (std::size_t k = 0; k < space.cache_count(); ++k) confs.push_back(space.index_of(core, k));
  const auto dom = SearchDomain::uniform(4, confs.size());
  double secs = 0.0;
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto obj = table_objective(space, generate_synthetic(seed, 4, space, 4), confs, 0.6, 8.0);
    const EvalFn f = [&](const DecisionVector& x) { return obj(x); };
    const auto bf = brute_force(f, dom);
    DdsParams p;
    p.workers = 4;
    p.seed = seed;
    const auto t0 = Clock::now();
    const auto d = dds_search(p, f, dom);
    secs += seconds_since(t0);
    ok += d.best_eval.score >= 0.95 * bf.best_eval.score ? 1 : 0;
  }
  Verdict v;
  v.pass = ok >= 90 && secs < 5.0;
  v.detail = std::to_string(ok) + "/100 runs within 95% of the exhaustive optimum over 12^4 points (>= 90), DDS " +
             fmt("%.2f", secs) + "s";
  return v;
}

Verdict crit4() {
  const auto space = ConfigSpace::homogeneous();
  std::vector<std::size_t> all(space.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto dom = SearchDomain::uniform(16, space.size());
  Verdict v{true, ""};
  for (double cap : {0.6, 0.5}) {
    int wins = 0;
    double sd = 0.0, sg = 0.0;
    bool budget_ok = true;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto obj = table_objective(space, generate_synthetic(seed, 16, space, 4), all, cap, 32.0);
      const EvalFn f = [&](const DecisionVector& x) { return obj(x); };
      DdsParams dp;
      dp.workers = 4;
      dp.seed = seed;
      const auto d = dds_search(dp, f, dom);
      GaParams gp;
      gp.workers = 4;
      gp.seed = seed;
      const std::size_t per_gen = gp.population * gp.workers;
      gp.generations = (d.evaluations + per_gen - 1) / per_gen;
      const auto g = ga_search(gp, f, dom);
      budget_ok = budget_ok && g.evaluations >= d.evaluations && g.evaluations < d.evaluations + per_gen;
      sd += d.best_eval.score;
      sg += g.best_eval.score;
      wins += d.best_eval.score > g.best_eval.score ? 1 : 0;
    }
    const bool pass = sd >= sg && wins >= 30 && budget_ok;
    v.pass = v.pass && pass;
    v.detail += "cap " + fmt("%.1f", cap) + ": mean DDS " + fmt("%.4f", sd / 50) + " vs GA " + fmt("%.4f", sg / 50) +
                ", DDS wins " + std::to_string(wins) + "/50 (>= 30); ";
  }
  return v;
}

Verdict crit5() {
  const auto hs = ConfigSpace::heterogeneous();
  const auto design = three_mm3_design(3);
  bool balanced = design.runs.size() == 9;
  for (int f = 0; f < 3; ++f)
    for (int level = 0; level < 3; ++level) {
      const auto n = std::count_if(design.runs.begin(), design.runs.end(),
                                   [&](const std::array<int, 3>& r) { return r[static_cast<std::size_t>(f)] == level; });
      balanced = balanced && n == 3;
    }
  const auto cores = design_cores(design, hs, 1);
  const bool has_full = std::find(cores.begin(), cores.end(), hs.widest_core(1)) != cores.end();

  double worst_center = 0.0;
  for (const auto& app : generate_synthetic(11, 16, hs, 4)) {
    std::vector<std::pair<LevelPoint, double>> s;
    for (auto c : cores) s.emplace_back(level_point(hs, c), app.bips[c]);
    const auto m = fit_rbf(s);
    for (const auto& [x, y] : s) worst_center = std::max(worst_center, std::abs(predict(m, x) - y) / std::abs(y));
  }

  double worst_affine = 0.0;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double c0 = rng.uniform(-2, 2), c1 = rng.uniform(-2, 2), c2 = rng.uniform(-2, 2), c3 = rng.uniform(-2, 2);
    auto f = [&](const LevelPoint& x) { return c0 + c1 * x[0] + c2 * x[1] + c3 * x[2]; };
    std::vector<std::pair<LevelPoint, double>> s;
    for (const auto& r : design.runs) {
      const LevelPoint x{double(r[0]), double(r[1]), double(r[2])};
      s.emplace_back(x, f(x));
    }
    const auto m = fit_rbf(s);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          const LevelPoint x{double(a), double(b), double(c)};
          worst_affine = std::max(worst_affine, std::abs(predict(m, x) - f(x)) / std::max(1.0, std::abs(f(x))));
        }
  }
  Verdict v;
  v.pass = balanced && has_full && worst_center <= 1e-9 && worst_affine <= 1e-9;
  v.detail = std::string("design ") + (balanced ? "balanced 9 runs" : "NOT balanced") +
             (has_full ? ", contains full width" : ", MISSING full width") + "; center error " +
             fmt("%.2e", worst_center) + ", affine error " + fmt("%.2e", worst_affine) + " (<= 1e-9)";
  return v;
}

Verdict crit6() {
  std::size_t plans = 0, violations = 0, deferred = 0, bad = 0, failed_repairs = 0;
  const std::vector<ManagerKind> kinds{ManagerKind::cuttlesys, ManagerKind::core_gating,
                                       ManagerKind::core_gating_waypart, ManagerKind::asym_oracle,
                                       ManagerKind::asym_fixed_5050};
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng(k, 0xACC6);
    ReferenceOptions ro;
    ro.seed = 1000 + k;
    ro.n_cores = 2 * (2 + rng.below(3));
    ro.training_batch = 8;
    ro.training_lc = 4;
    ro.hetero = k % 4 == 3;
    auto s = reference_scenario(ro);
    // Random cap and load steps, some inside a quantum.
    const double step_t = 50.0 * static_cast<double>(1 + rng.below(5));
    s.power_cap = Schedule{{{0.0, rng.uniform(0.3, 1.0)}, {step_t, rng.uniform(0.3, 1.0)}}};
    s.load = Schedule{{{0.0, rng.uniform(0.1, 0.9)}, {50.0 * static_cast<double>(1 + rng.below(5)), rng.uniform(0.1, 0.9)}}};
    const auto kind = ro.hetero ? (k % 8 == 3 ? ManagerKind::two_step : ManagerKind::one_step) : kinds[k % kinds.size()];
    for (const auto& r : run_timeline(s, kind, 300.0)) {
      ++plans;
      if (r.steady_cache > s.cache_ways) ++bad;
      if (!r.repair_ok) {
        ++failed_repairs;
        continue;
      }
      if (r.steady_power > r.steady_budget + 1e-9) ++bad;
      if (r.over_budget_steady_ms > 0.0) {
        ++violations;
        if (r.schedule_changed) ++deferred;
        else ++bad;
      }
    }
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = std::to_string(plans) + " steady plans over 200 scenarios, " + std::to_string(bad) +
             " constraint breaches, " + std::to_string(violations) + " metered overruns (" + std::to_string(deferred) +
             " via mid-quantum deferral), " + std::to_string(failed_repairs) + " unreachable budgets";
  return v;
}

Verdict crit7() {
  ReferenceOptions ro;
  ro.seed = 1;
  auto s = reference_scenario(ro);
  s.load = Schedule{{{0.0, 0.2}, {500.0, 0.9}, {2000.0, 0.2}}};
  RuntimeOptions o;
  o.cap_override = 1.0;
  const auto reps = run_timeline(s, ManagerKind::cuttlesys, 3500.0, o);
  const auto* lc = s.lc_app();
  const std::size_t up = 5, down = 20;

  // Upgrade: the first high-load config is faster at high load than the last low-load one.
  bool upgrade = false;
  if (reps[up].lc_config && reps[up - 1].lc_config) {
    const double rho = std::min(1.0, 0.9 * static_cast<double>(s.lc_initial_cores) /
                                         static_cast<double>(reps[up].lc_cores));
    upgrade = lc->latency_at(*reps[up].lc_config, rho) < lc->latency_at(*reps[up - 1].lc_config, rho);
  }
  bool steps_unit = true, yield_rule = true;
  std::size_t reclaim_at = 0, met_at = 0, yield_at = 0;
  for (std::size_t q = 1; q < reps.size(); ++q) {
    const auto a = reps[q - 1].lc_cores, b = reps[q].lc_cores;
    if (a == b) continue;
    steps_unit = steps_unit && (a + 1 == b || b + 1 == a);
    if (b > a && !reclaim_at && q > up) reclaim_at = q;
    if (b < a) {
      yield_rule = yield_rule && reps[q - 1].tail_ms <= 0.8 * s.qos_ms;
      if (!yield_at && q > down) yield_at = q;
    }
  }
  for (std::size_t q = reclaim_at; reclaim_at && q < down; ++q)
    if (reps[q].qos_met && reps[q].load > 0.5) {
      met_at = q;
      break;
    }
  const bool order = upgrade && reclaim_at > up && met_at >= reclaim_at && yield_at > met_at;
  Verdict v;
  v.pass = order && steps_unit && yield_rule;
  std::ostringstream d;
  d << "upgrade@q" << up << (upgrade ? "" : "(missing)") << " reclaim@q" << reclaim_at << " qos_met@q" << met_at
    << " yield@q" << yield_at << ", peak cores " << std::max_element(reps.begin(), reps.end(), [](auto& x, auto& y) {
         return x.lc_cores < y.lc_cores;
       })->lc_cores
    << ", final cores " << reps.back().lc_cores << ", unit steps " << (steps_unit ? "yes" : "NO")
    << ", yields below 80% QoS " << (yield_rule ? "yes" : "NO");
  v.detail = d.str();
  return v;
}

double phase_ms(const QuantumPlan& p, PhaseKind k) {
  double t = 0.0;
  for (const auto& ph : p.phases)
    if (ph.kind == k) t += ph.duration_ms;
  return t;
}

Verdict crit8() {
  ReferenceOptions ro;
  ro.n_cores = 8;
  const auto homog = reference_scenario(ro);
  ro.hetero = true;
  auto het = reference_scenario(ro);
  const std::size_t N = het.n_cores;
  auto at = [](double cap) {
    RuntimeOptions o;
    o.cap_override = cap;
    return o;
  };
  std::ostringstream d;
  bool ok = true;

  Runtime cs(homog, ManagerKind::cuttlesys, at(0.7));
  const auto [cp, cr] = cs.step();
  const bool cs_ok = phase_ms(cp, PhaseKind::profile) == 2.0 && phase_ms(cp, PhaseKind::reconstruct) == 4.8 &&
                     phase_ms(cp, PhaseKind::search) == 1.3 && std::abs(phase_ms(cp, PhaseKind::steady) - 91.9) < 1e-9;
  ok = ok && cs_ok;
  d << "cuttlesys " << phase_ms(cp, PhaseKind::profile) << "+" << phase_ms(cp, PhaseKind::reconstruct) << "+"
    << phase_ms(cp, PhaseKind::search) << "+" << phase_ms(cp, PhaseKind::steady) << "; ";

  auto roomy = het;
  roomy.max_power *= 2.0;
  Runtime feas(roomy, ManagerKind::two_step, at(1.0));
  const double feas_steady = phase_ms(feas.step().first, PhaseKind::steady);
  Runtime infeas(het, ManagerKind::two_step, at(0.5));
  const auto [ip, ir] = infeas.step();
  const double infeas_steady = phase_ms(ip, PhaseKind::steady);
  Runtime one(het, ManagerKind::one_step, at(0.5));
  const auto [op, orep] = one.step();
  const double one_steady = phase_ms(op, PhaseKind::steady);
  ok = ok && std::abs(feas_steady - 98.0) < 1e-9 && std::abs(infeas_steady - 89.0) < 0.5 &&
       std::abs(one_steady - 80.0) < 0.5 && ir.search_evaluations == N * 400 && orep.search_evaluations == N * 800;
  d << "two-step steady " << feas_steady << " (feasible) / " << infeas_steady << " (infeasible); one-step steady "
    << one_steady << "; DDS evaluations " << ir.search_evaluations << " = " << N << "*400, "
    << orep.search_evaluations << " = " << N << "*800";
  return {ok, d.str()};
}

Verdict crit9() {
  ReferenceOptions ro;
  ro.seed = 1;
  const auto s = reference_scenario(ro);
  ExperimentConfig c;
  c.managers = {ManagerKind::cuttlesys, ManagerKind::core_gating, ManagerKind::asym_fixed_5050, ManagerKind::no_gating};
  c.caps = {0.9, 0.8, 0.7, 0.6, 0.5};
  c.duration_ms = 1000.0;
  const auto t0 = Clock::now();
  const auto r = run_experiment(s, c);
  const double secs = seconds_since(t0);
  auto norm = [&](const std::string& m, double cap) {
    for (const auto& x : r.summaries)
      if (x.manager == m && x.cap && std::abs(*x.cap - cap) < 1e-9) return x.normalized_instr;
    return -1.0;
  };
  bool ok = secs < 60.0;
  std::ostringstream d;
  for (double cap : c.caps) {
    const double cs = norm("cuttlesys", cap), cg = norm("core_gating", cap), as = norm("asym_fixed_5050", cap);
    if (cap <= 0.7 + 1e-9) ok = ok && cs >= cg && cs >= as;
    d << "cap " << fmt("%.1f", cap) << " cs/cg/5050 " << fmt("%.3f", cs) << "/" << fmt("%.3f", cg) << "/"
      << fmt("%.3f", as) << "; ";
  }
  d << fmt("%.1f", secs) << "s";
  return {ok, d.str()};
}

Verdict crit10() {
  TempDir dir("acceptance_det");
  auto cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), "rsched");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  bool ok = true;
  std::size_t compared = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const auto root = dir / ("pass" + std::to_string(pass));
    ok = ok && cli({"generate", "--seed", "3", "--apps", "16", "--out", (root / "scenario").string()}) == exit_ok;
    ok = ok && cli({"run", "--scenario", (root / "scenario").string(), "--managers", "cuttlesys,core_gating",
                    "--caps", "0.7,0.5", "--duration-ms", "300", "--out", (root / "run").string()}) == exit_ok;
    ok = ok && cli({"sweep", "--scenario", (root / "scenario").string(), "--duration-ms", "200", "--out",
                    (root / "sweep").string()}) == exit_ok;
    ok = ok && cli({"run", "--apps", "8", "--hetero", "--managers", "two_step,one_step", "--caps", "0.6",
                    "--duration-ms", "200", "--out", (root / "hetero").string()}) == exit_ok;
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "pass0")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "pass0");
    const auto other = dir / "pass1" / rel.string();
    ok = ok && std::filesystem::exists(other) && read_file(entry.path()) == read_file(other);
    ++compared;
  }
  ok = ok && compared >= 8;
  return {ok, std::to_string(compared) + " output files byte-identical across two runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"matrix completion accuracy", crit1},
      {"parallel completion fidelity", crit2},
      {"DDS optimality gap", crit3},
      {"DDS vs GA at equal budgets", crit4},
      {"RBF surrogate exactness", crit5},
      {"constraint compliance", crit6},
      {"QoS core relocation", crit7},
      {"timeline ledgers", crit8},
      {"directional end-to-end", crit9},
      {"determinism", crit10},
  };
  ::setenv("RECONFIG_SCHED_LOG", "error", 0);
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
