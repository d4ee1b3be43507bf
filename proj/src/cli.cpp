#include "rsched/cli.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rsched/error.hpp"
#include "rsched/experiment.hpp"
#include "rsched/text_io.hpp"

namespace rsched {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string scenario;
  std::string managers;
  std::string caps;
  double duration_ms = 1000.0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t apps = 32;
  std::string out = "out";
  std::size_t workers = 0;
  double quantum_ms = 0.0;
  bool hetero = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "scenario.json or a directory containing it");
  cmd->add_option("--managers", f.managers, "comma-separated manager names");
  cmd->add_option("--caps", f.caps, "comma-separated power caps in (0, 1]");
  cmd->add_option("--duration-ms", f.duration_ms, "simulated time per run");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&f](const std::uint64_t& v) { f.seed = v, f.seed_given = true; }, "scenario / noise seed");
  cmd->add_option("--apps", f.apps, "cores of the generated reference scenario (without --scenario)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "search workers (0: one per core)");
  cmd->add_option("--quantum-ms", f.quantum_ms, "decision quantum override");
  cmd->add_flag("--hetero", f.hetero, "heterogeneous big/small reference scenario");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.emplace_back(t);
  return out;
}

void check_apps(std::size_t apps) {
  if (apps < 2 || apps % 2 != 0) throw UsageError("--apps must be an even number >= 2");
}

Scenario reference_for(std::uint64_t seed, std::size_t apps, bool hetero) {
  check_apps(apps);
  ReferenceOptions ro;
  ro.seed = seed;
  ro.n_cores = apps;
  ro.hetero = hetero;
  return reference_scenario(ro);
}

Scenario scenario_for(const CommonFlags& f) {
  Scenario s;
  if (!f.scenario.empty()) {
    std::filesystem::path p = f.scenario;
    if (std::filesystem::is_directory(p)) p /= "scenario.json";
    if (!std::filesystem::exists(p)) throw IoError("no scenario at " + p.string());
    s = load_scenario(p);
    if (f.seed_given) s.seed = f.seed;
  } else {
    s = reference_for(f.seed, f.apps, f.hetero);
  }
  if (f.quantum_ms != 0.0) {
    if (!(f.quantum_ms > 0.0)) throw UsageError("--quantum-ms must be positive");
    s.quantum_ms = f.quantum_ms;
  }
  return s;
}

ExperimentConfig config_for(const CommonFlags& f, const Scenario& s, std::vector<std::string> default_managers,
                            std::vector<double> default_caps) {
  ExperimentConfig c;
  c.duration_ms = f.duration_ms;
  c.workers = f.workers;
  auto names = f.managers.empty() ? default_managers : split_list(f.managers);
  c.managers.clear();
  for (const auto& n : names) {
    try {
      c.managers.push_back(manager_from_string(n));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  if (f.caps.empty()) {
    c.caps = std::move(default_caps);
  } else {
    for (const auto& t : split_list(f.caps)) {
      try {
        c.caps.push_back(parse_double(t));
      } catch (const std::invalid_argument&) {
        throw UsageError("bad cap '" + t + "'");
      }
    }
  }
  try {
    validate(c, s);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::filesystem::path prepare_out(const std::string& out) {
  std::filesystem::path dir = out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void print_summaries(std::ostream& out, const ExperimentResult& r) {
  for (const auto& m : r.summaries)
    out << m.manager << " cap=" << (m.cap ? format_fixed(*m.cap, 2) : std::string("schedule"))
        << " instr=" << format_fixed(m.total_instr, 3) << " normalized=" << format_fixed(m.normalized_instr, 4)
        << " qos_met=" << format_fixed(m.qos_met_fraction, 2) << " mean_power=" << format_fixed(m.mean_power, 2)
        << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-capped multicore scheduling simulator"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 1;
  std::size_t gen_apps = 32;
  std::string gen_out = "scenario";
  bool gen_hetero = false;
  auto* gen = app.add_subcommand("generate", "write a synthetic reference scenario");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--apps", gen_apps, "cores (homogeneous: half batch apps, half LC service)")->required();
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--hetero", gen_hetero, "big/small cores, batch apps only");

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "simulate managers over a trace; per-quantum CSV and summary JSON");
  add_common(run, run_flags);

  CommonFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "normalized instructions per (manager, cap)");
  add_common(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (gen->parsed()) {
      const auto s = reference_for(gen_seed, gen_apps, gen_hetero);
      const auto dir = prepare_out(gen_out);
      save_scenario(s, dir);
      out << "apps=" << s.apps.size() << " batch=" << s.batch_count() << " space_hash=" << hex64(s.space.hash())
          << " out=" << dir.string() << "\n";
      return exit_ok;
    }
    if (run->parsed()) {
      const auto s = scenario_for(run_flags);
      const auto c = config_for(run_flags, s, {s.hetero() ? "two_step" : "cuttlesys"}, {});
      const auto r = run_experiment(s, c);
      const auto dir = prepare_out(run_flags.out);
      write_file(dir / "quanta.csv", quanta_csv(s, r));
      write_file(dir / "summary.json", summary_json(s, c, r).dump(2) + "\n");
      print_summaries(out, r);
      return exit_ok;
    }
    const auto s = scenario_for(sweep_flags);
    const std::vector<std::string> defaults =
        s.hetero() ? std::vector<std::string>{"two_step", "one_step", "no_gating"}
                   : std::vector<std::string>{"cuttlesys", "core_gating", "asym_fixed_5050", "no_gating"};
    const auto c = config_for(sweep_flags, s, defaults, {0.9, 0.8, 0.7, 0.6, 0.5});
    const auto r = run_experiment(s, c);
    const auto dir = prepare_out(sweep_flags.out);
    write_file(dir / "sweep.csv", sweep_csv(s, r));
    write_file(dir / "summary.json", summary_json(s, c, r).dump(2) + "\n");
    print_summaries(out, r);
    return exit_ok;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const ParseError& e) {
    err << "bad input: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const DomainError& e) {
    err << "bad input: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_infeasible;
  }
}

}  // namespace rsched
