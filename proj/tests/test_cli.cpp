#include <doctest.h>

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "rsched/cli.hpp"
#include "rsched/text_io.hpp"
#include "test_util.hpp"

using namespace rsched;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"rsched"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : store) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;
}

}  // namespace

TEST_CASE("generate then run twice gives identical bytes") {
  TempDir dir("cli_det");
  const auto scen = (dir / "scen").string();
  REQUIRE(cli({"generate", "--seed", "5", "--apps", "8", "--out", scen}).code == exit_ok);
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  REQUIRE(cli({"run", "--scenario", scen, "--duration-ms", "200", "--caps", "0.7", "--out", a}).code == exit_ok);
  REQUIRE(cli({"run", "--scenario", scen, "--duration-ms", "200", "--caps", "0.7", "--out", b}).code == exit_ok);
  CHECK(read_file(dir / "a" / "quanta.csv") == read_file(dir / "b" / "quanta.csv"));
  CHECK(read_file(dir / "a" / "summary.json") == read_file(dir / "b" / "summary.json"));
  CHECK(read_file(dir / "a" / "quanta.csv").rfind("# seed=5 config_hash=", 0) == 0);
}

TEST_CASE("run fans out one row per manager per quantum") {
  TempDir dir("cli_fan");
  const auto out = (dir / "o").string();
  const auto r = cli({"run", "--apps", "8", "--managers", "cuttlesys,core_gating", "--caps", "0.7", "--duration-ms",
                      "300", "--out", out});
  REQUIRE(r.code == exit_ok);
  CHECK(data_rows(read_file(dir / "o" / "quanta.csv")) == 6);
  CHECK(r.out.find("core_gating cap=0.70") != std::string::npos);
}

TEST_CASE("sweep writes one row per manager and cap") {
  TempDir dir("cli_sweep");
  const auto out = (dir / "s").string();
  REQUIRE(cli({"sweep", "--apps", "8", "--duration-ms", "100", "--out", out}).code == exit_ok);
  const auto csv = read_file(dir / "s" / "sweep.csv");
  CHECK(data_rows(csv) == 20);
  CHECK(csv.find("manager,cap,total_instr,normalized_instr,qos_met_fraction,mean_power,over_budget_ms") !=
        std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir dir("cli_exit");
  CHECK(cli({"generate", "--apps", "0", "--out", (dir / "g").string()}).code == exit_usage);
  CHECK(cli({"generate", "--apps", "7", "--out", (dir / "g").string()}).code == exit_usage);
  CHECK(cli({"generate"}).code == exit_usage);
  CHECK(cli({}).code == exit_usage);
  CHECK(cli({"--help"}).code == exit_ok);
  CHECK(cli({"run", "--apps", "8", "--managers", "fastest", "--out", (dir / "r").string()}).code == exit_usage);
  CHECK(cli({"run", "--apps", "8", "--caps", "1.5", "--out", (dir / "r").string()}).code == exit_usage);
  CHECK(cli({"run", "--apps", "8", "--duration-ms", "150", "--out", (dir / "r").string()}).code == exit_usage);
  CHECK(cli({"run", "--scenario", (dir / "nowhere").string()}).code == exit_io);

  write_file(dir / "broken.json", "{ \"n_cores\": ");
  CHECK(cli({"run", "--scenario", (dir / "broken.json").string(), "--out", (dir / "r").string()}).code ==
        exit_infeasible);
  CHECK(cli({"run", "--apps", "8", "--managers", "two_step", "--duration-ms", "100", "--out",
             (dir / "r").string()})
            .code == exit_infeasible);

  // A regular file where the output directory should go.
  write_file(dir / "blocker", "x");
  CHECK(cli({"run", "--apps", "8", "--duration-ms", "100", "--out", (dir / "blocker").string()}).code == exit_io);
}

TEST_CASE("heterogeneous run") {
  TempDir dir("cli_het");
  const auto out = (dir / "h").string();
  const auto r = cli({"run", "--apps", "8", "--hetero", "--managers", "two_step,one_step", "--caps", "0.6",
                      "--duration-ms", "100", "--out", out});
  REQUIRE(r.code == exit_ok);
  CHECK(data_rows(read_file(dir / "h" / "quanta.csv")) == 2);
}
