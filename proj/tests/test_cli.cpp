#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "macgame/cli.hpp"
#include "macgame/csv.hpp"
#include "macgame/presets.hpp"

using namespace macgame;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("macgame_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliOptions options_for(const std::string& scenario, const fs::path& out) {
  CliOptions options;
  options.scenarios = {scenario};
  options.out_dir = out.string();
  return options;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MACGAME_CLI_PATH) + " " + args;
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("preset lookup") {
  CHECK(builtin_presets().size() == 7);
  CHECK(find_preset("scenario3") != nullptr);
  CHECK(find_preset("scenario9") == nullptr);
  CHECK(scenario_from_arg("scenario1").users.size() == 1);
  CHECK_THROWS_AS(scenario_from_arg("/nonexistent/file.json"), ParseError);
}

TEST_CASE("iine command writes re-parseable CSVs") {
  const fs::path out = fresh_dir("iine");
  std::ostringstream log;
  CHECK(cmd_iine(options_for("scenario7", out), log) == kExitOk);
  const auto stages = parse_csv(read_file((out / "iine_stages.csv").string()));
  REQUIRE(!stages.empty());
  CHECK(stages.front() == std::vector<std::string>{"k", "value", "pins"});
  CHECK(stages.size() == 7);  // header + M = 6 stages
  const auto marginal = parse_csv(read_file((out / "iine_marginal.csv").string()));
  CHECK(marginal.front() == std::vector<std::string>{"value", "prob"});
  double total = 0.0;
  for (std::size_t r = 1; r < marginal.size(); ++r) total += std::stod(marginal[r][1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sweep command emits the documented schema") {
  const fs::path out = fresh_dir("sweep");
  std::ostringstream log;
  CliOptions options = options_for("scenario7", out);
  options.n_max = 2;
  CHECK(cmd_sweep(options, log) == kExitOk);
  const auto rows = parse_csv(read_file((out / "sweep_scenario7.csv").string()));
  REQUIRE(rows.size() == 3);
  CHECK(rows.front() ==
        std::vector<std::string>{"N", "l2_distance", "reward_diff", "l1_diff", "converged"});
  CHECK(rows[1][0] == "1");
  CHECK(rows[2][0] == "2");
  CHECK(rows[1][4] == "1");
}

TEST_CASE("solve command solves a scenario file") {
  const fs::path out = fresh_dir("solve");
  const fs::path scenario = out / "two_users.json";
  write_file(scenario.string(), R"({
    "users": 2, "K": 1, "L": 1, "Q": 1,
    "power_cap": 0.5, "queue_cap": 0.5, "lambda": 0.49, "noise_variance": 1.0})");
  std::ostringstream log;
  CHECK(cmd_solve(options_for(scenario.string(), out), log) == kExitOk);
  const auto measures = parse_csv(read_file((out / "solve_measures.csv").string()));
  CHECK(measures.front() ==
        std::vector<std::string>{"user", "h_index", "queue", "admit", "power", "z"});
  CHECK(measures.size() == 1 + 2 * 16);  // header + 2 users x 16 pairs
  const auto trace = parse_csv(read_file((out / "solve_trace.csv").string()));
  CHECK(trace.front() == std::vector<std::string>{"sweep", "user", "reward", "potential",
                                                  "delta_l2", "delta_linf"});
}

TEST_CASE("simulate command cross-checks the invariant profile") {
  const fs::path out = fresh_dir("simulate");
  std::ostringstream log;
  CliOptions options = options_for("scenario7", out);
  options.horizon = 100'000;
  options.seed = 5;
  CHECK(cmd_simulate(options, log) == kExitOk);
  const auto rows = parse_csv(read_file((out / "simulate_report.csv").string()));
  CHECK(rows.front() == std::vector<std::string>{"user", "quantity", "simulated", "se",
                                                 "predicted", "pass"});
}

TEST_CASE("table1 command on a matching preset") {
  const fs::path out = fresh_dir("table1");
  std::ostringstream log;
  CliOptions options = options_for("scenario7", out);
  options.n_max = 2;
  options.check = true;
  CHECK(cmd_table1(options, log) == kExitOk);
  const auto rows = parse_csv(read_file((out / "table1.csv").string()));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "scenario7");
  CHECK(rows[1][7] == "6");   // M
  CHECK(rows[1][8] == "1");   // N*
  CHECK(rows[1][12] == "1");  // match
}

TEST_CASE("table1 with no scenarios writes an empty table and succeeds") {
  const fs::path out = fresh_dir("table1_empty");
  std::ostringstream log;
  CliOptions options;
  options.out_dir = out.string();
  CHECK(cmd_table1(options, log) == kExitOk);
  const auto rows = parse_csv(read_file((out / "table1.csv").string()));
  CHECK(rows.size() == 1);  // header only
}

TEST_CASE("table1 --check refuses non-preset scenarios") {
  const fs::path out = fresh_dir("table1_files");
  const fs::path scenario = out / "custom.json";
  write_file(scenario.string(), R"({
    "users": 1, "K": 1, "L": 1, "Q": 1,
    "power_cap": 0.5, "queue_cap": 0.5, "lambda": 0.49, "noise_variance": 1.0})");
  std::ostringstream log;
  CliOptions options = options_for(scenario.string(), out);
  options.check = true;
  CHECK(cmd_table1(options, log) == kExitInputError);
}

TEST_CASE("seeded commands are byte-reproducible") {
  const fs::path out_a = fresh_dir("det_a");
  const fs::path out_b = fresh_dir("det_b");
  std::ostringstream log;
  for (const fs::path& out : {out_a, out_b}) {
    CliOptions options = options_for("scenario7", out);
    options.horizon = 50'000;
    options.seed = 11;
    REQUIRE(cmd_simulate(options, log) == kExitOk);
  }
  CHECK(read_file((out_a / "simulate_report.csv").string()) ==
        read_file((out_b / "simulate_report.csv").string()));
}

TEST_CASE("binary end to end") {
  const fs::path out = fresh_dir("binary");
  SUBCASE("table1 on a matching preset exits 0") {
    CHECK(run_binary("table1 --scenario scenario7 --nmax 2 --check --out " + out.string() +
                     " > " + (out / "log.txt").string()) == kExitOk);
  }
  SUBCASE("a missing scenario file exits 3") {
    CHECK(run_binary("solve --scenario /nonexistent.json --out " + out.string() +
                     " 2> /dev/null") == kExitInputError);
  }
  SUBCASE("bad flags exit 3") {
    CHECK(run_binary("sweep 2> /dev/null") == kExitInputError);
  }
}
