// Command-line front end: equilibrium solver, invariant-policy computation
// and Monte-Carlo cross-validation for the multiple-access power/admission
// game. See README.md for the scenario file format and CSV schemas.

#include <iostream>

#include <CLI11.hpp>

#include "macgame/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constrained Markov power/admission game solver"};
  app.require_subcommand(1);

  macgame::CliOptions options;

  auto add_common = [&](CLI::App* cmd, bool many_scenarios) {
    CLI::Option* opt = cmd->add_option("--scenario", options.scenarios,
                                       "scenario preset name(s) or file path(s)");
    if (!many_scenarios) opt->required()->expected(1);
    cmd->add_option("--out", options.out_dir, "output directory for CSV files");
    cmd->add_option("--eps", options.epsilon, "best-response termination tolerance");
    cmd->add_option("--seed", options.seed, "random seed for stochastic outputs");
  };

  CLI::App* table1 = app.add_subcommand(
      "table1", "scenario summary table: M and the invariance threshold N*");
  add_common(table1, true);
  table1->add_option("--nmax", options.n_max, "largest user count to test");
  table1->add_flag("--check", options.check, "compare against embedded preset expectations");

  CLI::App* sweep =
      app.add_subcommand("sweep", "equilibrium vs invariant policy for N = 1..nmax");
  add_common(sweep, false);
  sweep->add_option("--nmax", options.n_max, "largest user count to test");

  CLI::App* solve = app.add_subcommand("solve", "best-response iteration on one scenario");
  add_common(solve, false);

  CLI::App* iine =
      app.add_subcommand("iine", "lexicographic invariant policy of the first user");
  add_common(iine, false);

  CLI::App* simulate =
      app.add_subcommand("simulate", "simulate the invariant-policy profile and cross-check");
  add_common(simulate, false);
  simulate->add_option("--horizon", options.horizon, "slots counted after burn-in");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : macgame::kExitInputError;
  }

  try {
    if (table1->parsed()) return macgame::cmd_table1(options, std::cout);
    if (sweep->parsed()) return macgame::cmd_sweep(options, std::cout);
    if (solve->parsed()) return macgame::cmd_solve(options, std::cout);
    if (iine->parsed()) return macgame::cmd_iine(options, std::cout);
    if (simulate->parsed()) return macgame::cmd_simulate(options, std::cout);
  } catch (const macgame::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return macgame::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return macgame::kExitInputError;
  }
  return macgame::kExitInputError;
}
