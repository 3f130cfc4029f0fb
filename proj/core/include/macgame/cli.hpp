#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "macgame/game.hpp"
#include "macgame/iine.hpp"
#include "macgame/sim.hpp"

namespace macgame {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitInputError = 3;

struct CliOptions {
  std::vector<std::string> scenarios;  ///< preset names or file paths
  std::string out_dir = ".";
  int n_max = 4;
  double epsilon = 1e-9;
  std::uint64_t seed = 1;
  long long horizon = 1'000'000;
  bool check = false;  ///< compare against embedded preset expectations
};

/// One scenario per row: parameters, distinct-SNR count M and invariance
/// threshold N*. Writes <out>/table1.csv. Non-convergence is flagged per
/// row, never aborts the batch. With --check all scenarios must be presets.
int cmd_table1(const CliOptions& options, std::ostream& log);

/// N = 1..n_max equilibrium-vs-invariant-policy comparison for one symmetric
/// scenario. Writes <out>/sweep_<name>.csv with columns
/// N,l2_distance,reward_diff,l1_diff,converged.
int cmd_sweep(const CliOptions& options, std::ostream& log);

/// Best-response iteration on the scenario as given. Writes
/// <out>/solve_measures.csv and <out>/solve_trace.csv.
int cmd_solve(const CliOptions& options, std::ostream& log);

/// Lexicographic invariant policy of the scenario's first user. Writes
/// <out>/iine_stages.csv, iine_measure.csv, iine_marginal.csv.
int cmd_iine(const CliOptions& options, std::ostream& log);

/// Builds the all-IINE profile for the scenario's users, simulates it and
/// cross-checks every LP-predicted quantity. Writes <out>/simulate_report.csv.
int cmd_simulate(const CliOptions& options, std::ostream& log);

}  // namespace macgame
