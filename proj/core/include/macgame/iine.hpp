#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macgame/cmdp.hpp"
#include "macgame/game.hpp"
#include "macgame/model.hpp"

namespace macgame {

struct LexStageRecord {
  int k = 0;           ///< stage index, 1-based
  double value = 0.0;  ///< optimal signed SNR moment at this stage
  int pins = 0;        ///< pinned-objective inequality rows present (2(k-1))
};

struct IineResult {
  OccupationMeasure measure;          ///< the final-stage optimum
  std::vector<LexStageRecord> stages;
  int distinct_values = 0;            ///< M; also the stage count
  SnrDistribution snr_marginal;
};

struct LexOptions {
  double pin_tol = 1e-9;
  SensitiveWeight weight = SensitiveWeight::effective_snr;
  SolverOptions solver;
};

/// Sorted distinct products h*p over the user's channel and power grids,
/// zero included. Distinctness is exact (integer products over a common
/// denominator). The length M bounds the lexicographic stage count.
std::vector<double> distinct_snr_values(const UserSpec& spec);

/// Solves the M-stage lexicographic LP sequence: stage k maximizes the
/// signed k-th SNR moment over the polytope intersected with the pinned
/// optima of stages 1..k-1. Throws std::runtime_error("IINE premise
/// violated...") when the stage-1 optimum is not strictly positive.
IineResult compute_iine(const UserSpec& spec, const TransitionKernel& kernel,
                        const LexOptions& options = {});

inline constexpr std::uint64_t kDefaultTiebreakSeed = 0x9e3779b97f4a7c15ull;

/// Measures obtained by adding one random auxiliary objective after the M
/// pinned stages; all of them are equally infinitely sensitive, but the
/// occupation measures themselves may differ.
std::vector<OccupationMeasure> iine_tiebreak_samples(const UserSpec& spec,
                                                     const TransitionKernel& kernel, int trials,
                                                     std::uint64_t seed = kDefaultTiebreakSeed,
                                                     const LexOptions& options = {});

/// Max pairwise linf distance between the SNR marginals of `trials`
/// tie-break samples, evaluated on the distinct_snr_values grid. The theory
/// pins the marginal, so this should be at noise level regardless of which
/// sample the solver lands on.
double snr_marginal_uniqueness_check(const UserSpec& spec, const TransitionKernel& kernel,
                                     int trials, std::uint64_t seed = kDefaultTiebreakSeed,
                                     const LexOptions& options = {});

/// Mass of the measure's SNR marginal on each point of `grid`.
std::vector<double> marginal_on_grid(const OccupationMeasure& z, const std::vector<double>& grid);

struct InvarianceRow {
  int num_users = 0;
  double max_gap = 0.0;       ///< worst deviation gap of the all-IINE profile
  double l2_distance = 0.0;   ///< ||z_1(N) - z_1*||_2, NE vs IINE
  double reward_diff = 0.0;   ///< |T_1(NE profile) - T_1(all-IINE profile)|
  double l1_diff = 0.0;       ///< |mean SNR at NE - mean SNR at IINE|
  bool br_converged = true;
};

struct InvarianceReport {
  bool reached = false;
  int threshold = 0;  ///< smallest N from which all gaps stay <= gap_tol
  std::vector<InvarianceRow> rows;
  IineResult iine;
};

struct InvarianceOptions {
  double gap_tol = 1e-6;
  bool with_best_response = true;  ///< also run the NE iteration per N
  IterateOptions iterate;
  LexOptions lex;
};

/// Sweeps N = 1..n_max over a symmetric scenario: checks whether the
/// all-IINE profile is an equilibrium at each N and (optionally) compares it
/// against the best-response equilibrium. threshold is the start of the
/// trailing run of N with max_gap <= gap_tol.
InvarianceReport find_invariance_threshold(const Scenario& scenario, int n_max,
                                           const InvarianceOptions& options = {});

/// CSV: k,value,pins
std::string stages_to_csv(const std::vector<LexStageRecord>& stages);
/// CSV: value,prob
std::string marginal_to_csv(const SnrDistribution& dist);

}  // namespace macgame
