#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "macgame/cmdp.hpp"
#include "macgame/lp.hpp"
#include "macgame/model.hpp"

namespace macgame {

/// Discrete distribution of the effective SNR value h*p*1{q>0} induced by an
/// occupation measure. Support strictly increasing, may start at 0.
struct SnrDistribution {
  std::vector<double> support;
  std::vector<double> pmf;
};

struct GameProfile {
  Scenario scenario;
  std::vector<OccupationMeasure> measures;  ///< one per user
};

struct SweepRecord {
  int sweep = 0;
  std::vector<double> rewards;  ///< per-user average rate after the sweep
  double potential = 0.0;
  double delta_l2 = 0.0;    ///< l2 change of the concatenated measures
  double delta_linf = 0.0;  ///< linf change of the concatenated measures
  double reward_delta = 0.0;
};

struct IterationTrace {
  std::vector<SweepRecord> sweeps;
  bool converged = false;
};

/// The printed loop guard continues only while BOTH the profile change and
/// the reward change are >= eps, i.e. it stops as soon as either drops below
/// (either_change_below). both_changes_below is the stricter reading.
enum class TerminationRule { either_change_below, both_changes_below };

struct IterateOptions {
  double epsilon = 1e-9;
  int max_sweeps = 500;
  TerminationRule termination = TerminationRule::either_change_below;
  /// A user keeps its current measure when it is already within this of the
  /// best-response optimum; the incumbent is then itself a valid selection
  /// from the best-response set, and fixed points stay fixed.
  double stationary_tol = 1e-9;
  SolverOptions solver;
};

SnrDistribution snr_distribution(const OccupationMeasure& z);

/// Exact pmf of the sum of independent variables; empty input gives a point
/// mass at 0. Support values closer than 1e-12 are merged.
SnrDistribution convolve(const std::vector<SnrDistribution>& dists);

/// Expected rate of user `user` per (state, action) pair, with the
/// interference marginalized through one convolution of the other users' SNR
/// distributions instead of the exponential product-sum.
std::vector<double> expected_rate_coefficients(std::size_t user, const GameProfile& profile);

/// Literal product-measure expectation; O(|X x A|^(N-1)), refuses N > 4.
/// Test oracle for expected_rate_coefficients.
std::vector<double> naive_expected_rate(std::size_t user, const GameProfile& profile);

double average_rate(std::size_t user, const GameProfile& profile);

/// Exact potential of the game: expectation of log2(1 + sum_j snr_j / N0)
/// under the product of all users' measures. Unilateral differences of any
/// user's average rate equal differences of this value.
double potential_value(const GameProfile& profile);

struct BestResponseResult {
  OccupationMeasure measure;  ///< a vertex optimum, deterministic
  double value = 0.0;         ///< optimal average rate against the profile
  double incumbent_value = 0.0;  ///< average rate of the user's current measure
};

BestResponseResult best_response(std::size_t user, const GameProfile& profile,
                                 const SolverOptions& options = {});

enum class InitialProfileKind { lemma, lp_vertex };

GameProfile initial_profile(const Scenario& scenario,
                            InitialProfileKind kind = InitialProfileKind::lemma);

/// Gauss-Seidel best-response sweeps over users 1..N, in place, until the
/// termination rule fires or max_sweeps is exceeded (trace.converged false).
std::pair<GameProfile, IterationTrace> iterate_best_response(GameProfile initial,
                                                             const IterateOptions& options = {});

/// Per-user deviation gaps: best-response value minus current average rate.
/// The profile is an eps-equilibrium iff the max gap is <= eps.
std::vector<double> verify_epsilon_ne(const GameProfile& profile,
                                      const SolverOptions& options = {});

/// CSV: sweep,user,reward,potential,delta_l2,delta_linf (per-sweep fields
/// repeated on each user row).
std::string trace_to_csv(const IterationTrace& trace);

}  // namespace macgame
