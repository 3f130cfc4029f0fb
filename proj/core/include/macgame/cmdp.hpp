#pragma once

#include <cstdint>
#include <vector>

#include "macgame/lp.hpp"
#include "macgame/model.hpp"

namespace macgame {

/// Long-run frequency z(x, a) of state-action pairs under a stationary
/// policy; the decision variable of every LP in this project. Entries may
/// carry tiny negative solver noise (>= -1e-12); at() clamps on read.
struct OccupationMeasure {
  StateActionSpace space;
  std::vector<double> z;  ///< pair-indexed, see StateActionSpace::pair_index

  double at(std::size_t state, std::size_t action) const {
    double v = z[space.pair_index(state, action)];
    return v < 0.0 ? 0.0 : v;
  }
};

/// Conditional action probabilities u(a | x). States with zero marginal in
/// the source measure get a uniform default and are flagged unvisited.
struct PolicyTable {
  StateActionSpace space;
  std::vector<double> probs;            ///< pair-indexed u(a|x)
  std::vector<std::uint8_t> unvisited;  ///< per state

  double at(std::size_t state, std::size_t action) const {
    return probs[space.pair_index(state, action)];
  }
};

/// Weight used by the k-sensitive reward. effective_snr multiplies the
/// channel-power product by 1{q > 0}, which matches how the rate treats
/// transmissions from an empty queue; channel_power is the literal product.
enum class SensitiveWeight { effective_snr, channel_power };

/// Constraint skeleton (zero objective) of the feasible-measure polytope:
/// one normalization equality, |X| balance equalities (in state order), then
/// the power and queue budget inequalities, x >= 0 implicit.
LinearProgram build_polytope(const UserSpec& spec, const TransitionKernel& kernel);

double avg_power(const OccupationMeasure& z);
double avg_queue(const OccupationMeasure& z);

/// Signed k-th moment of the effective SNR: sum of (-1)^(k+1) w^k z(x,a)
/// with w per `weight`. k = 1 is the time-average SNR.
double sensitive_reward(const OccupationMeasure& z, int k,
                        SensitiveWeight weight = SensitiveWeight::effective_snr);

PolicyTable extract_policy(const OccupationMeasure& z);

/// Stationary occupation measure of the chain induced by `policy`:
/// z(x,a) = pi(x) u(a|x) with pi the stationary distribution on the single
/// recurrent class. Throws std::runtime_error if the induced chain has more
/// than one recurrent class.
OccupationMeasure induced_occupation(const PolicyTable& policy, const TransitionKernel& kernel);

/// The explicit feasible policy: transmit at the minimum positive power
/// whenever the queue is nonempty, admit with probability s only at q = 0,
/// with s = 0.9 * min{queue_cap/Q, power_cap/Q, 1}. Satisfies both budget
/// constraints with slack and has strictly positive time-average SNR; used
/// to seed iterations. Throws std::runtime_error when no positive-SNR policy
/// exists (all channel mass at gain 0).
OccupationMeasure lemma_feasible_measure(const UserSpec& spec, const TransitionKernel& kernel);

struct MeasureResiduals {
  double normalization;  ///< |sum z - 1|
  double min_entry;      ///< most negative entry (0 if none)
  double max_balance;    ///< max abs balance-equality residual
  double power_excess;   ///< max(0, avg_power - power_cap)
  double queue_excess;   ///< max(0, avg_queue - queue_cap)
};

MeasureResiduals measure_residuals(const OccupationMeasure& z, const UserSpec& spec,
                                   const TransitionKernel& kernel);

/// CSV with one row per (state, action) pair in enumeration order:
/// h_index,queue,admit,power,z
std::string measure_to_csv(const OccupationMeasure& z);
OccupationMeasure measure_from_csv(const StateActionSpace& space, const std::string& text);

}  // namespace macgame
