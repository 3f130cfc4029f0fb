#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace macgame {

/// Row-major dense matrix; row-stochastic where noted.
using Matrix = std::vector<std::vector<double>>;

/// Parameters of one transmitter: channel/power/queue grids, average-cost
/// caps, Poisson arrival rate and the channel transition chain.
struct UserSpec {
  int channel_levels = 1;     ///< K; channel gains are {0, 1/K, ..., 1}
  int power_levels = 1;       ///< L; power values are {0, 1, ..., L}
  int buffer_size = 1;        ///< Q; queue states are {0, ..., Q}
  double power_cap = 1.0;     ///< average transmit-power budget
  double queue_cap = 1.0;     ///< average queue-length budget
  double arrival_rate = 1.0;  ///< Poisson arrival parameter, > 0
  Matrix channel_chain;       ///< (K+1)x(K+1) row-stochastic channel chain

  bool operator==(const UserSpec&) const = default;
};

struct Scenario {
  std::vector<UserSpec> users;
  double noise_variance = 1.0;
  bool symmetric = false;  ///< true iff all users are element-wise equal
};

/// Throws std::invalid_argument on violated invariants (grid sizes >= 1,
/// positive rate/caps, row-stochastic chain within 1e-12).
void validate(const UserSpec& spec);
void validate(const Scenario& scenario);

/// Fixed enumeration of per-user states and actions.
///
/// States are (h_index, queue) pairs, h outer and q inner:
///   state = h_index * (Q+1) + queue.
/// Actions are (admit, power_index) pairs, admit outer and power inner:
///   action = admit * (L+1) + power_index.
/// The LP variable for pair (state, action) is state * num_actions() + action.
/// This order is part of the output contract; solver results are reproducible
/// only because it never changes.
class StateActionSpace {
 public:
  StateActionSpace() = default;
  StateActionSpace(int channel_levels, int power_levels, int buffer_size);
  explicit StateActionSpace(const UserSpec& spec)
      : StateActionSpace(spec.channel_levels, spec.power_levels, spec.buffer_size) {}

  int channel_levels() const { return channel_levels_; }
  int power_levels() const { return power_levels_; }
  int buffer_size() const { return buffer_size_; }

  std::size_t num_states() const {
    return static_cast<std::size_t>(channel_levels_ + 1) * (buffer_size_ + 1);
  }
  std::size_t num_actions() const { return 2 * static_cast<std::size_t>(power_levels_ + 1); }
  std::size_t num_pairs() const { return num_states() * num_actions(); }

  std::size_t state_index(int h_index, int queue) const;
  std::size_t action_index(bool admit, int power_index) const;
  std::size_t pair_index(std::size_t state, std::size_t action) const {
    return state * num_actions() + action;
  }

  int state_h_index(std::size_t state) const {
    return static_cast<int>(state / (buffer_size_ + 1));
  }
  int state_queue(std::size_t state) const {
    return static_cast<int>(state % (buffer_size_ + 1));
  }
  bool action_admit(std::size_t action) const {
    return action >= static_cast<std::size_t>(power_levels_ + 1);
  }
  int action_power_index(std::size_t action) const {
    return static_cast<int>(action % (power_levels_ + 1));
  }

  double channel_gain(int h_index) const {
    return static_cast<double>(h_index) / channel_levels_;
  }
  double power_value(int power_index) const { return static_cast<double>(power_index); }

  /// Effective SNR contribution h * p * 1{q > 0}. Computed as the exact grid
  /// point (h_index * power) / K so equal products compare bit-equal.
  double snr_value(std::size_t state, std::size_t action) const {
    if (state_queue(state) == 0) return 0.0;
    return static_cast<double>(state_h_index(state) * action_power_index(action)) /
           channel_levels_;
  }

  bool operator==(const StateActionSpace&) const = default;

 private:
  int channel_levels_ = 1;
  int power_levels_ = 1;
  int buffer_size_ = 1;
};

/// Per-user transition tensor P(next_state | state, action).
struct TransitionKernel {
  StateActionSpace space;
  std::vector<double> probabilities;  ///< [state][action][next] flattened

  double at(std::size_t state, std::size_t action, std::size_t next) const {
    return probabilities[(state * space.num_actions() + action) * space.num_states() + next];
  }
  double& at(std::size_t state, std::size_t action, std::size_t next) {
    return probabilities[(state * space.num_actions() + action) * space.num_states() + next];
  }
};

/// The (K+1)x(K+1) fading chain used by the bundled scenarios: from the lowest
/// state, stay or step up with probability 1/2 each; from the highest, stay or
/// step down with probability 1/2 each; interior states step down, stay or
/// step up with probability 1/3 each. Scenario files may override the chain.
Matrix build_default_channel_chain(int channel_levels);

/// Poisson(rate) pmf truncated to {0, ..., max_accept}: mass at j < max_accept
/// is the plain pmf, mass at max_accept absorbs the whole upper tail (packets
/// beyond the free buffer space are dropped).
std::vector<double> truncated_arrival_pmf(double arrival_rate, int max_accept);

/// Queue-transition pmf over {0, ..., Q} for one (queue, action) pair:
/// transmit first (one packet, only if power > 0 and queue > 0), then admit
/// arrivals if admit is set, truncated at the buffer. Exposed so tests can
/// check the kernel factorization against an independent product.
std::vector<double> queue_transition_pmf(const UserSpec& spec, int queue, bool admit,
                                         int power_index);

/// Full kernel: channel evolves by the chain, queue by queue_transition_pmf,
/// independently of each other.
TransitionKernel build_transition_kernel(const UserSpec& spec);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON scenario document (see README for the exact grammar).
/// Unknown keys are rejected; errors name the offending key. When
/// channel_chain is omitted it defaults to build_default_channel_chain(K).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// N copies of users[0]; requires a symmetric scenario.
Scenario replicate_symmetric(const Scenario& scenario, int num_users);

}  // namespace macgame
