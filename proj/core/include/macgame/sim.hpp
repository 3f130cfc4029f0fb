#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macgame/cmdp.hpp"
#include "macgame/game.hpp"
#include "macgame/model.hpp"

namespace macgame {

struct SimConfig {
  long long horizon = 1'000'000;  ///< slots counted after burn-in
  long long burn_in = 10'000;     ///< slots discarded to wash out (h=0, q=0)
  std::uint64_t seed = 1;
  int batches = 100;  ///< non-overlapping batch-means batches
};

struct MetricEstimate {
  double mean = 0.0;
  double se = 0.0;  ///< batch-means standard error
};

struct UserSimStats {
  MetricEstimate throughput;  ///< realized rate, bits/slot
  MetricEstimate power;
  MetricEstimate queue;
  MetricEstimate snr;       ///< realized effective SNR h*p*1{q>0}
  MetricEstimate drop_rate; ///< packets rejected or overflowed per slot
  long long flagged_state_visits = 0;  ///< counted visits to unvisited-flagged states
  std::vector<double> occupation;      ///< empirical (x,a) frequencies
  std::vector<double> occupation_se;   ///< per-cell batch-means SE
};

struct SimStats {
  std::vector<UserSimStats> users;
  long long counted_slots = 0;
};

/// Slot-by-slot execution of the stochastic system: channels evolve by their
/// chains, each user samples (admit, power) from its policy at its current
/// (h, q), rates are realized against the slot's actual interference, queues
/// update transmit-then-admit. Statistics are time averages over the
/// post-burn-in horizon. Fully reproducible from config.seed. Throws
/// std::logic_error if a queue ever leaves [0, Q] or a nonzero rate is
/// realized from an empty queue.
SimStats simulate(const Scenario& scenario, const std::vector<PolicyTable>& policies,
                  const SimConfig& config);

struct QuantityCheck {
  std::string name;
  double simulated = 0.0;
  double se = 0.0;
  double predicted = 0.0;
  bool pass = false;  ///< |simulated - predicted| <= 3 se (+ tiny slack)
};

struct UserValidation {
  std::vector<QuantityCheck> quantities;  ///< throughput, power, queue, snr
  double occupation_max_excess = 0.0;  ///< max over cells of |emp - z| - 3 se
  bool occupation_pass = false;
  long long flagged_state_visits = 0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<UserValidation> users;
  SimStats stats;
  bool pass = false;
};

/// Extracts the profile's policies, simulates them, and compares every
/// LP-predicted quantity with its empirical counterpart at 3-standard-error
/// bands, including the per-cell occupation frequencies.
ValidationReport validate_profile(const Scenario& scenario, const GameProfile& profile,
                                  const SimConfig& config);

/// CSV: user,quantity,simulated,se,predicted,pass
std::string validation_to_csv(const ValidationReport& report);

}  // namespace macgame
