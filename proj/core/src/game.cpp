#include "macgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "macgame/csv.hpp"

namespace macgame {

namespace {

constexpr double kMergeTol = 1e-12;

void add_mass(SnrDistribution& dist, double value, double mass) {
  auto it = std::lower_bound(dist.support.begin(), dist.support.end(), value - kMergeTol);
  const std::size_t idx = static_cast<std::size_t>(it - dist.support.begin());
  if (it != dist.support.end() && std::abs(*it - value) <= kMergeTol) {
    dist.pmf[idx] += mass;
    return;
  }
  dist.support.insert(it, value);
  dist.pmf.insert(dist.pmf.begin() + idx, mass);
}

void check_profile(const GameProfile& profile) {
  if (profile.measures.size() != profile.scenario.users.size())
    throw std::invalid_argument("GameProfile: one measure per user required");
  for (std::size_t i = 0; i < profile.measures.size(); ++i)
    if (profile.measures[i].space != StateActionSpace(profile.scenario.users[i]))
      throw std::invalid_argument("GameProfile: measure " + std::to_string(i) +
                                  " does not match its user spec");
}

double interference_rate(double snr, double noise, const SnrDistribution& interference) {
  if (snr == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < interference.support.size(); ++t)
    sum += interference.pmf[t] * std::log2(1.0 + snr / (noise + interference.support[t]));
  return sum;
}

}  // namespace

SnrDistribution snr_distribution(const OccupationMeasure& z) {
  const StateActionSpace& sp = z.space;
  SnrDistribution dist;
  for (std::size_t x = 0; x < sp.num_states(); ++x)
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      const double mass = z.at(x, a);
      if (mass == 0.0) continue;  // keep the support free of unused pairs
      add_mass(dist, sp.snr_value(x, a), mass);
    }
  return dist;
}

SnrDistribution convolve(const std::vector<SnrDistribution>& dists) {
  SnrDistribution acc{{0.0}, {1.0}};
  for (const SnrDistribution& d : dists) {
    SnrDistribution next;
    for (std::size_t i = 0; i < acc.support.size(); ++i)
      for (std::size_t j = 0; j < d.support.size(); ++j)
        add_mass(next, acc.support[i] + d.support[j], acc.pmf[i] * d.pmf[j]);
    acc = std::move(next);
  }
  return acc;
}

std::vector<double> expected_rate_coefficients(std::size_t user, const GameProfile& profile) {
  check_profile(profile);
  std::vector<SnrDistribution> others;
  for (std::size_t j = 0; j < profile.measures.size(); ++j)
    if (j != user) others.push_back(snr_distribution(profile.measures[j]));
  const SnrDistribution interference = convolve(others);

  const StateActionSpace& sp = profile.measures[user].space;
  // R depends on (x, a) only through the effective SNR; cache per value.
  SnrDistribution cache;  // support = snr values, pmf = coefficients
  std::vector<double> out(sp.num_pairs(), 0.0);
  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      const double snr = sp.snr_value(x, a);
      if (snr == 0.0) continue;
      auto it = std::lower_bound(cache.support.begin(), cache.support.end(), snr - kMergeTol);
      const std::size_t idx = static_cast<std::size_t>(it - cache.support.begin());
      double coeff;
      if (it != cache.support.end() && std::abs(*it - snr) <= kMergeTol) {
        coeff = cache.pmf[idx];
      } else {
        coeff = interference_rate(snr, profile.scenario.noise_variance, interference);
        cache.support.insert(it, snr);
        cache.pmf.insert(cache.pmf.begin() + idx, coeff);
      }
      out[sp.pair_index(x, a)] = coeff;
    }
  }
  return out;
}

std::vector<double> naive_expected_rate(std::size_t user, const GameProfile& profile) {
  check_profile(profile);
  const std::size_t num_users = profile.measures.size();
  if (num_users > 4)
    throw std::invalid_argument("naive_expected_rate: refusing N > 4 (exponential cost)");

  std::vector<std::size_t> other_users;
  for (std::size_t j = 0; j < num_users; ++j)
    if (j != user) other_users.push_back(j);

  const StateActionSpace& sp = profile.measures[user].space;
  std::vector<double> out(sp.num_pairs(), 0.0);
  const double noise = profile.scenario.noise_variance;

  // Odometer over the other users' flattened (state, action) pairs.
  std::vector<std::size_t> pair(other_users.size(), 0);
  while (true) {
    double weight = 1.0;
    double interference = 0.0;
    for (std::size_t k = 0; k < other_users.size(); ++k) {
      const OccupationMeasure& zj = profile.measures[other_users[k]];
      weight *= zj.z[pair[k]];
      const StateActionSpace& spj = zj.space;
      interference +=
          spj.snr_value(pair[k] / spj.num_actions(), pair[k] % spj.num_actions());
    }
    if (weight != 0.0) {
      for (std::size_t x = 0; x < sp.num_states(); ++x)
        for (std::size_t a = 0; a < sp.num_actions(); ++a) {
          const double snr = sp.snr_value(x, a);
          if (snr == 0.0) continue;
          out[sp.pair_index(x, a)] += weight * std::log2(1.0 + snr / (noise + interference));
        }
    }
    std::size_t k = 0;
    for (; k < pair.size(); ++k) {
      if (++pair[k] < profile.measures[other_users[k]].z.size()) break;
      pair[k] = 0;
    }
    if (k == pair.size()) break;
  }
  return out;
}

double average_rate(std::size_t user, const GameProfile& profile) {
  const std::vector<double> coeffs = expected_rate_coefficients(user, profile);
  const std::vector<double>& z = profile.measures[user].z;
  double sum = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) sum += coeffs[k] * z[k];
  return sum;
}

double potential_value(const GameProfile& profile) {
  check_profile(profile);
  std::vector<SnrDistribution> all;
  for (const OccupationMeasure& z : profile.measures) all.push_back(snr_distribution(z));
  const SnrDistribution total = convolve(all);
  double sum = 0.0;
  for (std::size_t t = 0; t < total.support.size(); ++t)
    if (total.support[t] != 0.0)
      sum += total.pmf[t] * std::log2(1.0 + total.support[t] / profile.scenario.noise_variance);
  return sum;
}

BestResponseResult best_response(std::size_t user, const GameProfile& profile,
                                 const SolverOptions& options) {
  check_profile(profile);
  const UserSpec& spec = profile.scenario.users[user];
  const TransitionKernel kernel = build_transition_kernel(spec);
  LinearProgram lp = build_polytope(spec, kernel);
  lp.objective = expected_rate_coefficients(user, profile);

  const LpSolution sol = solve(lp, options);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error(std::string("best_response: LP ") + to_string(sol.status));

  BestResponseResult out;
  out.measure = OccupationMeasure{kernel.space, sol.x};
  out.value = sol.value;
  out.incumbent_value = 0.0;
  const std::vector<double>& z = profile.measures[user].z;
  for (std::size_t k = 0; k < z.size(); ++k) out.incumbent_value += lp.objective[k] * z[k];
  return out;
}

GameProfile initial_profile(const Scenario& scenario, InitialProfileKind kind) {
  validate(scenario);
  GameProfile profile;
  profile.scenario = scenario;
  for (const UserSpec& spec : scenario.users) {
    const TransitionKernel kernel = build_transition_kernel(spec);
    if (kind == InitialProfileKind::lemma) {
      profile.measures.push_back(lemma_feasible_measure(spec, kernel));
    } else {
      const LpSolution sol = solve(build_polytope(spec, kernel));
      if (sol.status != LpStatus::optimal)
        throw std::runtime_error("initial_profile: feasibility LP failed");
      profile.measures.push_back(OccupationMeasure{kernel.space, sol.x});
    }
  }
  return profile;
}

std::pair<GameProfile, IterationTrace> iterate_best_response(GameProfile profile,
                                                             const IterateOptions& options) {
  check_profile(profile);
  const std::size_t num_users = profile.measures.size();
  IterationTrace trace;

  std::vector<double> prev_rewards(num_users);
  for (std::size_t i = 0; i < num_users; ++i) prev_rewards[i] = average_rate(i, profile);

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    std::vector<std::vector<double>> prev;
    for (const OccupationMeasure& z : profile.measures) prev.push_back(z.z);

    for (std::size_t j = 0; j < num_users; ++j) {
      BestResponseResult br = best_response(j, profile, options.solver);
      // Keep the incumbent when it is already optimal; it is a member of the
      // best-response set too, and fixed points then stay fixed.
      if (br.value - br.incumbent_value > options.stationary_tol)
        profile.measures[j] = std::move(br.measure);
    }

    SweepRecord record;
    record.sweep = sweep;
    record.rewards.resize(num_users);
    for (std::size_t i = 0; i < num_users; ++i) record.rewards[i] = average_rate(i, profile);
    record.potential = potential_value(profile);

    double dl2 = 0.0, dlinf = 0.0, dreward = 0.0;
    for (std::size_t i = 0; i < num_users; ++i) {
      for (std::size_t k = 0; k < prev[i].size(); ++k) {
        const double d = profile.measures[i].z[k] - prev[i][k];
        dl2 += d * d;
        dlinf = std::max(dlinf, std::abs(d));
      }
      const double dr = record.rewards[i] - prev_rewards[i];
      dreward += dr * dr;
    }
    record.delta_l2 = std::sqrt(dl2);
    record.delta_linf = dlinf;
    record.reward_delta = std::sqrt(dreward);
    trace.sweeps.push_back(record);
    prev_rewards = record.rewards;

    const bool z_small = record.delta_l2 < options.epsilon;
    const bool t_small = record.reward_delta < options.epsilon;
    const bool stop = options.termination == TerminationRule::either_change_below
                          ? (z_small || t_small)
                          : (z_small && t_small);
    if (stop) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(profile), std::move(trace)};
}

std::vector<double> verify_epsilon_ne(const GameProfile& profile, const SolverOptions& options) {
  check_profile(profile);
  std::vector<double> gaps(profile.measures.size());
  for (std::size_t i = 0; i < profile.measures.size(); ++i) {
    const BestResponseResult br = best_response(i, profile, options);
    gaps[i] = br.value - br.incumbent_value;
  }
  return gaps;
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::ostringstream os;
  os << "sweep,user,reward,potential,delta_l2,delta_linf\n";
  for (const SweepRecord& rec : trace.sweeps)
    for (std::size_t i = 0; i < rec.rewards.size(); ++i)
      os << rec.sweep << ',' << i << ',' << format_double(rec.rewards[i]) << ','
         << format_double(rec.potential) << ',' << format_double(rec.delta_l2) << ','
         << format_double(rec.delta_linf) << '\n';
  return os.str();
}

}  // namespace macgame
