#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "macgame/iine.hpp"
#include "macgame/presets.hpp"
#include "macgame/sim.hpp"

using namespace macgame;

namespace {

PolicyTable never_transmit_policy(const StateActionSpace& sp) {
  PolicyTable policy{sp, std::vector<double>(sp.num_pairs(), 0.0),
                     std::vector<std::uint8_t>(sp.num_states(), 0)};
  for (std::size_t x = 0; x < sp.num_states(); ++x)
    policy.probs[sp.pair_index(x, sp.action_index(false, 0))] = 1.0;
  return policy;
}

SimConfig quick_config(long long horizon = 200'000, std::uint64_t seed = 3) {
  SimConfig config;
  config.horizon = horizon;
  config.burn_in = 5'000;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("silent policies earn and spend nothing") {
  const Scenario s = replicate_symmetric(builtin_presets()[0].scenario, 2);
  const StateActionSpace sp(s.users[0]);
  const std::vector<PolicyTable> policies(2, never_transmit_policy(sp));
  const SimStats stats = simulate(s, policies, quick_config(50'000));
  for (const UserSimStats& u : stats.users) {
    CHECK(u.throughput.mean == 0.0);
    CHECK(u.power.mean == 0.0);
    CHECK(u.snr.mean == 0.0);
    CHECK(u.drop_rate.mean > 0.0);  // everything is rejected
  }
}

TEST_CASE("single-user best response simulates to its LP value") {
  const Scenario s = builtin_presets()[0].scenario;
  auto [profile, trace] = iterate_best_response(initial_profile(s));
  REQUIRE(trace.converged);
  const ValidationReport report = validate_profile(s, profile, quick_config(400'000));
  REQUIRE(report.users.size() == 1);
  for (const QuantityCheck& q : report.users[0].quantities) {
    INFO(q.name, ": sim ", q.simulated, " pred ", q.predicted, " se ", q.se);
    CHECK(q.pass);
  }
  CHECK(report.users[0].flagged_state_visits == 0);
}

TEST_CASE("feasible policies respect the budget caps in simulation") {
  const Scenario s = builtin_presets()[2].scenario;
  const TransitionKernel kernel = build_transition_kernel(s.users[0]);
  const OccupationMeasure z = lemma_feasible_measure(s.users[0], kernel);
  const SimStats stats = simulate(s, {extract_policy(z)}, quick_config());
  const UserSimStats& u = stats.users[0];
  CHECK(u.power.mean <= s.users[0].power_cap + 3.0 * u.power.se);
  CHECK(u.queue.mean <= s.users[0].queue_cap + 3.0 * u.queue.se);
}

TEST_CASE("identical seeds reproduce identical statistics") {
  const Scenario s = replicate_symmetric(builtin_presets()[0].scenario, 2);
  const TransitionKernel kernel = build_transition_kernel(s.users[0]);
  const IineResult iine = compute_iine(s.users[0], kernel);
  const std::vector<PolicyTable> policies(2, extract_policy(iine.measure));
  const SimStats a = simulate(s, policies, quick_config(100'000, 99));
  const SimStats b = simulate(s, policies, quick_config(100'000, 99));
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].throughput.mean == b.users[i].throughput.mean);
    CHECK(a.users[i].queue.se == b.users[i].queue.se);
    CHECK(a.users[i].occupation == b.users[i].occupation);
  }
  const SimStats c = simulate(s, policies, quick_config(100'000, 100));
  CHECK(a.users[0].throughput.mean != c.users[0].throughput.mean);
}

TEST_CASE("per-user streams are stable when a user joins") {
  const Scenario s1 = builtin_presets()[0].scenario;
  const Scenario s2 = replicate_symmetric(s1, 2);
  const TransitionKernel kernel = build_transition_kernel(s1.users[0]);
  const IineResult iine = compute_iine(s1.users[0], kernel);
  const PolicyTable policy = extract_policy(iine.measure);
  const SimConfig config = quick_config(100'000, 42);

  const SimStats alone = simulate(s1, {policy}, config);
  const SimStats joined = simulate(s2, {policy, policy}, config);
  // User 0's own state/action path is untouched by user 1's arrival; only
  // the interference-dependent throughput may change.
  CHECK(alone.users[0].power.mean == joined.users[0].power.mean);
  CHECK(alone.users[0].queue.mean == joined.users[0].queue.mean);
  CHECK(alone.users[0].snr.mean == joined.users[0].snr.mean);
  CHECK(alone.users[0].occupation == joined.users[0].occupation);
  CHECK(alone.users[0].throughput.mean != joined.users[0].throughput.mean);
}

TEST_CASE("profile validation passes on a solver profile") {
  const Scenario s2 = replicate_symmetric(builtin_presets()[0].scenario, 2);
  const TransitionKernel kernel = build_transition_kernel(s2.users[0]);
  const IineResult iine = compute_iine(s2.users[0], kernel);
  GameProfile profile{s2, {iine.measure, iine.measure}};
  const ValidationReport good = validate_profile(s2, profile, quick_config(400'000, 12));
  CHECK(good.pass);
}

TEST_CASE("a mismatched policy/measure pair is detected") {
  // Simulate the lemma policy but predict with the IINE measure; the bands
  // must flag the disagreement.
  const Scenario s2 = replicate_symmetric(builtin_presets()[0].scenario, 2);
  const TransitionKernel kernel = build_transition_kernel(s2.users[0]);
  const IineResult iine = compute_iine(s2.users[0], kernel);
  const OccupationMeasure lemma = lemma_feasible_measure(s2.users[0], kernel);

  const SimStats stats =
      simulate(s2, {extract_policy(lemma), extract_policy(lemma)}, quick_config(400'000, 12));
  const double predicted_snr = sensitive_reward(iine.measure, 1);
  const UserSimStats& u = stats.users[0];
  CHECK(std::abs(u.snr.mean - predicted_snr) > 3.0 * u.snr.se + 1e-7);
}

TEST_CASE("LP cost functionals agree with Monte-Carlo time averages") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Scenario s = builtin_presets()[1].scenario;
  const TransitionKernel kernel = build_transition_kernel(s.users[0]);
  LinearProgram lp = build_polytope(s.users[0], kernel);
  for (double& v : lp.objective) v = u(rng);
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  const OccupationMeasure z{kernel.space, sol.x};

  const SimStats stats = simulate(s, {extract_policy(z)}, quick_config(400'000, 21));
  const UserSimStats& stats0 = stats.users[0];
  CHECK(std::abs(stats0.power.mean - avg_power(z)) <= 3.0 * stats0.power.se + 1e-7);
  CHECK(std::abs(stats0.queue.mean - avg_queue(z)) <= 3.0 * stats0.queue.se + 1e-7);
  CHECK(std::abs(stats0.snr.mean - sensitive_reward(z, 1)) <= 3.0 * stats0.snr.se + 1e-7);
}

TEST_CASE("validation CSV schema") {
  const Scenario s = builtin_presets()[6].scenario;
  const TransitionKernel kernel = build_transition_kernel(s.users[0]);
  const IineResult iine = compute_iine(s.users[0], kernel);
  GameProfile profile{s, {iine.measure}};
  const ValidationReport report = validate_profile(s, profile, quick_config(100'000));
  const std::string csv = validation_to_csv(report);
  CHECK(csv.rfind("user,quantity,simulated,se,predicted,pass\n", 0) == 0);
  CHECK(csv.find("throughput") != std::string::npos);
  CHECK(csv.find("occupation_linf_excess") != std::string::npos);
}
