#include <benchmark/benchmark.h>

#include "macgame/game.hpp"
#include "macgame/iine.hpp"
#include "macgame/presets.hpp"
#include "macgame/sim.hpp"

using namespace macgame;

namespace {

const Preset& big_preset() { return builtin_presets()[4]; }  // K=3, L=3, Q=3

static void BM_BuildTransitionKernel(benchmark::State& state) {
  const UserSpec& spec = big_preset().scenario.users.front();
  for (auto _ : state) benchmark::DoNotOptimize(build_transition_kernel(spec));
}
BENCHMARK(BM_BuildTransitionKernel);

static void BM_SolvePolytopeLp(benchmark::State& state) {
  const UserSpec& spec = big_preset().scenario.users.front();
  const TransitionKernel kernel = build_transition_kernel(spec);
  LinearProgram lp = build_polytope(spec, kernel);
  for (std::size_t x = 0; x < kernel.space.num_states(); ++x)
    for (std::size_t a = 0; a < kernel.space.num_actions(); ++a)
      lp.objective[kernel.space.pair_index(x, a)] = kernel.space.snr_value(x, a);
  for (auto _ : state) benchmark::DoNotOptimize(solve(lp));
}
BENCHMARK(BM_SolvePolytopeLp);

static void BM_ComputeIine(benchmark::State& state) {
  const UserSpec& spec = big_preset().scenario.users.front();
  const TransitionKernel kernel = build_transition_kernel(spec);
  for (auto _ : state) benchmark::DoNotOptimize(compute_iine(spec, kernel));
}
BENCHMARK(BM_ComputeIine);

static void BM_RateCoefficients4Users(benchmark::State& state) {
  const Scenario s4 = replicate_symmetric(big_preset().scenario, 4);
  const TransitionKernel kernel = build_transition_kernel(s4.users[0]);
  const IineResult iine = compute_iine(s4.users[0], kernel);
  GameProfile profile{s4, std::vector<OccupationMeasure>(4, iine.measure)};
  for (auto _ : state) benchmark::DoNotOptimize(expected_rate_coefficients(0, profile));
}
BENCHMARK(BM_RateCoefficients4Users);

static void BM_IterateBestResponse(benchmark::State& state) {
  const Scenario s2 = replicate_symmetric(builtin_presets()[0].scenario, 2);
  for (auto _ : state) {
    auto result = iterate_best_response(initial_profile(s2));
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_IterateBestResponse);

static void BM_Simulate100kSlots(benchmark::State& state) {
  const Scenario s2 = replicate_symmetric(builtin_presets()[0].scenario, 2);
  const TransitionKernel kernel = build_transition_kernel(s2.users[0]);
  const IineResult iine = compute_iine(s2.users[0], kernel);
  const std::vector<PolicyTable> policies(2, extract_policy(iine.measure));
  SimConfig config;
  config.horizon = 100'000;
  config.burn_in = 1'000;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s2, policies, config));
}
BENCHMARK(BM_Simulate100kSlots);

}  // namespace

BENCHMARK_MAIN();
