#include "macgame/iine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "macgame/csv.hpp"
#include "macgame/rng.hpp"

namespace macgame {

namespace {

std::vector<double> stage_objective(const StateActionSpace& sp, int k, SensitiveWeight weight) {
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  std::vector<double> obj(sp.num_pairs(), 0.0);
  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      double w;
      if (weight == SensitiveWeight::effective_snr) {
        w = sp.snr_value(x, a);
      } else {
        w = sp.channel_gain(sp.state_h_index(x)) * sp.power_value(sp.action_power_index(a));
      }
      if (w != 0.0) obj[sp.pair_index(x, a)] = sign * std::pow(w, k);
    }
  }
  return obj;
}

// Polytope with all M stage objectives pinned at their lexicographic optima.
struct PinnedSequence {
  LinearProgram lp;  // fully pinned
  std::vector<LexStageRecord> stages;
  StateActionSpace space;
};

PinnedSequence run_stages(const UserSpec& spec, const TransitionKernel& kernel,
                          const LexOptions& options, LpSolution* last_solution) {
  PinnedSequence seq;
  seq.space = kernel.space;
  seq.lp = build_polytope(spec, kernel);
  const int stage_count = static_cast<int>(distinct_snr_values(spec).size());

  for (int k = 1; k <= stage_count; ++k) {
    const std::vector<double> objective = stage_objective(seq.space, k, options.weight);
    seq.lp.objective = objective;
    const LpSolution sol = solve(seq.lp, options.solver);
    if (sol.status != LpStatus::optimal) {
      if (k == 1)
        throw std::runtime_error(std::string("compute_iine: stage-1 LP ") +
                                 to_string(sol.status));
      // With pins this wide the previous optimum stays feasible; reaching
      // here means the tolerances are misconfigured.
      throw std::runtime_error("compute_iine: internal error, stage " + std::to_string(k) +
                               " LP " + to_string(sol.status));
    }
    if (k == 1 && sol.value <= 0.0)
      throw std::runtime_error(
          "IINE premise violated: no feasible policy with positive time-average SNR");
    seq.stages.push_back({k, sol.value, 2 * (k - 1)});
    seq.lp = with_pinned_objective(seq.lp, objective, sol.value, options.pin_tol);
    if (last_solution != nullptr) *last_solution = sol;
  }
  return seq;
}

}  // namespace

std::vector<double> distinct_snr_values(const UserSpec& spec) {
  std::set<long long> products;
  for (int k = 0; k <= spec.channel_levels; ++k)
    for (int p = 0; p <= spec.power_levels; ++p)
      products.insert(static_cast<long long>(k) * p);
  std::vector<double> out;
  out.reserve(products.size());
  for (long long n : products)
    out.push_back(static_cast<double>(n) / spec.channel_levels);
  return out;
}

IineResult compute_iine(const UserSpec& spec, const TransitionKernel& kernel,
                        const LexOptions& options) {
  LpSolution last;
  PinnedSequence seq = run_stages(spec, kernel, options, &last);

  IineResult result;
  result.measure = OccupationMeasure{seq.space, last.x};
  result.stages = std::move(seq.stages);
  result.distinct_values = static_cast<int>(result.stages.size());
  result.snr_marginal = snr_distribution(result.measure);
  return result;
}

std::vector<OccupationMeasure> iine_tiebreak_samples(const UserSpec& spec,
                                                     const TransitionKernel& kernel, int trials,
                                                     std::uint64_t seed,
                                                     const LexOptions& options) {
  if (trials < 1) throw std::invalid_argument("iine_tiebreak_samples: trials must be >= 1");
  PinnedSequence seq = run_stages(spec, kernel, options, nullptr);

  std::vector<OccupationMeasure> samples;
  RandomStream stream(seed, 0, 0);
  for (int t = 0; t < trials; ++t) {
    LinearProgram lp = seq.lp;
    for (double& c : lp.objective) c = 2.0 * stream.uniform() - 1.0;
    const LpSolution sol = solve(lp, options.solver);
    if (sol.status != LpStatus::optimal)
      throw std::runtime_error(std::string("iine_tiebreak_samples: LP ") +
                               to_string(sol.status));
    samples.push_back(OccupationMeasure{seq.space, sol.x});
  }
  return samples;
}

std::vector<double> marginal_on_grid(const OccupationMeasure& z,
                                     const std::vector<double>& grid) {
  const SnrDistribution dist = snr_distribution(z);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    bool placed = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (std::abs(dist.support[i] - grid[g]) <= 1e-9) {
        out[g] += dist.pmf[i];
        placed = true;
        break;
      }
    }
    if (!placed && dist.pmf[i] > 1e-12)
      throw std::runtime_error("marginal_on_grid: support value off the grid");
  }
  return out;
}

double snr_marginal_uniqueness_check(const UserSpec& spec, const TransitionKernel& kernel,
                                     int trials, std::uint64_t seed, const LexOptions& options) {
  const std::vector<OccupationMeasure> samples =
      iine_tiebreak_samples(spec, kernel, trials, seed, options);
  const std::vector<double> grid = distinct_snr_values(spec);

  std::vector<std::vector<double>> marginals;
  for (const OccupationMeasure& z : samples) marginals.push_back(marginal_on_grid(z, grid));

  double max_distance = 0.0;
  for (std::size_t i = 0; i < marginals.size(); ++i)
    for (std::size_t j = i + 1; j < marginals.size(); ++j)
      for (std::size_t g = 0; g < grid.size(); ++g)
        max_distance = std::max(max_distance, std::abs(marginals[i][g] - marginals[j][g]));
  return max_distance;
}

InvarianceReport find_invariance_threshold(const Scenario& scenario, int n_max,
                                           const InvarianceOptions& options) {
  validate(scenario);
  if (!scenario.symmetric)
    throw std::invalid_argument("find_invariance_threshold: scenario must be symmetric");
  if (n_max < 1) throw std::invalid_argument("find_invariance_threshold: n_max must be >= 1");

  const UserSpec& spec = scenario.users.front();
  const TransitionKernel kernel = build_transition_kernel(spec);

  InvarianceReport report;
  report.iine = compute_iine(spec, kernel, options.lex);
  const double iine_mean_snr = report.iine.stages.front().value;

  for (int n = 1; n <= n_max; ++n) {
    const Scenario sized = replicate_symmetric(scenario, n);
    GameProfile iine_profile;
    iine_profile.scenario = sized;
    iine_profile.measures.assign(static_cast<std::size_t>(n), report.iine.measure);

    InvarianceRow row;
    row.num_users = n;
    const std::vector<double> gaps = verify_epsilon_ne(iine_profile, options.iterate.solver);
    row.max_gap = *std::max_element(gaps.begin(), gaps.end());

    if (options.with_best_response) {
      auto [ne_profile, trace] =
          iterate_best_response(initial_profile(sized), options.iterate);
      row.br_converged = trace.converged;
      const std::vector<double>& ne = ne_profile.measures.front().z;
      const std::vector<double>& star = report.iine.measure.z;
      double dl2 = 0.0;
      for (std::size_t k = 0; k < ne.size(); ++k) {
        const double d = ne[k] - star[k];
        dl2 += d * d;
      }
      row.l2_distance = std::sqrt(dl2);
      row.reward_diff =
          std::abs(average_rate(0, ne_profile) - average_rate(0, iine_profile));
      row.l1_diff =
          std::abs(sensitive_reward(ne_profile.measures.front(), 1) - iine_mean_snr);
    }
    report.rows.push_back(row);
  }

  // Threshold = start of the trailing run of N whose gaps stay below tol.
  int threshold = 0;
  for (int n = n_max; n >= 1; --n) {
    if (report.rows[n - 1].max_gap <= options.gap_tol)
      threshold = n;
    else
      break;
  }
  report.reached = threshold != 0;
  report.threshold = threshold;
  return report;
}

std::string stages_to_csv(const std::vector<LexStageRecord>& stages) {
  std::ostringstream os;
  os << "k,value,pins\n";
  for (const LexStageRecord& s : stages)
    os << s.k << ',' << format_double(s.value) << ',' << s.pins << '\n';
  return os.str();
}

std::string marginal_to_csv(const SnrDistribution& dist) {
  std::ostringstream os;
  os << "value,prob\n";
  for (std::size_t i = 0; i < dist.support.size(); ++i)
    os << format_double(dist.support[i]) << ',' << format_double(dist.pmf[i]) << '\n';
  return os.str();
}

}  // namespace macgame
