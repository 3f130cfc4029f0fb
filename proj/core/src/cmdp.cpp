#include "macgame/cmdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "macgame/csv.hpp"

namespace macgame {

namespace {

constexpr double kPolicyFloor = 1e-12;  // action probabilities below are solver noise

double weight_value(const StateActionSpace& sp, std::size_t x, std::size_t a,
                    SensitiveWeight weight) {
  if (weight == SensitiveWeight::effective_snr) return sp.snr_value(x, a);
  return sp.channel_gain(sp.state_h_index(x)) * sp.power_value(sp.action_power_index(a));
}

// Recurrent classes of the state chain: strongly connected components with
// no outgoing edge. Kosaraju on <= a few dozen nodes.
std::vector<std::vector<std::size_t>> recurrent_classes(
    const std::vector<std::vector<double>>& chain) {
  const std::size_t n = chain.size();
  std::vector<std::vector<std::size_t>> fwd(n), rev(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (chain[x][y] > 0.0) {
        fwd[x].push_back(y);
        rev[y].push_back(x);
      }
    }
  }
  std::vector<std::size_t> order;
  std::vector<char> seen(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    // iterative post-order
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < fwd[node].size()) {
        const std::size_t y = fwd[node][next++];
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back({y, 0});
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }
  std::vector<int> component(n, -1);
  int num_components = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component[*it] >= 0) continue;
    std::vector<std::size_t> stack{*it};
    component[*it] = num_components;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : rev[x]) {
        if (component[y] < 0) {
          component[y] = num_components;
          stack.push_back(y);
        }
      }
    }
    ++num_components;
  }
  std::vector<char> leaves(num_components, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y : fwd[x])
      if (component[x] != component[y]) leaves[component[x]] = 1;
  std::vector<std::vector<std::size_t>> classes(num_components);
  for (std::size_t x = 0; x < n; ++x) classes[component[x]].push_back(x);
  std::vector<std::vector<std::size_t>> out;
  for (int c = 0; c < num_components; ++c)
    if (!leaves[c]) out.push_back(std::move(classes[c]));
  return out;
}

}  // namespace

LinearProgram build_polytope(const UserSpec& spec, const TransitionKernel& kernel) {
  validate(spec);
  const StateActionSpace& sp = kernel.space;
  if (sp != StateActionSpace(spec))
    throw std::invalid_argument("build_polytope: kernel does not match spec");

  LinearProgram lp;
  lp.num_vars = sp.num_pairs();
  lp.objective.assign(lp.num_vars, 0.0);

  lp.eq_rows.push_back(std::vector<double>(lp.num_vars, 1.0));  // normalization
  lp.eq_rhs.push_back(1.0);
  for (std::size_t y = 0; y < sp.num_states(); ++y) {
    std::vector<double> row(lp.num_vars, 0.0);
    for (std::size_t x = 0; x < sp.num_states(); ++x) {
      for (std::size_t a = 0; a < sp.num_actions(); ++a) {
        const double indicator = (x == y) ? 1.0 : 0.0;
        row[sp.pair_index(x, a)] = indicator - kernel.at(x, a, y);
      }
    }
    lp.eq_rows.push_back(std::move(row));
    lp.eq_rhs.push_back(0.0);
  }

  std::vector<double> power_row(lp.num_vars, 0.0);
  std::vector<double> queue_row(lp.num_vars, 0.0);
  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      power_row[sp.pair_index(x, a)] = sp.power_value(sp.action_power_index(a));
      queue_row[sp.pair_index(x, a)] = sp.state_queue(x);
    }
  }
  lp.ineq_rows.push_back(std::move(power_row));
  lp.ineq_rhs.push_back(spec.power_cap);
  lp.ineq_rows.push_back(std::move(queue_row));
  lp.ineq_rhs.push_back(spec.queue_cap);
  return lp;
}

double avg_power(const OccupationMeasure& z) {
  const StateActionSpace& sp = z.space;
  double sum = 0.0;
  for (std::size_t x = 0; x < sp.num_states(); ++x)
    for (std::size_t a = 0; a < sp.num_actions(); ++a)
      sum += sp.power_value(sp.action_power_index(a)) * z.z[sp.pair_index(x, a)];
  return sum;
}

double avg_queue(const OccupationMeasure& z) {
  const StateActionSpace& sp = z.space;
  double sum = 0.0;
  for (std::size_t x = 0; x < sp.num_states(); ++x)
    for (std::size_t a = 0; a < sp.num_actions(); ++a)
      sum += sp.state_queue(x) * z.z[sp.pair_index(x, a)];
  return sum;
}

double sensitive_reward(const OccupationMeasure& z, int k, SensitiveWeight weight) {
  if (k < 1) throw std::invalid_argument("sensitive_reward: k must be >= 1");
  const StateActionSpace& sp = z.space;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^(k+1)
  double sum = 0.0;
  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      const double w = weight_value(sp, x, a, weight);
      if (w == 0.0) continue;
      sum += std::pow(w, k) * z.z[sp.pair_index(x, a)];
    }
  }
  return sign * sum;
}

PolicyTable extract_policy(const OccupationMeasure& z) {
  const StateActionSpace& sp = z.space;
  PolicyTable policy;
  policy.space = sp;
  policy.probs.assign(sp.num_pairs(), 0.0);
  policy.unvisited.assign(sp.num_states(), 0);

  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    double marginal = 0.0;
    for (std::size_t a = 0; a < sp.num_actions(); ++a) marginal += z.at(x, a);
    if (marginal <= kPolicyFloor) {
      policy.unvisited[x] = 1;
      const double uniform = 1.0 / static_cast<double>(sp.num_actions());
      for (std::size_t a = 0; a < sp.num_actions(); ++a)
        policy.probs[sp.pair_index(x, a)] = uniform;
      continue;
    }
    double kept = 0.0;
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      double u = z.at(x, a) / marginal;
      if (u < kPolicyFloor) u = 0.0;  // drop solver noise, keep real randomization
      policy.probs[sp.pair_index(x, a)] = u;
      kept += u;
    }
    for (std::size_t a = 0; a < sp.num_actions(); ++a)
      policy.probs[sp.pair_index(x, a)] /= kept;
  }
  return policy;
}

OccupationMeasure induced_occupation(const PolicyTable& policy, const TransitionKernel& kernel) {
  const StateActionSpace& sp = policy.space;
  if (sp != kernel.space)
    throw std::invalid_argument("induced_occupation: policy/kernel space mismatch");
  const std::size_t n = sp.num_states();

  std::vector<std::vector<double>> chain(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      const double u = policy.at(x, a);
      if (u == 0.0) continue;
      for (std::size_t y = 0; y < n; ++y) chain[x][y] += u * kernel.at(x, a, y);
    }

  const auto classes = recurrent_classes(chain);
  if (classes.size() != 1)
    throw std::runtime_error("induced_occupation: induced chain has " +
                             std::to_string(classes.size()) +
                             " recurrent classes (unichain assumption violated)");
  const std::vector<std::size_t>& rec = classes.front();
  const std::size_t r = rec.size();

  // pi solves pi (P - I) = 0 with sum pi = 1 on the recurrent class. The
  // system (I - P^T + 1 1^T) y = 1 is nonsingular for an irreducible class;
  // pi is y renormalized.
  Eigen::MatrixXd system = Eigen::MatrixXd::Ones(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      system(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
          (i == j ? 1.0 : 0.0) - chain[rec[j]][rec[i]];
  Eigen::VectorXd y = system.partialPivLu().solve(Eigen::VectorXd::Ones(r));
  const double total = y.sum();
  if (!y.allFinite() || total <= 0.0)
    throw std::runtime_error("induced_occupation: stationary solve failed");

  OccupationMeasure out;
  out.space = sp;
  out.z.assign(sp.num_pairs(), 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    const double pi = std::max(y(static_cast<Eigen::Index>(i)), 0.0) / total;
    for (std::size_t a = 0; a < sp.num_actions(); ++a)
      out.z[sp.pair_index(rec[i], a)] = pi * policy.at(rec[i], a);
  }
  return out;
}

OccupationMeasure lemma_feasible_measure(const UserSpec& spec, const TransitionKernel& kernel) {
  validate(spec);
  const StateActionSpace& sp = kernel.space;
  const double min_positive_power = sp.power_value(1);
  const double admit_prob =
      0.9 * std::min({spec.queue_cap / spec.buffer_size,
                      spec.power_cap / (spec.buffer_size * min_positive_power), 1.0});

  PolicyTable policy;
  policy.space = sp;
  policy.probs.assign(sp.num_pairs(), 0.0);
  policy.unvisited.assign(sp.num_states(), 0);
  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    if (sp.state_queue(x) > 0) {
      policy.probs[sp.pair_index(x, sp.action_index(false, 1))] = 1.0;
    } else {
      policy.probs[sp.pair_index(x, sp.action_index(false, 0))] = 1.0 - admit_prob;
      policy.probs[sp.pair_index(x, sp.action_index(true, 0))] = admit_prob;
    }
  }

  OccupationMeasure z = induced_occupation(policy, kernel);
  if (sensitive_reward(z, 1) <= 0.0)
    throw std::runtime_error("lemma_feasible_measure: no positive-SNR policy exists");
  return z;
}

MeasureResiduals measure_residuals(const OccupationMeasure& z, const UserSpec& spec,
                                   const TransitionKernel& kernel) {
  const StateActionSpace& sp = z.space;
  MeasureResiduals res{};
  double sum = 0.0;
  for (double v : z.z) {
    sum += v;
    res.min_entry = std::min(res.min_entry, v);
  }
  res.normalization = std::abs(sum - 1.0);
  for (std::size_t y = 0; y < sp.num_states(); ++y) {
    double balance = 0.0;
    for (std::size_t x = 0; x < sp.num_states(); ++x)
      for (std::size_t a = 0; a < sp.num_actions(); ++a)
        balance += ((x == y ? 1.0 : 0.0) - kernel.at(x, a, y)) * z.z[sp.pair_index(x, a)];
    res.max_balance = std::max(res.max_balance, std::abs(balance));
  }
  res.power_excess = std::max(0.0, avg_power(z) - spec.power_cap);
  res.queue_excess = std::max(0.0, avg_queue(z) - spec.queue_cap);
  return res;
}

std::string measure_to_csv(const OccupationMeasure& z) {
  const StateActionSpace& sp = z.space;
  std::ostringstream os;
  os << "h_index,queue,admit,power,z\n";
  for (std::size_t x = 0; x < sp.num_states(); ++x)
    for (std::size_t a = 0; a < sp.num_actions(); ++a)
      os << sp.state_h_index(x) << ',' << sp.state_queue(x) << ','
         << (sp.action_admit(a) ? 1 : 0) << ',' << sp.action_power_index(a) << ','
         << format_double(z.z[sp.pair_index(x, a)]) << '\n';
  return os.str();
}

OccupationMeasure measure_from_csv(const StateActionSpace& space, const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front() != std::vector<std::string>{"h_index", "queue", "admit",
                                                               "power", "z"})
    throw std::invalid_argument("measure_from_csv: unexpected header");
  OccupationMeasure out;
  out.space = space;
  out.z.assign(space.num_pairs(), 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5) throw std::invalid_argument("measure_from_csv: bad row");
    const std::size_t x = space.state_index(std::stoi(row[0]), std::stoi(row[1]));
    const std::size_t a = space.action_index(row[2] == "1", std::stoi(row[3]));
    out.z[space.pair_index(x, a)] = std::stod(row[4]);
  }
  return out;
}

}  // namespace macgame
