#include "macgame/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace macgame {

namespace {

constexpr double kRowSumTol = 1e-12;

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_chain(const Matrix& chain, int levels, const std::string& context) {
  const std::size_t n = static_cast<std::size_t>(levels) + 1;
  check(chain.size() == n, context + ": channel_chain must be " + std::to_string(n) + "x" +
                               std::to_string(n));
  for (std::size_t r = 0; r < n; ++r) {
    check(chain[r].size() == n, context + ": channel_chain row " + std::to_string(r) +
                                    " has wrong length");
    double sum = 0.0;
    for (double v : chain[r]) {
      check(std::isfinite(v) && v >= 0.0,
            context + ": channel_chain row " + std::to_string(r) + " has a negative entry");
      sum += v;
    }
    check(std::abs(sum - 1.0) <= kRowSumTol,
          context + ": channel_chain row " + std::to_string(r) + " does not sum to 1");
  }
}

}  // namespace

void validate(const UserSpec& spec) {
  check(spec.channel_levels >= 1, "channel_levels must be >= 1");
  check(spec.power_levels >= 1, "power_levels must be >= 1");
  check(spec.buffer_size >= 1, "buffer_size must be >= 1");
  check(std::isfinite(spec.arrival_rate) && spec.arrival_rate > 0.0,
        "arrival_rate must be > 0");
  check(std::isfinite(spec.power_cap) && spec.power_cap > 0.0, "power_cap must be > 0");
  check(std::isfinite(spec.queue_cap) && spec.queue_cap > 0.0, "queue_cap must be > 0");
  validate_chain(spec.channel_chain, spec.channel_levels, "UserSpec");
}

void validate(const Scenario& scenario) {
  check(!scenario.users.empty(), "scenario needs at least one user");
  check(std::isfinite(scenario.noise_variance) && scenario.noise_variance > 0.0,
        "noise_variance must be > 0");
  for (const UserSpec& u : scenario.users) validate(u);
  if (scenario.symmetric) {
    for (const UserSpec& u : scenario.users)
      check(u == scenario.users.front(), "symmetric scenario has unequal users");
  }
}

StateActionSpace::StateActionSpace(int channel_levels, int power_levels, int buffer_size)
    : channel_levels_(channel_levels), power_levels_(power_levels), buffer_size_(buffer_size) {
  check(channel_levels >= 1 && power_levels >= 1 && buffer_size >= 1,
        "StateActionSpace: all grid sizes must be >= 1");
}

std::size_t StateActionSpace::state_index(int h_index, int queue) const {
  check(h_index >= 0 && h_index <= channel_levels_ && queue >= 0 && queue <= buffer_size_,
        "state_index out of range");
  return static_cast<std::size_t>(h_index) * (buffer_size_ + 1) + queue;
}

std::size_t StateActionSpace::action_index(bool admit, int power_index) const {
  check(power_index >= 0 && power_index <= power_levels_, "action_index out of range");
  return static_cast<std::size_t>(admit ? power_levels_ + 1 : 0) + power_index;
}

Matrix build_default_channel_chain(int channel_levels) {
  check(channel_levels >= 1, "channel chain needs at least one positive level");
  const int k_max = channel_levels;
  Matrix chain(k_max + 1, std::vector<double>(k_max + 1, 0.0));
  chain[0][0] = 0.5;
  chain[0][1] = 0.5;
  chain[k_max][k_max] = 0.5;
  chain[k_max][k_max - 1] = 0.5;
  for (int k = 1; k < k_max; ++k) {
    chain[k][k - 1] = 1.0 / 3.0;
    chain[k][k] = 1.0 / 3.0;
    chain[k][k + 1] = 1.0 / 3.0;
  }
  // K = 1 has no interior states; both boundary rules write the same rows.
  return chain;
}

std::vector<double> truncated_arrival_pmf(double arrival_rate, int max_accept) {
  check(std::isfinite(arrival_rate) && arrival_rate > 0.0, "arrival_rate must be > 0");
  check(max_accept >= 0, "max_accept must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(max_accept) + 1, 0.0);
  double p = std::exp(-arrival_rate);
  double below = 0.0;
  for (int j = 0; j < max_accept; ++j) {
    pmf[j] = p;
    below += p;
    p *= arrival_rate / (j + 1);
  }
  pmf[max_accept] = 1.0 - below;  // upper tail collapses onto "buffer full"
  return pmf;
}

std::vector<double> queue_transition_pmf(const UserSpec& spec, int queue, bool admit,
                                         int power_index) {
  const int q_cap = spec.buffer_size;
  std::vector<double> pmf(static_cast<std::size_t>(q_cap) + 1, 0.0);
  const int q_mid = (power_index > 0 && queue > 0) ? queue - 1 : queue;
  if (!admit) {
    pmf[q_mid] = 1.0;
    return pmf;
  }
  const std::vector<double> arrivals = truncated_arrival_pmf(spec.arrival_rate, q_cap - q_mid);
  for (std::size_t w = 0; w < arrivals.size(); ++w) pmf[q_mid + w] = arrivals[w];
  return pmf;
}

TransitionKernel build_transition_kernel(const UserSpec& spec) {
  validate(spec);
  TransitionKernel kernel;
  kernel.space = StateActionSpace(spec);
  const StateActionSpace& sp = kernel.space;
  kernel.probabilities.assign(sp.num_pairs() * sp.num_states(), 0.0);

  for (std::size_t x = 0; x < sp.num_states(); ++x) {
    const int h = sp.state_h_index(x);
    const int q = sp.state_queue(x);
    for (std::size_t a = 0; a < sp.num_actions(); ++a) {
      const std::vector<double> queue_pmf =
          queue_transition_pmf(spec, q, sp.action_admit(a), sp.action_power_index(a));
      for (int h2 = 0; h2 <= spec.channel_levels; ++h2) {
        const double ph = spec.channel_chain[h][h2];
        if (ph == 0.0) continue;
        for (int q2 = 0; q2 <= spec.buffer_size; ++q2) {
          if (queue_pmf[q2] == 0.0) continue;
          kernel.at(x, a, sp.state_index(h2, q2)) = ph * queue_pmf[q2];
        }
      }
    }
  }
  return kernel;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ParseError("scenario: " + what); }

double require_number(const json& obj, const std::string& key) {
  if (!obj.contains(key)) fail("missing required key '" + key + "'");
  if (!obj[key].is_number()) fail("key '" + key + "' must be a number");
  return obj[key].get<double>();
}

int require_int(const json& obj, const std::string& key) {
  if (!obj.contains(key)) fail("missing required key '" + key + "'");
  if (!obj[key].is_number_integer()) fail("key '" + key + "' must be an integer");
  return obj[key].get<int>();
}

Matrix read_chain(const json& value, const std::string& key) {
  if (!value.is_array()) fail("key '" + key + "' must be a matrix (array of rows)");
  Matrix chain;
  for (const json& row : value) {
    if (!row.is_array()) fail("key '" + key + "' must be a matrix (array of rows)");
    std::vector<double> r;
    for (const json& cell : row) {
      if (!cell.is_number()) fail("key '" + key + "' has a non-numeric entry");
      r.push_back(cell.get<double>());
    }
    chain.push_back(std::move(r));
  }
  return chain;
}

UserSpec read_user(const json& obj, const std::string& context) {
  static const std::vector<std::string> allowed = {
      "K", "L", "Q", "power_cap", "queue_cap", "lambda", "channel_chain"};
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed) known = known || it.key() == k;
    if (!known) fail("unknown key '" + it.key() + "' in " + context);
  }
  UserSpec spec;
  spec.channel_levels = require_int(obj, "K");
  spec.power_levels = require_int(obj, "L");
  spec.buffer_size = require_int(obj, "Q");
  spec.power_cap = require_number(obj, "power_cap");
  spec.queue_cap = require_number(obj, "queue_cap");
  spec.arrival_rate = require_number(obj, "lambda");
  if (obj.contains("channel_chain")) {
    spec.channel_chain = read_chain(obj["channel_chain"], "channel_chain");
  } else {
    if (spec.channel_levels < 1) fail("key 'K' must be >= 1");
    spec.channel_chain = build_default_channel_chain(spec.channel_levels);
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail(std::string(e.what()) + " in " + context);
  }
  return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("top level must be an object");

  static const std::vector<std::string> allowed = {
      "users", "K", "L", "Q", "power_cap", "queue_cap", "lambda", "noise_variance",
      "channel_chain"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed) known = known || it.key() == k;
    if (!known) fail("unknown key '" + it.key() + "'");
  }
  if (!doc.contains("users")) fail("missing required key 'users'");

  Scenario scenario;
  scenario.noise_variance = require_number(doc, "noise_variance");

  const json& users = doc["users"];
  if (users.is_array()) {
    static const std::vector<std::string> user_keys = {"K", "L", "Q", "power_cap", "queue_cap",
                                                       "lambda", "channel_chain"};
    for (const std::string& k : user_keys)
      if (doc.contains(k)) fail("key '" + k + "' is not allowed when 'users' is a list");
    if (users.empty()) fail("'users' list is empty");
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (!users[i].is_object()) fail("'users' entries must be objects");
      scenario.users.push_back(read_user(users[i], "users[" + std::to_string(i) + "]"));
    }
  } else if (users.is_number_integer()) {
    const int count = users.get<int>();
    if (count < 1) fail("key 'users' must be >= 1");
    const UserSpec spec = read_user(
        [&] {
          json u = doc;
          u.erase("users");
          u.erase("noise_variance");
          return u;
        }(),
        "scenario");
    scenario.users.assign(static_cast<std::size_t>(count), spec);
  } else {
    fail("key 'users' must be a count or a list of user objects");
  }

  scenario.symmetric = true;
  for (const UserSpec& u : scenario.users)
    scenario.symmetric = scenario.symmetric && u == scenario.users.front();
  try {
    validate(scenario);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scenario: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario replicate_symmetric(const Scenario& scenario, int num_users) {
  check(scenario.symmetric, "replicate_symmetric needs a symmetric scenario");
  check(num_users >= 1, "replicate_symmetric needs num_users >= 1");
  Scenario out = scenario;
  out.users.assign(static_cast<std::size_t>(num_users), scenario.users.front());
  return out;
}

}  // namespace macgame
