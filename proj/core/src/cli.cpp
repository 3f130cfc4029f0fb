#include "macgame/cli.hpp"

#include <filesystem>
#include <sstream>

#include "macgame/csv.hpp"
#include "macgame/presets.hpp"

namespace macgame {

namespace {

struct NamedScenario {
  std::string name;
  Scenario scenario;
  const Preset* preset;  // non-null when resolved from a bundled preset
};

NamedScenario resolve(const std::string& arg) {
  if (const Preset* p = find_preset(arg)) return {p->name, p->scenario, p};
  const Scenario s = load_scenario_file(arg);
  return {std::filesystem::path(arg).stem().string(), s, nullptr};
}

std::string out_path(const CliOptions& options, const std::string& file) {
  std::filesystem::create_directories(options.out_dir);
  return (std::filesystem::path(options.out_dir) / file).string();
}

InvarianceOptions invariance_options(const CliOptions& options, bool with_best_response) {
  InvarianceOptions inv;
  inv.with_best_response = with_best_response;
  inv.iterate.epsilon = options.epsilon;
  return inv;
}

}  // namespace

int cmd_table1(const CliOptions& options, std::ostream& log) {
  std::vector<NamedScenario> scenarios;
  try {
    if (options.scenarios.empty()) {
      // Empty input is an empty (successful) table, except that --check
      // defaults to the full preset list.
      if (options.check)
        for (const Preset& p : builtin_presets()) scenarios.push_back({p.name, p.scenario, &p});
    } else {
      for (const std::string& arg : options.scenarios) scenarios.push_back(resolve(arg));
    }
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (options.check) {
    for (const NamedScenario& s : scenarios)
      if (s.preset == nullptr) {
        log << "error: --check requires bundled presets, got '" << s.name << "'\n";
        return kExitInputError;
      }
  }

  std::ostringstream csv;
  csv << "scenario,K,L,Q,power_cap,queue_cap,lambda,M,N_star,reached";
  if (options.check) csv << ",M_expected,N_star_expected,match";
  csv << '\n';

  bool all_ok = true;
  for (const NamedScenario& s : scenarios) {
    const UserSpec& u = s.scenario.users.front();
    std::string row_status;
    int m = 0;
    InvarianceReport report;
    try {
      m = static_cast<int>(distinct_snr_values(u).size());
      report = find_invariance_threshold(s.scenario, options.n_max,
                                         invariance_options(options, false));
    } catch (const std::exception& e) {
      log << s.name << ": failed: " << e.what() << '\n';
      all_ok = false;
      continue;
    }
    csv << s.name << ',' << u.channel_levels << ',' << u.power_levels << ',' << u.buffer_size
        << ',' << format_double(u.power_cap) << ',' << format_double(u.queue_cap) << ','
        << format_double(u.arrival_rate) << ',' << m << ',' << report.threshold << ','
        << (report.reached ? 1 : 0);
    if (!report.reached) all_ok = false;
    if (options.check) {
      const bool match = report.reached && m == s.preset->expected_distinct_values &&
                         report.threshold == s.preset->expected_threshold;
      csv << ',' << s.preset->expected_distinct_values << ',' << s.preset->expected_threshold
          << ',' << (match ? 1 : 0);
      if (!match) all_ok = false;
    }
    csv << '\n';
    log << s.name << ": M=" << m << " N*=" << report.threshold
        << (report.reached ? "" : " (not reached)") << '\n';
  }

  const std::string path = out_path(options, "table1.csv");
  write_file(path, csv.str());
  log << "wrote " << path << '\n';
  return all_ok ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CliOptions& options, std::ostream& log) {
  NamedScenario s;
  try {
    s = resolve(options.scenarios.at(0));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  InvarianceReport report;
  try {
    report = find_invariance_threshold(s.scenario, options.n_max,
                                       invariance_options(options, true));
  } catch (const std::exception& e) {
    log << s.name << ": failed: " << e.what() << '\n';
    return kExitInputError;
  }

  std::ostringstream csv;
  csv << "N,l2_distance,reward_diff,l1_diff,converged\n";
  bool all_converged = true;
  for (const InvarianceRow& row : report.rows) {
    csv << row.num_users << ',' << format_double(row.l2_distance) << ','
        << format_double(row.reward_diff) << ',' << format_double(row.l1_diff) << ','
        << (row.br_converged ? 1 : 0) << '\n';
    all_converged = all_converged && row.br_converged;
  }
  const std::string path = out_path(options, "sweep_" + s.name + ".csv");
  write_file(path, csv.str());
  log << s.name << ": N*=" << report.threshold << ", wrote " << path << '\n';
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_solve(const CliOptions& options, std::ostream& log) {
  NamedScenario s;
  try {
    s = resolve(options.scenarios.at(0));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  IterateOptions iterate;
  iterate.epsilon = options.epsilon;
  auto [profile, trace] = iterate_best_response(initial_profile(s.scenario), iterate);

  std::ostringstream measures;
  measures << "user,h_index,queue,admit,power,z\n";
  for (std::size_t i = 0; i < profile.measures.size(); ++i) {
    const std::string body = measure_to_csv(profile.measures[i]);
    std::istringstream lines(body);
    std::string line;
    std::getline(lines, line);  // skip header
    while (std::getline(lines, line)) measures << i << ',' << line << '\n';
  }
  write_file(out_path(options, "solve_measures.csv"), measures.str());
  write_file(out_path(options, "solve_trace.csv"), trace_to_csv(trace));

  log << s.name << ": " << trace.sweeps.size() << " sweeps, "
      << (trace.converged ? "converged" : "NOT converged") << '\n';
  log << "wrote " << out_path(options, "solve_measures.csv") << " and "
      << out_path(options, "solve_trace.csv") << '\n';
  return trace.converged ? kExitOk : kExitNotConverged;
}

int cmd_iine(const CliOptions& options, std::ostream& log) {
  NamedScenario s;
  IineResult result;
  try {
    s = resolve(options.scenarios.at(0));
    const UserSpec& spec = s.scenario.users.front();
    result = compute_iine(spec, build_transition_kernel(spec));
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  write_file(out_path(options, "iine_stages.csv"), stages_to_csv(result.stages));
  write_file(out_path(options, "iine_measure.csv"), measure_to_csv(result.measure));
  write_file(out_path(options, "iine_marginal.csv"), marginal_to_csv(result.snr_marginal));
  log << s.name << ": " << result.distinct_values
      << " stages, mean SNR = " << format_double(result.stages.front().value) << '\n';
  log << "wrote " << out_path(options, "iine_stages.csv") << ", iine_measure.csv, "
      << "iine_marginal.csv\n";
  return kExitOk;
}

int cmd_simulate(const CliOptions& options, std::ostream& log) {
  NamedScenario s;
  GameProfile profile;
  try {
    s = resolve(options.scenarios.at(0));
    profile.scenario = s.scenario;
    for (const UserSpec& spec : s.scenario.users) {
      const TransitionKernel kernel = build_transition_kernel(spec);
      profile.measures.push_back(compute_iine(spec, kernel).measure);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  SimConfig config;
  config.horizon = options.horizon;
  config.seed = options.seed;
  const ValidationReport report = validate_profile(s.scenario, profile, config);

  const std::string path = out_path(options, "simulate_report.csv");
  write_file(path, validation_to_csv(report));
  log << s.name << ": simulation " << (report.pass ? "matches" : "DOES NOT match")
      << " the solver predictions, wrote " << path << '\n';
  return report.pass ? kExitOk : kExitNotConverged;
}

}  // namespace macgame
