#include "macgame/presets.hpp"

namespace macgame {

namespace {

Preset make_preset(std::string name, int k, int l, int q, double power_cap, double queue_cap,
                   double lambda, int expected_m, int expected_n_star) {
  UserSpec spec;
  spec.channel_levels = k;
  spec.power_levels = l;
  spec.buffer_size = q;
  spec.power_cap = power_cap;
  spec.queue_cap = queue_cap;
  spec.arrival_rate = lambda;
  spec.channel_chain = build_default_channel_chain(k);

  Scenario scenario;
  scenario.users = {spec};
  scenario.noise_variance = 1.0;
  scenario.symmetric = true;

  return Preset{std::move(name), std::move(scenario), expected_m, expected_n_star};
}

}  // namespace

const std::vector<Preset>& builtin_presets() {
  static const std::vector<Preset> presets = {
      make_preset("scenario1", 2, 2, 1, 0.50, 0.50, 0.49, 4, 3),
      make_preset("scenario2", 2, 3, 1, 0.95, 0.50, 0.49, 6, 3),
      make_preset("scenario3", 2, 3, 2, 1.55, 1.00, 0.90, 6, 3),
      make_preset("scenario4", 3, 3, 2, 1.28, 0.65, 0.60, 7, 3),
      make_preset("scenario5", 3, 3, 3, 2.10, 1.60, 1.50, 7, 4),
      make_preset("scenario6", 2, 3, 2, 1.55, 0.90, 1.00, 6, 2),
      make_preset("scenario7", 2, 3, 2, 1.70, 0.90, 1.00, 6, 1),
  };
  return presets;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : builtin_presets())
    if (p.name == name) return &p;
  return nullptr;
}

Scenario scenario_from_arg(const std::string& file_or_preset) {
  if (const Preset* p = find_preset(file_or_preset)) return p->scenario;
  return load_scenario_file(file_or_preset);
}

}  // namespace macgame
