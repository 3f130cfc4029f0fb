#pragma once

#include <string>
#include <vector>

#include "macgame/model.hpp"

namespace macgame {

/// A bundled single-user symmetric scenario plus the expected values the
/// --check mode compares against: the distinct-SNR count M and the user
/// count N* from which the precomputed invariant policy is an equilibrium.
struct Preset {
  std::string name;
  Scenario scenario;
  int expected_distinct_values = 0;
  int expected_threshold = 0;
};

/// The seven bundled scenarios (scenario1 .. scenario7).
const std::vector<Preset>& builtin_presets();

/// nullptr when the name is not a bundled preset.
const Preset* find_preset(const std::string& name);

/// Resolves a CLI --scenario argument: a preset name, else a file path.
Scenario scenario_from_arg(const std::string& file_or_preset);

}  // namespace macgame
