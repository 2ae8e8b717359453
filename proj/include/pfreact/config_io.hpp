#pragma once

// Flat "key = value" configuration text. Keys are the ScenarioConfig field
// names (grid, physics and scheme fields appear unprefixed); '#' starts a
// comment; unknown keys and malformed values are hard errors.

#include <string>
#include <vector>

#include "pfreact/scenarios.hpp"

namespace pfreact {

/// Starts from preset(scenario) when the text names a scenario, so a file
/// only needs the keys it changes. Throws std::invalid_argument with the line
/// number on any malformed line, and validates the assembled configuration.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Every key, one per line, values at full precision.
std::string serialize_config(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::string& path);

std::vector<std::string> config_keys();

/// Apply a single key/value pair (used by the parser and by CLI overrides).
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

}  // namespace pfreact
