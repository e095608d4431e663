#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehgo/sim.hpp"

namespace ehgo {

/// Names of the configurations compiled into the library.
std::vector<std::string> bundled_config_names();
/// Text of a bundled configuration, or nullopt for an unknown name.
std::optional<std::string> bundled_config(std::string_view name);

/// Parses an INI-style scenario description. Sections: [vehicle], [gains],
/// [observer], [profile], [sim], [noise]. `overrides` are "section.key=value"
/// strings applied after the file. Throws ParseError (with the 1-based line,
/// 0 for overrides) or ValidationError.
ScenarioConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// `source` is a bundled name or a file path.
ScenarioConfig load_config(const std::string& source, const std::vector<std::string>& overrides = {});

/// Every recognised "section.key", for help output.
std::vector<std::string> config_keys();

}  // namespace ehgo
