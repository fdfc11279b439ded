#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "whmc/orchestrator.hpp"
#include "whmc/scenario.hpp"

namespace whmc::io {

using Json = nlohmann::json;

std::vector<std::string> preset_names();

/// Throws kConfig for an unknown name.
Scenario preset(std::string_view name);

/// Fills every omitted field from the preset named by the optional "preset"
/// key (default case-study-whmc) and validates. Unknown keys, type mismatches
/// and invariant violations throw kConfig with a dotted path in the message.
Scenario parse_scenario(const Json& document);

/// As above from text; malformed JSON throws kConfig.
Scenario parse_scenario_text(std::string_view text);

/// A preset name, or a path to a JSON scenario file.
Scenario load_scenario(const std::string& preset_or_path);

/// Complete document; parse_scenario(to_json(s)) == s.
Json to_json(const Scenario& scenario);

/// Hash of the serialised scenario with the seed zeroed.
std::uint64_t scenario_fingerprint(const Scenario& scenario);

Json to_json(const sim::QocReport& report);

}  // namespace whmc::io
