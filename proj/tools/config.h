#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "poolforge/simulate.h"
#include "poolforge/synth.h"

namespace poolforge::cli {

using json = nlohmann::json;

// The published schema (docs/config.schema.json), compiled in.
const json &config_schema();

// A config document holding every schema default.
json default_config();

// Checks `doc` against the subset of JSON Schema the published schema uses:
// type, enum, properties, additionalProperties, items, minItems, minimum,
// maximum, exclusiveMinimum, exclusiveMaximum. Throws kInvalidConfig naming
// the offending path.
void validate_schema(const json &doc, const json &schema);

// Applies "a.b.c=value". The value is parsed as JSON when it parses, and is
// taken as a string otherwise.
void apply_override(json &doc, std::string_view assignment);

// defaults < config file < POOLFORGE_SEED < --set overrides; the result is
// validated against the schema.
json resolve_config(const std::optional<std::string> &config_path,
                    const std::vector<std::string> &overrides,
                    const char *env_seed);

SimulationConfig simulation_config(const json &config, SelectionStrategy strategy);
SynthSpec synth_spec(const json &config);

}  // namespace poolforge::cli
