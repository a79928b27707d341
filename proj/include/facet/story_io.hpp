#pragma once

// Persistence of variation sets: canonical JSON documents and CSF story
// modules.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "facet/schema.hpp"

namespace facet {

/// {component, source_digest, variations:[{name, description, properties}]}
/// with properties in schema declaration order.
Json emit_json(const ComponentSchema& schema, const std::vector<VariationConfig>& variations);
/// emit_json dumped with two-space indent and a trailing newline.
std::string emit_json_text(const ComponentSchema& schema, const std::vector<VariationConfig>& variations);

/// Inverse of emit_json. Throws Error on a malformed document.
std::vector<VariationConfig> variations_from_json(const Json& document);

/// Assignments reordered to schema declaration order; unknown keys keep
/// their relative order at the end.
Json ordered_assignments(const ComponentSchema& schema, const Json& assignments);

/// Runs of characters outside [A-Za-z0-9] become `_`, edges are trimmed, a
/// leading digit, reserved word or empty result gets a `V` prefix.
std::string sanitize_identifier(std::string_view name);

/// Export identifiers for `variations`, uniquified with `_2`, `_3`, ...
std::vector<std::string> story_identifiers(const std::vector<VariationConfig>& variations);

/// Full CSF module. `import_path` defaults to "./<Component>".
/// Throws UnserializableValue for function values without a description.
std::string emit_story_module(const ComponentSchema& schema, const std::vector<VariationConfig>& variations,
                              std::string_view import_path = {});

/// The export block for `variations[index]` exactly as it appears in
/// emit_story_module.
std::string emit_story_snippet(const ComponentSchema& schema, const std::vector<VariationConfig>& variations,
                               std::size_t index);

}  // namespace facet
