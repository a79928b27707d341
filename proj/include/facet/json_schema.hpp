#pragma once

// Validator for the JSON Schema subset used by the documented response
// schemas: type (string or list), properties, required,
// additionalProperties (bool or schema), items, enum, const, minimum,
// maximum, minItems, maxItems, minLength, anyOf, oneOf and local
// "#/$defs/..." references.

#include <string>
#include <vector>

#include "facet/json.hpp"

namespace facet {

/// Empty when `instance` conforms. Messages carry a JSON-pointer path.
std::vector<std::string> validate_json(const Json& schema, const Json& instance);

}  // namespace facet
