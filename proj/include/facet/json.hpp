#pragma once

#include <json.hpp>

namespace facet {

// Insertion-ordered so that canonical documents keep schema order.
using Json = nlohmann::ordered_json;

}  // namespace facet
