#pragma once

// Coverage of a variation set over the design space: observed values are
// mapped into equivalence classes and compared against each property's
// domain classes.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "facet/schema.hpp"

namespace facet {

/// Maps values into semantic equivalence classes.
///   categorical: the allowed value itself (JSON text), anything else "invalid"
///   boolean:     "true" / "false"
///   string:      "distinct-1".."distinct-3" by distinct count, plus "long" (> 50 chars)
///   number:      "distinct-1".."distinct-3"
///   array:       length classes "length-0", "length-1-4", "length-5+"
/// Objects have no classes of their own; coverage recurses into fields.
class EquivalenceClassifier {
 public:
  static constexpr std::size_t kDistinctTarget = 3;
  static constexpr std::size_t kLongString = 50;
  static constexpr const char* kInvalid = "invalid";

  /// Domain classes for a property kind. Empty for object/function/node.
  static std::vector<std::string> domain(const PropertySpec& spec);
  /// Classes exhibited by a multiset of values.
  static std::vector<std::string> observed(const PropertySpec& spec, const std::vector<Json>& values);
  /// Single-value class; used for distinctness signatures. Strings, numbers
  /// and categorical values map to themselves, objects and arrays to their
  /// canonical JSON text.
  static std::string signature_class(const PropertySpec& spec, const Json& value);
};

using ObservedValues = std::map<std::string, std::vector<Json>>;

/// Explicit assignments plus defaults for omitting variations.
/// Throws UnknownProperty for assignments outside the schema.
ObservedValues observed_values(const ComponentSchema& schema,
                               const std::vector<VariationConfig>& variations);

/// Function and node properties are excluded. Entries are ordered by impact
/// descending, then declaration order.
CoverageReport coverage(const ComponentSchema& schema, const std::vector<ImpactScore>& impacts,
                        const std::vector<VariationConfig>& variations);

/// Coverage of one property given its observed values.
CoverageEntry coverage_entry(const PropertySpec& spec, const std::vector<Json>& values);

/// Bullet lines for every gap, highest impact first. Empty when nothing is
/// missing.
std::string render_gap_instructions(const CoverageReport& report, const std::vector<ImpactScore>& impacts);

struct ExtractedStories {
  std::string component;
  std::vector<VariationConfig> variations;
  std::vector<std::string> warnings;
};

/// Reads a CSF module: `export default {title, component}` metadata and one
/// named export per story. Non-literal args are kept as their source text
/// with a warning. Throws SyntaxError or NotAStoryFile.
ExtractedStories extract_from_story_source(std::string_view source,
                                           std::string_view filename = "stories.tsx");

}  // namespace facet
