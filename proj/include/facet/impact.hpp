#pragma once

// Second pass over the component: trace props (and locals derived from them)
// into vi-contexts and score each property.

#include <string>
#include <string_view>
#include <vector>

#include "facet/analysis.hpp"
#include "facet/schema.hpp"

namespace facet {

/// One occurrence per (property, vi-context node). Properties outside
/// `schema` are ignored.
std::vector<ViContextOccurrence> find_vi_contexts(const ParsedComponent& pc,
                                                  const ComponentSchema& schema);

/// C(n) = 1 + (1 - e^(-n/10))
double frequency_coefficient(std::size_t n);
ImpactLevel impact_level(double impact);

/// `occurrences` must all belong to `property`.
ImpactScore score_property(std::string property, std::vector<ViContextOccurrence> occurrences);

struct ComponentAnalysis {
  ParsedComponent parsed;
  ComponentSchema schema;
  std::vector<ImpactScore> impacts;  // impact descending, ties in declaration order
  std::vector<std::string> warnings;

  const ImpactScore* impact_of(std::string_view property) const;
  std::vector<std::string> impactful_properties() const;
};

ComponentAnalysis analyze_component(std::string_view source, std::string_view filename);

/// Cuts `text` to at most `max_bytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes);

}  // namespace facet
