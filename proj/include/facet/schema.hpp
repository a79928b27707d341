#pragma once

// Domain types shared across the facet pipeline. No I/O, no policy.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facet/json.hpp"

namespace facet {

enum class PropertyKind {
  Boolean,
  Number,
  String,
  Categorical,
  Object,
  Array,
  Function,
  Node,
};

std::string_view to_string(PropertyKind kind);
std::optional<PropertyKind> property_kind_from_string(std::string_view text);

/// Kinds that carry serializable, visually relevant values. Function and node
/// props are documented in schemas but never scored, sampled or covered.
bool is_sampled_kind(PropertyKind kind);

struct PropertySpec {
  std::string name;
  PropertyKind kind = PropertyKind::String;
  bool required = false;
  std::optional<Json> default_value;
  std::vector<Json> allowed_values;  // categorical only
  std::string description;
  // Object fields, or a single "item" entry describing array elements.
  std::optional<std::vector<PropertySpec>> element_schema;

  bool operator==(const PropertySpec&) const = default;
};

struct ComponentSchema {
  std::string component_name;
  bool has_children = false;
  std::vector<PropertySpec> properties;
  std::string source_digest;

  const PropertySpec* find(std::string_view name) const;

  bool operator==(const ComponentSchema&) const = default;
};

/// Totally ordered: Structure > Content > Styling.
enum class ViContextKind { Styling = 0, Content = 1, Structure = 2 };

std::string_view to_string(ViContextKind kind);
std::optional<ViContextKind> vi_context_kind_from_string(std::string_view text);

/// Base impact score: 100 / 80 / 60.
double base_score(ViContextKind kind);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct ViContextOccurrence {
  std::string property;
  ViContextKind kind = ViContextKind::Styling;
  Span span;
  std::string snippet;

  bool operator==(const ViContextOccurrence&) const = default;
};

enum class ImpactLevel { Low, Medium, High };

std::string_view to_string(ImpactLevel level);
std::optional<ImpactLevel> impact_level_from_string(std::string_view text);

inline constexpr double kImpactfulThreshold = 100.0;
inline constexpr double kMediumThreshold = 80.0;

struct ImpactScore {
  std::string property;
  std::vector<ViContextOccurrence> occurrences;
  std::size_t n = 0;
  double base = 0.0;
  double coefficient = 1.0;
  double impact = 0.0;
  ImpactLevel level = ImpactLevel::Low;
  bool impactful = false;

  bool operator==(const ImpactScore&) const = default;
};

struct VariationConfig {
  std::string name;
  std::string description;
  // Assignments in schema declaration order.
  Json assignments = Json::object();

  bool operator==(const VariationConfig&) const = default;
};

struct CoverageEntry {
  std::string property;
  PropertyKind kind = PropertyKind::String;
  std::vector<std::string> domain_classes;
  std::vector<std::string> observed_classes;
  double ratio = 0.0;
  std::vector<std::string> missing;
  std::vector<CoverageEntry> children;

  bool operator==(const CoverageEntry&) const = default;
};

struct CoverageReport {
  std::vector<CoverageEntry> entries;
  double aggregate = 0.0;
  bool fully_covered = false;

  const CoverageEntry* find(std::string_view property) const;

  bool operator==(const CoverageReport&) const = default;
};

struct SamplingRequest {
  ComponentSchema schema;
  std::vector<ImpactScore> impacts;
  std::vector<VariationConfig> existing;
  std::string coverage_gaps;
  std::string user_instruction;
  int count = 1;
};

/// Each violation names the property and the broken rule, e.g.
/// "variant: categorical requires allowed_values".
std::vector<std::string> validate_schema(const ComponentSchema& schema);

/// True when `value` has the JSON shape `spec.kind` requires. Categorical
/// membership is not checked here.
bool json_matches_kind(const PropertySpec& spec, const Json& value);

// Canonical JSON forms (lowercase snake_case keys).
Json to_json(const PropertySpec& spec);
Json to_json(const ComponentSchema& schema);
Json to_json(const ViContextOccurrence& occurrence);
Json to_json(const ImpactScore& score);
Json to_json(const std::vector<ImpactScore>& scores);
Json to_json(const VariationConfig& config);
Json to_json(const CoverageEntry& entry);
Json to_json(const CoverageReport& report);

PropertySpec property_spec_from_json(const Json& j);
ComponentSchema component_schema_from_json(const Json& j);
ViContextOccurrence occurrence_from_json(const Json& j);
ImpactScore impact_score_from_json(const Json& j);
std::vector<ImpactScore> impact_report_from_json(const Json& j);
VariationConfig variation_from_json(const Json& j);
CoverageEntry coverage_entry_from_json(const Json& j);
CoverageReport coverage_report_from_json(const Json& j);

/// "sha256:<hex>" digest of the raw source bytes.
std::string source_digest(std::string_view source);

}  // namespace facet
