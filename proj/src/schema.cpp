#include "facet/schema.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <set>

#include "facet/errors.hpp"

namespace facet {

namespace {

constexpr std::array<std::pair<PropertyKind, std::string_view>, 8> kKindNames{{
    {PropertyKind::Boolean, "boolean"},
    {PropertyKind::Number, "number"},
    {PropertyKind::String, "string"},
    {PropertyKind::Categorical, "categorical"},
    {PropertyKind::Object, "object"},
    {PropertyKind::Array, "array"},
    {PropertyKind::Function, "function"},
    {PropertyKind::Node, "node"},
}};

bool is_scalar(const Json& value) {
  return value.is_null() || value.is_boolean() || value.is_number() ||
         value.is_string();
}

void validate_level(const std::vector<PropertySpec>& specs,
                    const std::string& prefix,
                    std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    const std::string path = prefix + spec.name;
    if (spec.name.empty()) out.push_back(prefix + "<unnamed>: name must not be empty");
    if (!seen.insert(spec.name).second) out.push_back(path + ": duplicate property name");

    if (spec.kind == PropertyKind::Categorical) {
      if (spec.allowed_values.empty()) {
        out.push_back(path + ": categorical requires allowed_values");
      }
      for (const auto& v : spec.allowed_values) {
        if (!is_scalar(v)) {
          out.push_back(path + ": allowed_values must be JSON scalars");
          break;
        }
      }
    } else if (!spec.allowed_values.empty()) {
      out.push_back(path + ": allowed_values only valid for categorical");
    }

    const bool nested = spec.kind == PropertyKind::Object || spec.kind == PropertyKind::Array;
    if (nested != spec.element_schema.has_value()) {
      out.push_back(path + (nested ? ": object/array requires element_schema"
                                   : ": element_schema only valid for object/array"));
    }
    if (spec.kind == PropertyKind::Array && spec.element_schema &&
        spec.element_schema->size() != 1) {
      out.push_back(path + ": array element_schema must hold exactly one item spec");
    }

    if (spec.default_value) {
      if (!json_matches_kind(spec, *spec.default_value)) {
        out.push_back(path + ": default does not match kind " + std::string(to_string(spec.kind)));
      } else if (spec.kind == PropertyKind::Categorical && !spec.allowed_values.empty() &&
                 std::find(spec.allowed_values.begin(), spec.allowed_values.end(),
                           *spec.default_value) == spec.allowed_values.end()) {
        out.push_back(path + ": default not in allowed_values");
      }
    }

    if (spec.element_schema) validate_level(*spec.element_schema, path + ".", out);
  }
}

Json specs_to_json(const std::vector<PropertySpec>& specs) {
  Json arr = Json::array();
  for (const auto& s : specs) arr.push_back(to_json(s));
  return arr;
}

std::vector<std::string> strings_from_json(const Json& j) {
  std::vector<std::string> out;
  for (const auto& s : j) out.push_back(s.get<std::string>());
  return out;
}

template <typename Enum, typename Parser>
Enum parse_enum(const Json& j, Parser parser, const char* what) {
  auto parsed = parser(j.get<std::string>());
  if (!parsed) throw Error(std::string("invalid ") + what + ": " + j.get<std::string>());
  return *parsed;
}

}  // namespace

std::string_view to_string(PropertyKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "string";
}

std::optional<PropertyKind> property_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool is_sampled_kind(PropertyKind kind) {
  return kind != PropertyKind::Function && kind != PropertyKind::Node;
}

const PropertySpec* ComponentSchema::find(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string_view to_string(ViContextKind kind) {
  switch (kind) {
    case ViContextKind::Structure: return "Structure";
    case ViContextKind::Content: return "Content";
    case ViContextKind::Styling: return "Styling";
  }
  return "Styling";
}

std::optional<ViContextKind> vi_context_kind_from_string(std::string_view text) {
  if (text == "Structure") return ViContextKind::Structure;
  if (text == "Content") return ViContextKind::Content;
  if (text == "Styling") return ViContextKind::Styling;
  return std::nullopt;
}

double base_score(ViContextKind kind) {
  switch (kind) {
    case ViContextKind::Structure: return 100.0;
    case ViContextKind::Content: return 80.0;
    case ViContextKind::Styling: return 60.0;
  }
  return 0.0;
}

std::string_view to_string(ImpactLevel level) {
  switch (level) {
    case ImpactLevel::High: return "High";
    case ImpactLevel::Medium: return "Medium";
    case ImpactLevel::Low: return "Low";
  }
  return "Low";
}

std::optional<ImpactLevel> impact_level_from_string(std::string_view text) {
  if (text == "High") return ImpactLevel::High;
  if (text == "Medium") return ImpactLevel::Medium;
  if (text == "Low") return ImpactLevel::Low;
  return std::nullopt;
}

const CoverageEntry* CoverageReport::find(std::string_view property) const {
  for (const auto& e : entries) {
    if (e.property == property) return &e;
  }
  return nullptr;
}

bool json_matches_kind(const PropertySpec& spec, const Json& value) {
  switch (spec.kind) {
    case PropertyKind::Boolean: return value.is_boolean();
    case PropertyKind::Number: return value.is_number();
    case PropertyKind::String: return value.is_string();
    case PropertyKind::Categorical: return is_scalar(value) && !value.is_null();
    case PropertyKind::Object: return value.is_object();
    case PropertyKind::Array: return value.is_array();
    case PropertyKind::Function: return value.is_string();
    case PropertyKind::Node: return true;
  }
  return false;
}

std::vector<std::string> validate_schema(const ComponentSchema& schema) {
  std::vector<std::string> out;
  if (schema.component_name.empty()) out.push_back("component_name: must not be empty");
  validate_level(schema.properties, "", out);
  return out;
}

Json to_json(const PropertySpec& spec) {
  Json j = Json::object();
  j["name"] = spec.name;
  j["kind"] = std::string(to_string(spec.kind));
  j["required"] = spec.required;
  j["default"] = spec.default_value ? *spec.default_value : Json();
  if (spec.kind == PropertyKind::Categorical || !spec.allowed_values.empty()) {
    j["allowed_values"] = Json(spec.allowed_values);
  } else {
    j["allowed_values"] = nullptr;
  }
  j["description"] = spec.description;
  j["element_schema"] = spec.element_schema ? specs_to_json(*spec.element_schema) : Json();
  return j;
}

Json to_json(const ComponentSchema& schema) {
  Json j = Json::object();
  j["component_name"] = schema.component_name;
  j["has_children"] = schema.has_children;
  j["properties"] = specs_to_json(schema.properties);
  j["source_digest"] = schema.source_digest;
  return j;
}

Json to_json(const ViContextOccurrence& occurrence) {
  Json j = Json::object();
  j["property"] = occurrence.property;
  j["kind"] = std::string(to_string(occurrence.kind));
  j["span"] = Json::array({occurrence.span.start, occurrence.span.end});
  j["snippet"] = occurrence.snippet;
  return j;
}

Json to_json(const ImpactScore& score) {
  Json j = Json::object();
  j["property"] = score.property;
  j["n"] = score.n;
  j["base"] = score.base;
  j["coefficient"] = score.coefficient;
  j["impact"] = score.impact;
  j["level"] = std::string(to_string(score.level));
  j["impactful"] = score.impactful;
  Json occ = Json::array();
  for (const auto& o : score.occurrences) {
    Json oj = to_json(o);
    oj.erase("property");
    occ.push_back(std::move(oj));
  }
  j["occurrences"] = std::move(occ);
  return j;
}

Json to_json(const std::vector<ImpactScore>& scores) {
  Json arr = Json::array();
  for (const auto& s : scores) arr.push_back(to_json(s));
  return arr;
}

Json to_json(const VariationConfig& config) {
  Json j = Json::object();
  j["name"] = config.name;
  j["description"] = config.description;
  j["properties"] = config.assignments;
  return j;
}

Json to_json(const CoverageEntry& entry) {
  Json j = Json::object();
  j["property"] = entry.property;
  j["kind"] = std::string(to_string(entry.kind));
  j["domain_classes"] = entry.domain_classes;
  j["observed_classes"] = entry.observed_classes;
  j["ratio"] = entry.ratio;
  j["missing"] = entry.missing;
  Json kids = Json::array();
  for (const auto& c : entry.children) kids.push_back(to_json(c));
  j["children"] = std::move(kids);
  return j;
}

Json to_json(const CoverageReport& report) {
  Json j = Json::object();
  Json entries = Json::array();
  for (const auto& e : report.entries) entries.push_back(to_json(e));
  j["entries"] = std::move(entries);
  j["aggregate"] = report.aggregate;
  j["fully_covered"] = report.fully_covered;
  return j;
}

PropertySpec property_spec_from_json(const Json& j) {
  PropertySpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.kind = parse_enum<PropertyKind>(j.at("kind"), property_kind_from_string, "property kind");
  spec.required = j.value("required", false);
  if (j.contains("default") && !j.at("default").is_null()) spec.default_value = j.at("default");
  if (j.contains("allowed_values") && j.at("allowed_values").is_array()) {
    for (const auto& v : j.at("allowed_values")) spec.allowed_values.push_back(v);
  }
  spec.description = j.value("description", std::string());
  if (j.contains("element_schema") && j.at("element_schema").is_array()) {
    std::vector<PropertySpec> kids;
    for (const auto& k : j.at("element_schema")) kids.push_back(property_spec_from_json(k));
    spec.element_schema = std::move(kids);
  }
  return spec;
}

ComponentSchema component_schema_from_json(const Json& j) {
  ComponentSchema schema;
  schema.component_name = j.at("component_name").get<std::string>();
  schema.has_children = j.value("has_children", false);
  for (const auto& p : j.at("properties")) schema.properties.push_back(property_spec_from_json(p));
  schema.source_digest = j.value("source_digest", std::string());
  return schema;
}

ViContextOccurrence occurrence_from_json(const Json& j) {
  ViContextOccurrence o;
  o.property = j.value("property", std::string());
  o.kind = parse_enum<ViContextKind>(j.at("kind"), vi_context_kind_from_string, "vi-context kind");
  o.span.start = j.at("span").at(0).get<std::size_t>();
  o.span.end = j.at("span").at(1).get<std::size_t>();
  o.snippet = j.at("snippet").get<std::string>();
  return o;
}

ImpactScore impact_score_from_json(const Json& j) {
  ImpactScore s;
  s.property = j.at("property").get<std::string>();
  s.n = j.at("n").get<std::size_t>();
  s.base = j.at("base").get<double>();
  s.coefficient = j.at("coefficient").get<double>();
  s.impact = j.at("impact").get<double>();
  s.level = parse_enum<ImpactLevel>(j.at("level"), impact_level_from_string, "impact level");
  s.impactful = j.at("impactful").get<bool>();
  for (const auto& oj : j.at("occurrences")) {
    auto o = occurrence_from_json(oj);
    o.property = s.property;
    s.occurrences.push_back(std::move(o));
  }
  return s;
}

std::vector<ImpactScore> impact_report_from_json(const Json& j) {
  std::vector<ImpactScore> out;
  for (const auto& s : j) out.push_back(impact_score_from_json(s));
  return out;
}

VariationConfig variation_from_json(const Json& j) {
  VariationConfig v;
  v.name = j.at("name").get<std::string>();
  v.description = j.value("description", std::string());
  v.assignments = j.contains("properties") ? j.at("properties") : Json::object();
  return v;
}

CoverageEntry coverage_entry_from_json(const Json& j) {
  CoverageEntry e;
  e.property = j.at("property").get<std::string>();
  e.kind = parse_enum<PropertyKind>(j.at("kind"), property_kind_from_string, "property kind");
  e.domain_classes = strings_from_json(j.at("domain_classes"));
  e.observed_classes = strings_from_json(j.at("observed_classes"));
  e.ratio = j.at("ratio").get<double>();
  e.missing = strings_from_json(j.at("missing"));
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) e.children.push_back(coverage_entry_from_json(c));
  }
  return e;
}

CoverageReport coverage_report_from_json(const Json& j) {
  CoverageReport r;
  for (const auto& e : j.at("entries")) r.entries.push_back(coverage_entry_from_json(e));
  r.aggregate = j.at("aggregate").get<double>();
  r.fully_covered = j.at("fully_covered").get<bool>();
  return r;
}

std::string source_digest(std::string_view source) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(source.data(), source.size(), md.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

}  // namespace facet
