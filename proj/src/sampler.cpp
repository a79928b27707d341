#include "facet/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

#include "facet/coverage.hpp"
#include "facet/errors.hpp"

namespace facet {

namespace detail {
extern const std::string_view kPromptTemplate;
}

namespace {

std::string one_line(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<Json> parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(d)) return std::nullopt;
  if (t.find_first_of(".eE") == std::string::npos && std::fabs(d) < 9007199254740992.0) {
    return Json(static_cast<long long>(d));
  }
  return Json(d);
}

void check_fields(const std::vector<PropertySpec>& specs, const Json& object, const std::string& prefix,
                  Json& out, std::vector<std::string>& violations, std::vector<std::string>& warnings);

std::optional<Json> check_value(const PropertySpec& spec, const Json& v, const std::string& path,
                                std::vector<std::string>& violations, std::vector<std::string>& warnings) {
  switch (spec.kind) {
    case PropertyKind::Boolean:
      if (v.is_boolean()) return v;
      if (v.is_string() && (v == "true" || v == "false")) return Json(v == "true");
      violations.push_back(path + ": expected boolean");
      return std::nullopt;
    case PropertyKind::Number:
      if (v.is_number()) return v;
      if (v.is_string()) {
        if (auto n = parse_number(v.get<std::string>())) return n;
      }
      violations.push_back(path + ": expected number");
      return std::nullopt;
    case PropertyKind::String:
      if (!v.is_string()) {
        violations.push_back(path + ": expected string");
        return std::nullopt;
      }
      if (is_image_like(spec.name) && !is_well_formed_url(v.get<std::string>())) {
        violations.push_back(path + ": expected an image URL such as https://placehold.co/600x400");
        return std::nullopt;
      }
      return v;
    case PropertyKind::Categorical: {
      auto allowed = [&](const Json& x) {
        return std::find(spec.allowed_values.begin(), spec.allowed_values.end(), x) != spec.allowed_values.end();
      };
      if (allowed(v)) return v;
      if (v.is_string()) {
        if (auto n = parse_number(v.get<std::string>()); n && allowed(*n)) return n;
        if ((v == "true" || v == "false") && allowed(Json(v == "true"))) return Json(v == "true");
      }
      violations.push_back(path + ": not in allowed values");
      return std::nullopt;
    }
    case PropertyKind::Object: {
      if (!v.is_object()) {
        violations.push_back(path + ": expected object");
        return std::nullopt;
      }
      Json out = Json::object();
      const std::size_t before = violations.size();
      check_fields(spec.element_schema.value_or(std::vector<PropertySpec>{}), v, path + ".", out, violations,
                   warnings);
      if (violations.size() != before) return std::nullopt;
      return out;
    }
    case PropertyKind::Array: {
      if (!v.is_array()) {
        violations.push_back(path + ": expected array");
        return std::nullopt;
      }
      const PropertySpec* item = spec.element_schema && !spec.element_schema->empty()
                                     ? &spec.element_schema->front()
                                     : nullptr;
      Json out = Json::array();
      bool ok = true;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (item == nullptr) {
          out.push_back(v[i]);
          continue;
        }
        PropertySpec named = *item;
        named.name = spec.name;  // image-like detection follows the owning prop
        auto checked = check_value(named, v[i], path + "[" + std::to_string(i) + "]", violations, warnings);
        if (checked) {
          out.push_back(std::move(*checked));
        } else {
          ok = false;
        }
      }
      if (!ok) return std::nullopt;
      return out;
    }
    case PropertyKind::Function:
      if (v.is_string() && !trim(v.get<std::string>()).empty()) return v;
      violations.push_back(path + ": expected a string describing the function");
      return std::nullopt;
    case PropertyKind::Node:
      if (v.is_string() || v.is_number()) return v;
      violations.push_back(path + ": expected text content");
      return std::nullopt;
  }
  return std::nullopt;
}

void check_fields(const std::vector<PropertySpec>& specs, const Json& object, const std::string& prefix,
                  Json& out, std::vector<std::string>& violations, std::vector<std::string>& warnings) {
  for (const auto& [key, value] : object.items()) {
    const bool known = std::any_of(specs.begin(), specs.end(), [&](const PropertySpec& s) { return s.name == key; });
    if (!known) warnings.push_back(prefix + key + ": unknown property dropped");
  }
  for (const auto& spec : specs) {
    auto it = object.find(spec.name);
    if (it == object.end() || it->is_null()) {
      if (spec.required && !spec.default_value) violations.push_back(prefix + spec.name + ": required, no default");
      continue;
    }
    if (auto checked = check_value(spec, *it, prefix + spec.name, violations, warnings)) {
      out[spec.name] = std::move(*checked);
    }
  }
}

std::string strip_fences(std::string_view text) {
  std::string t = trim(text);
  if (t.rfind("```", 0) == 0) {
    const auto nl = t.find('\n');
    t = nl == std::string::npos ? std::string() : t.substr(nl + 1);
    const auto close = t.rfind("```");
    if (close != std::string::npos) t = t.substr(0, close);
  }
  return trim(t);
}

std::string reask_note(const std::string& problem) {
  return "\n\nYour previous reply could not be used (" + problem +
         "). Reply with only a JSON object of the form {\"configurations\": [ ... ]}.";
}

std::string uniquify(const std::string& name, std::set<std::string>& used) {
  const std::string base = trim(name).empty() ? "Variation" : trim(name);
  std::string candidate = base;
  for (int k = 2; used.count(candidate) != 0; ++k) candidate = base + " " + std::to_string(k);
  used.insert(candidate);
  return candidate;
}

}  // namespace

std::string_view prompt_template() { return detail::kPromptTemplate; }

const std::vector<std::string>& prompt_slots() {
  static const std::vector<std::string> kSlots{
      "componentName",      "boolean",     "high_impact_properties", "medium_impact_properties",
      "low_impact_properties", "story_count", "instructions_from_coverage_analyzer", "custom_instructions"};
  return kSlots;
}

std::string render_prompt(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() + 1024);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

bool is_image_like(std::string_view property_name) {
  const std::string n = lower(property_name);
  for (const char* hint : {"image", "img", "avatar", "photo", "picture", "thumbnail", "logo", "poster", "banner"}) {
    if (n.find(hint) != std::string::npos) return true;
  }
  return n == "src" || (n.size() > 3 && n.compare(n.size() - 3, 3, "src") == 0);
}

bool is_well_formed_url(std::string_view text) {
  const std::string t(text);
  std::size_t scheme_end = 0;
  if (t.rfind("https://", 0) == 0) {
    scheme_end = 8;
  } else if (t.rfind("http://", 0) == 0) {
    scheme_end = 7;
  } else {
    return false;
  }
  if (t.find_first_of(" \t\r\n<>\"") != std::string::npos) return false;
  const auto host_end = t.find_first_of("/?#", scheme_end);
  const std::string host = t.substr(scheme_end, host_end == std::string::npos ? std::string::npos : host_end - scheme_end);
  if (host.empty() || host.front() == '.' || host.front() == '-') return false;
  for (char c : host) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '.' && c != '-' && c != ':') return false;
  }
  return host.find('.') != std::string::npos || host.rfind("localhost", 0) == 0;
}

std::string render_property_block(const PropertySpec& spec, const ImpactScore* score) {
  std::string out = "- " + spec.name + " (" + std::string(to_string(spec.kind)) + ")\n";
  out += "  - Required: " + std::string(spec.required ? "true" : "false") + "\n";
  if (spec.default_value) out += "  - Default value: " + spec.default_value->dump() + "\n";
  if (spec.kind == PropertyKind::Categorical) out += "  - Allowed values: " + Json(spec.allowed_values).dump() + "\n";
  if (!spec.description.empty()) out += "  - Description: " + one_line(spec.description) + "\n";
  if (spec.element_schema) {
    Json schema = Json::array();
    for (const auto& f : *spec.element_schema) schema.push_back(to_json(f));
    out += "  - Schema: " + schema.dump() + "\n";
  }
  if (score != nullptr && !score->occurrences.empty()) {
    std::vector<const ViContextOccurrence*> occ;
    for (const auto& o : score->occurrences) occ.push_back(&o);
    std::stable_sort(occ.begin(), occ.end(), [](const ViContextOccurrence* a, const ViContextOccurrence* b) {
      return base_score(a->kind) > base_score(b->kind);
    });
    out += "  - Usage Examples:\n";
    for (std::size_t i = 0; i < occ.size() && i < 3; ++i) {
      out += "    - " + std::string(to_string(occ[i]->kind)) + ": `" + one_line(occ[i]->snippet) + "`\n";
    }
  }
  return out;
}

std::string build_prompt(const SamplingRequest& req) {
  std::string sections[3];
  std::vector<const PropertySpec*> order;
  auto score_of = [&](const std::string& name) -> const ImpactScore* {
    for (const auto& s : req.impacts) {
      if (s.property == name) return &s;
    }
    return nullptr;
  };
  for (const auto& s : req.impacts) {
    if (const PropertySpec* spec = req.schema.find(s.property)) order.push_back(spec);
  }
  for (const auto& spec : req.schema.properties) {
    if (std::find(order.begin(), order.end(), &spec) == order.end()) order.push_back(&spec);
  }
  for (const PropertySpec* spec : order) {
    const ImpactScore* score = score_of(spec->name);
    const ImpactLevel level = score != nullptr ? score->level : ImpactLevel::Low;
    const int slot = level == ImpactLevel::High ? 0 : level == ImpactLevel::Medium ? 1 : 2;
    sections[slot] += render_property_block(*spec, score);
  }
  auto or_none = [](std::string text) {
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text.empty() ? std::string("(none)") : text;
  };
  std::map<std::string, std::string> values{
      {"componentName", req.schema.component_name},
      {"boolean", req.schema.has_children ? "true" : "false"},
      {"high_impact_properties", or_none(sections[0])},
      {"medium_impact_properties", or_none(sections[1])},
      {"low_impact_properties", or_none(sections[2])},
      {"story_count", std::to_string(req.count)},
      {"instructions_from_coverage_analyzer", or_none(req.coverage_gaps)},
      {"custom_instructions", or_none(req.user_instruction)},
  };
  return render_prompt(prompt_template(), values);
}

std::string build_user_message(const SamplingRequest& req) {
  std::string out = "Generate exactly " + std::to_string(req.count) + " property configurations for the " +
                    req.schema.component_name +
                    " component. Respond with a JSON object of the form {\"configurations\": [ ... ]} where each "
                    "item follows the Configuration Structure.";
  if (!req.existing.empty()) {
    out += "\n\nExisting variations (do not repeat them):";
    for (const auto& v : req.existing) out += "\n- " + v.name + ": " + v.assignments.dump();
  }
  return out;
}

ConfigCheck validate_config(const ComponentSchema& schema, const Json& raw) {
  ConfigCheck check;
  if (!raw.is_object()) {
    check.violations.emplace_back("configuration: expected object");
    return check;
  }
  VariationConfig config;
  if (raw.contains("name")) {
    if (raw["name"].is_string()) {
      config.name = trim(raw["name"].get<std::string>());
    } else {
      check.violations.emplace_back("name: expected string");
    }
  }
  if (raw.contains("description") && !raw["description"].is_null()) {
    if (raw["description"].is_string()) {
      config.description = raw["description"].get<std::string>();
    } else {
      check.violations.emplace_back("description: expected string");
    }
  }
  Json properties = Json::object();
  if (raw.contains("properties")) {
    if (raw["properties"].is_object()) {
      properties = raw["properties"];
    } else {
      check.violations.emplace_back("properties: expected object");
    }
  }
  check_fields(schema.properties, properties, "", config.assignments, check.violations, check.warnings);
  if (check.violations.empty()) check.config = std::move(config);
  return check;
}

std::string distinctness_signature(const ComponentSchema& schema, const std::vector<ImpactScore>& impacts,
                                   const VariationConfig& config) {
  std::vector<const PropertySpec*> props;
  for (const auto& spec : schema.properties) {
    const bool impactful = std::any_of(impacts.begin(), impacts.end(), [&](const ImpactScore& s) {
      return s.property == spec.name && s.impactful;
    });
    if (impactful) props.push_back(&spec);
  }
  if (props.empty()) {
    for (const auto& spec : schema.properties) {
      if (is_sampled_kind(spec.kind)) props.push_back(&spec);
    }
  }
  std::string sig;
  for (const PropertySpec* spec : props) {
    auto it = config.assignments.find(spec->name);
    std::string cls;
    if (it != config.assignments.end()) {
      cls = EquivalenceClassifier::signature_class(*spec, *it);
    } else if (spec->default_value) {
      cls = EquivalenceClassifier::signature_class(*spec, *spec->default_value);
    } else {
      cls = "<absent>";
    }
    sig += spec->name + "=" + cls + "\x1f";
  }
  return sig;
}

std::vector<Json> parse_candidates(std::string_view response) {
  const std::string text = strip_fences(response);
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    const auto open = text.find_first_of("[{");
    const auto close = text.find_last_of("]}");
    if (open != std::string::npos && close != std::string::npos && close > open) {
      doc = Json::parse(text.substr(open, close - open + 1), nullptr, false);
    }
  }
  if (doc.is_discarded()) throw MalformedResponse("response is not valid JSON");
  if (doc.is_array()) return std::vector<Json>(doc.begin(), doc.end());
  if (doc.is_object()) {
    if (doc.contains("properties") && doc["properties"].is_object()) return {doc};
    for (const char* key : {"configurations", "variations", "stories", "samples"}) {
      if (doc.contains(key) && doc[key].is_array()) return std::vector<Json>(doc[key].begin(), doc[key].end());
    }
    for (const auto& [key, value] : doc.items()) {
      if (value.is_array()) return std::vector<Json>(value.begin(), value.end());
    }
  }
  throw MalformedResponse("response holds no configuration array");
}

ValidationOutcome sample(const SamplingRequest& req, SamplerBackend& backend) {
  if (req.count < 1) throw Error("count must be at least 1");
  const std::string system = build_prompt(req);
  const std::string user = build_user_message(req);

  std::vector<Json> candidates;
  try {
    candidates = parse_candidates(backend.complete(system, user, true));
  } catch (const MalformedResponse& e) {
    candidates = parse_candidates(backend.complete(system, user + reask_note(e.what()), true));
  }

  ValidationOutcome outcome;
  if (candidates.size() > static_cast<std::size_t>(req.count)) {
    outcome.warnings.push_back("response held " + std::to_string(candidates.size()) + " configurations; kept the first " +
                               std::to_string(req.count));
    candidates.resize(static_cast<std::size_t>(req.count));
  }

  std::vector<VariationConfig> valid;
  std::vector<std::pair<Json, std::vector<std::string>>> invalid;
  for (const auto& raw : candidates) {
    ConfigCheck check = validate_config(req.schema, raw);
    for (auto& w : check.warnings) outcome.warnings.push_back(std::move(w));
    if (check.config) {
      valid.push_back(std::move(*check.config));
    } else {
      invalid.emplace_back(raw, std::move(check.violations));
    }
  }

  if (!invalid.empty()) {
    std::string note =
        "\n\nThese configurations violated the property schema. Return corrected versions of only these, in the "
        "same order, as {\"configurations\": [ ... ]}.";
    for (std::size_t i = 0; i < invalid.size(); ++i) {
      note += "\n\nConfiguration " + std::to_string(i + 1) + ": " + invalid[i].first.dump() + "\nViolations:";
      for (const auto& v : invalid[i].second) note += "\n- " + v;
    }
    std::vector<Json> repaired;
    try {
      repaired = parse_candidates(backend.complete(system, user + note, true));
    } catch (const MalformedResponse& e) {
      outcome.warnings.push_back(std::string("repair reply unusable: ") + e.what());
    }
    for (std::size_t i = 0; i < invalid.size(); ++i) {
      if (i < repaired.size()) {
        ConfigCheck check = validate_config(req.schema, repaired[i]);
        for (auto& w : check.warnings) outcome.warnings.push_back(std::move(w));
        if (check.config) {
          valid.push_back(std::move(*check.config));
          ++outcome.repaired_count;
          continue;
        }
        outcome.rejected.push_back({repaired[i], std::move(check.violations)});
      } else {
        outcome.rejected.push_back({invalid[i].first, std::move(invalid[i].second)});
      }
    }
  }

  std::map<std::string, std::string> seen;  // signature -> variation name
  std::set<std::string> names;
  for (const auto& v : req.existing) {
    seen.emplace(distinctness_signature(req.schema, req.impacts, v), v.name);
    names.insert(v.name);
  }
  for (auto& v : valid) {
    const std::string sig = distinctness_signature(req.schema, req.impacts, v);
    auto it = seen.find(sig);
    if (it != seen.end()) {
      Json raw = Json::object();
      raw["name"] = v.name;
      raw["description"] = v.description;
      raw["properties"] = v.assignments;
      outcome.rejected.push_back({raw, {"not distinct from existing variation '" + it->second + "'"}});
      continue;
    }
    v.name = uniquify(v.name, names);
    seen.emplace(sig, v.name);
    outcome.accepted.push_back(std::move(v));
  }
  return outcome;
}

}  // namespace facet
