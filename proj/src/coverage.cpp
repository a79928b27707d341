#include "facet/coverage.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "facet/analysis.hpp"
#include "facet/errors.hpp"
#include "facet/parser.hpp"

namespace facet {

using ast::Node;
using ast::NodeKind;

namespace {

constexpr const char* kLengthClasses[] = {"length-0", "length-1-4", "length-5+"};

// Key for distinct-value counting; numerically equal numbers collapse.
std::string distinct_key(const Json& v) {
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return "n:" + os.str();
  }
  return v.dump();
}

std::size_t distinct_count(const std::vector<Json>& values, bool strings_only, bool numbers_only) {
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (strings_only && !v.is_string()) continue;
    if (numbers_only && !v.is_number()) continue;
    seen.insert(distinct_key(v));
  }
  return seen.size();
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

bool has_long_string(const std::vector<Json>& values) {
  return std::any_of(values.begin(), values.end(), [](const Json& v) {
    return v.is_string() && utf8_length(v.get<std::string>()) > EquivalenceClassifier::kLongString;
  });
}

const char* length_class(std::size_t n) {
  if (n == 0) return kLengthClasses[0];
  if (n <= 4) return kLengthClasses[1];
  return kLengthClasses[2];
}

std::vector<std::string> distinct_classes(std::size_t u) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= std::min(u, EquivalenceClassifier::kDistinctTarget); ++i) {
    out.push_back("distinct-" + std::to_string(i));
  }
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::string prefixed(const std::string& path, const std::string& descriptor) {
  return path + ": " + descriptor;
}

}  // namespace

// ---- classifier ----------------------------------------------------------------

std::vector<std::string> EquivalenceClassifier::domain(const PropertySpec& spec) {
  switch (spec.kind) {
    case PropertyKind::Categorical: {
      std::vector<std::string> out;
      for (const auto& v : spec.allowed_values) out.push_back(v.dump());
      return out;
    }
    case PropertyKind::Boolean:
      return {"true", "false"};
    case PropertyKind::String: {
      auto out = distinct_classes(kDistinctTarget);
      out.emplace_back("long");
      return out;
    }
    case PropertyKind::Number:
      return distinct_classes(kDistinctTarget);
    case PropertyKind::Array:
      return {kLengthClasses[0], kLengthClasses[1], kLengthClasses[2]};
    default:
      return {};
  }
}

std::vector<std::string> EquivalenceClassifier::observed(const PropertySpec& spec, const std::vector<Json>& values) {
  std::vector<std::string> out;
  auto add = [&](const std::string& c) {
    if (!contains(out, c)) out.push_back(c);
  };
  switch (spec.kind) {
    case PropertyKind::Categorical:
      for (const auto& v : values) {
        const bool allowed = std::find(spec.allowed_values.begin(), spec.allowed_values.end(), v) !=
                             spec.allowed_values.end();
        add(allowed ? v.dump() : kInvalid);
      }
      break;
    case PropertyKind::Boolean:
      for (const auto& v : values) add(v.is_boolean() ? v.dump() : kInvalid);
      break;
    case PropertyKind::String:
      out = distinct_classes(distinct_count(values, true, false));
      if (has_long_string(values)) out.emplace_back("long");
      break;
    case PropertyKind::Number:
      out = distinct_classes(distinct_count(values, false, true));
      break;
    case PropertyKind::Array:
      for (const auto& v : values) {
        if (v.is_array()) add(length_class(v.size()));
      }
      // Keep domain order for stable output.
      {
        std::vector<std::string> ordered;
        for (const char* c : kLengthClasses) {
          if (contains(out, c)) ordered.emplace_back(c);
        }
        out = std::move(ordered);
      }
      break;
    default:
      break;
  }
  return out;
}

std::string EquivalenceClassifier::signature_class(const PropertySpec& spec, const Json& value) {
  (void)spec;
  if (value.is_string()) return "s:" + value.get<std::string>();
  if (value.is_number()) return distinct_key(value);
  return value.dump();
}

// ---- coverage -------------------------------------------------------------------

ObservedValues observed_values(const ComponentSchema& schema, const std::vector<VariationConfig>& variations) {
  ObservedValues out;
  for (const auto& spec : schema.properties) out[spec.name];
  for (const auto& variation : variations) {
    for (const auto& [name, value] : variation.assignments.items()) {
      if (schema.find(name) == nullptr) throw UnknownProperty(name);
    }
    for (const auto& spec : schema.properties) {
      auto it = variation.assignments.find(spec.name);
      if (it != variation.assignments.end()) {
        out[spec.name].push_back(*it);
      } else if (spec.default_value) {
        out[spec.name].push_back(*spec.default_value);
      }
    }
  }
  return out;
}

namespace {

CoverageEntry entry_at(const PropertySpec& spec, const std::vector<Json>& values, const std::string& path) {
  CoverageEntry e;
  e.property = path;
  e.kind = spec.kind;
  e.domain_classes = EquivalenceClassifier::domain(spec);
  e.observed_classes = EquivalenceClassifier::observed(spec, values);

  switch (spec.kind) {
    case PropertyKind::Categorical:
    case PropertyKind::Boolean: {
      std::size_t hit = 0;
      for (const auto& c : e.domain_classes) {
        if (contains(e.observed_classes, c)) {
          ++hit;
        } else {
          e.missing.push_back("value " + c + " unobserved");
        }
      }
      e.ratio = e.domain_classes.empty() ? 0.0
                                         : static_cast<double>(hit) / static_cast<double>(e.domain_classes.size());
      break;
    }
    case PropertyKind::String: {
      const std::size_t u = std::min(distinct_count(values, true, false), EquivalenceClassifier::kDistinctTarget);
      const bool long_seen = has_long_string(values);
      e.ratio = 0.5 * static_cast<double>(u) / 3.0 + (long_seen ? 0.5 : 0.0);
      if (u < EquivalenceClassifier::kDistinctTarget) {
        e.missing.push_back(std::to_string(EquivalenceClassifier::kDistinctTarget - u) + " more distinct values needed");
      }
      if (!long_seen) e.missing.emplace_back("no string > 50 chars");
      break;
    }
    case PropertyKind::Number: {
      const std::size_t u = std::min(distinct_count(values, false, true), EquivalenceClassifier::kDistinctTarget);
      e.ratio = static_cast<double>(u) / 3.0;
      if (u < EquivalenceClassifier::kDistinctTarget) {
        e.missing.push_back(std::to_string(EquivalenceClassifier::kDistinctTarget - u) + " more distinct values needed");
      }
      break;
    }
    case PropertyKind::Object: {
      std::vector<double> ratios;
      for (const auto& field : spec.element_schema.value_or(std::vector<PropertySpec>{})) {
        if (!is_sampled_kind(field.kind)) continue;
        std::vector<Json> field_values;
        for (const auto& v : values) {
          if (!v.is_object()) continue;
          auto it = v.find(field.name);
          if (it != v.end()) field_values.push_back(*it);
        }
        CoverageEntry child = entry_at(field, field_values, path + "." + field.name);
        for (const auto& m : child.missing) e.missing.push_back(prefixed(child.property, m));
        ratios.push_back(child.ratio);
        e.domain_classes.push_back(field.name);
        if (child.ratio >= 1.0) e.observed_classes.push_back(field.name);
        e.children.push_back(std::move(child));
      }
      if (ratios.empty()) {
        // No sampled fields: any object instance covers it.
        const bool any = std::any_of(values.begin(), values.end(), [](const Json& v) { return v.is_object(); });
        e.ratio = any ? 1.0 : 0.0;
        if (!any) e.missing.emplace_back("no object value observed");
      } else {
        e.ratio = mean(ratios);
      }
      break;
    }
    case PropertyKind::Array: {
      std::size_t hit = 0;
      for (const auto& c : e.domain_classes) {
        if (contains(e.observed_classes, c)) {
          ++hit;
        } else {
          e.missing.push_back("length class " + c.substr(7) + " unobserved");
        }
      }
      const double length_ratio = static_cast<double>(hit) / 3.0;
      const PropertySpec* item = spec.element_schema && !spec.element_schema->empty()
                                     ? &spec.element_schema->front()
                                     : nullptr;
      if (item != nullptr && is_sampled_kind(item->kind)) {
        std::vector<Json> elements;
        for (const auto& v : values) {
          if (!v.is_array()) continue;
          for (const auto& el : v) elements.push_back(el);
        }
        CoverageEntry child = entry_at(*item, elements, path + "[]");
        for (const auto& m : child.missing) e.missing.push_back(prefixed(child.property, m));
        e.ratio = (child.ratio + length_ratio) / 2.0;
        e.children.push_back(std::move(child));
      } else {
        e.ratio = length_ratio;
      }
      break;
    }
    default:
      break;
  }
  e.ratio = std::clamp(e.ratio, 0.0, 1.0);
  return e;
}

}  // namespace

CoverageEntry coverage_entry(const PropertySpec& spec, const std::vector<Json>& values) {
  return entry_at(spec, values, spec.name);
}

CoverageReport coverage(const ComponentSchema& schema, const std::vector<ImpactScore>& impacts,
                        const std::vector<VariationConfig>& variations) {
  const ObservedValues observed = observed_values(schema, variations);
  auto impact_of = [&](const std::string& name) -> const ImpactScore* {
    for (const auto& s : impacts) {
      if (s.property == name) return &s;
    }
    return nullptr;
  };

  std::vector<const PropertySpec*> order;
  for (const auto& spec : schema.properties) {
    if (is_sampled_kind(spec.kind)) order.push_back(&spec);
  }
  std::stable_sort(order.begin(), order.end(), [&](const PropertySpec* a, const PropertySpec* b) {
    const ImpactScore* ia = impact_of(a->name);
    const ImpactScore* ib = impact_of(b->name);
    return (ia ? ia->impact : 0.0) > (ib ? ib->impact : 0.0);
  });

  CoverageReport report;
  std::vector<double> impactful_ratios;
  std::vector<double> all_ratios;
  bool impactful_full = true;
  bool all_full = true;
  for (const PropertySpec* spec : order) {
    CoverageEntry entry = coverage_entry(*spec, observed.at(spec->name));
    const ImpactScore* score = impact_of(spec->name);
    all_ratios.push_back(entry.ratio);
    all_full = all_full && entry.ratio >= 1.0;
    if (score != nullptr && score->impactful) {
      impactful_ratios.push_back(entry.ratio);
      impactful_full = impactful_full && entry.ratio >= 1.0;
    }
    report.entries.push_back(std::move(entry));
  }
  if (!impactful_ratios.empty()) {
    report.aggregate = mean(impactful_ratios);
    report.fully_covered = impactful_full;
  } else {
    report.aggregate = mean(all_ratios);
    report.fully_covered = !all_ratios.empty() && all_full;
  }
  return report;
}

// ---- gap instructions --------------------------------------------------------------

namespace {

void gap_lines(const CoverageEntry& e, std::vector<std::string>& out) {
  const std::string head = "- Property \"" + e.property + "\": ";
  switch (e.kind) {
    case PropertyKind::Categorical:
    case PropertyKind::Boolean:
      for (const auto& c : e.domain_classes) {
        if (!contains(e.observed_classes, c)) {
          out.push_back(head + "generate at least one variation with value " + c);
        }
      }
      break;
    case PropertyKind::String:
    case PropertyKind::Number: {
      std::size_t u = 0;
      for (const auto& c : e.observed_classes) {
        if (c.rfind("distinct-", 0) == 0) ++u;
      }
      if (u < EquivalenceClassifier::kDistinctTarget) {
        out.push_back(head + "generate at least " + std::to_string(EquivalenceClassifier::kDistinctTarget - u) +
                      " more distinct values");
      }
      if (e.kind == PropertyKind::String && !contains(e.observed_classes, "long")) {
        out.push_back(head + "include at least one value longer than 50 characters");
      }
      break;
    }
    case PropertyKind::Array:
      if (!contains(e.observed_classes, "length-0")) {
        out.push_back(head + "generate at least one variation with an empty array");
      }
      if (!contains(e.observed_classes, "length-1-4")) {
        out.push_back(head + "generate at least one variation with an array of 1 to 4 items");
      }
      if (!contains(e.observed_classes, "length-5+")) {
        out.push_back(head + "generate at least one variation with an array of 5 or more items");
      }
      for (const auto& child : e.children) gap_lines(child, out);
      break;
    case PropertyKind::Object:
      for (const auto& child : e.children) gap_lines(child, out);
      if (e.children.empty() && e.ratio < 1.0) out.push_back(head + "generate at least one object value");
      break;
    default:
      break;
  }
}

}  // namespace

std::string render_gap_instructions(const CoverageReport& report, const std::vector<ImpactScore>& impacts) {
  auto impact_of = [&](const std::string& name) {
    for (const auto& s : impacts) {
      if (s.property == name) return s.impact;
    }
    return 0.0;
  };
  std::vector<const CoverageEntry*> entries;
  for (const auto& e : report.entries) entries.push_back(&e);
  std::stable_sort(entries.begin(), entries.end(), [&](const CoverageEntry* a, const CoverageEntry* b) {
    const double ia = impact_of(a->property);
    const double ib = impact_of(b->property);
    if (ia != ib) return ia > ib;
    return a->property < b->property;
  });
  std::vector<std::string> lines;
  for (const CoverageEntry* e : entries) {
    if (e->ratio < 1.0) gap_lines(*e, lines);
  }
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

// ---- story extraction --------------------------------------------------------------

namespace {

std::string source_text(std::string_view source, const Node* n) {
  return std::string(source.substr(n->span.start, n->span.end - n->span.start));
}

const Node* property_value(const Node* object, std::string_view key) {
  if (object == nullptr || object->kind != NodeKind::ObjectExpression) return nullptr;
  for (const Node* p : object->kids) {
    if (p->kind == NodeKind::Property && !p->computed && p->kid(0) != nullptr && p->kid(0)->text == key) {
      return ast::unwrap(p->kid(1));
    }
  }
  return nullptr;
}

std::string string_literal(const Node* n) {
  auto v = literal_value(n);
  return v && v->is_string() ? v->get<std::string>() : std::string();
}

Json read_args(const Node* args, std::string_view source, const std::string& story,
               std::vector<std::string>& warnings) {
  Json out = Json::object();
  if (args == nullptr || args->kind != NodeKind::ObjectExpression) return out;
  for (const Node* p : args->kids) {
    if (p->kind != NodeKind::Property) {
      warnings.push_back(story + ": spread in args ignored");
      continue;
    }
    const Node* key = p->kid(0);
    if (key == nullptr || p->computed) {
      warnings.push_back(story + ": computed arg key ignored");
      continue;
    }
    const Node* value = ast::unwrap(p->kid(1));
    if (value != nullptr && value->kind == NodeKind::Call && value->kids.size() == 2 &&
        value->kid(0)->kind == NodeKind::Identifier && value->kid(0)->text == "action") {
      // action("description") stands for a function-kind prop.
      if (auto label = literal_value(value->kid(1)); label && label->is_string()) {
        out[key->text] = *label;
        continue;
      }
    }
    if (auto v = literal_value(p->kid(1)); v && !p->shorthand) {
      out[key->text] = std::move(*v);
    } else {
      out[key->text] = source_text(source, p->kid(1));
      warnings.push_back(story + "." + key->text + ": non-literal value recorded as opaque text");
    }
  }
  return out;
}

}  // namespace

ExtractedStories extract_from_story_source(std::string_view source, std::string_view filename) {
  const ast::Ast tree = parse_program(source, options_for_filename(filename));
  const Node* root = tree.root();

  // Top-level object initializers by name.
  std::map<std::string, const Node*> objects;
  std::vector<std::pair<std::string, const Node*>> exported;  // name, declarator init
  const Node* meta = nullptr;
  for (const Node* s : root->kids) {
    const Node* decl = s->kind == NodeKind::ExportNamed ? s->kid(0) : s;
    if (decl != nullptr && decl->kind == NodeKind::VariableDeclaration) {
      for (const Node* d : decl->kids) {
        const Node* t = d->kid(0);
        if (t == nullptr || t->kind != NodeKind::Identifier) continue;
        objects[t->text] = ast::unwrap(d->kid(1));
        if (s->kind == NodeKind::ExportNamed) exported.emplace_back(t->text, ast::unwrap(d->kid(1)));
      }
    }
    if (s->kind == NodeKind::ExportDefault) {
      const Node* target = ast::unwrap(s->kid(0));
      if (target != nullptr && target->kind == NodeKind::Identifier) {
        auto it = objects.find(target->text);
        target = it == objects.end() ? nullptr : it->second;
      }
      if (target != nullptr && target->kind == NodeKind::ObjectExpression) meta = target;
    }
  }
  if (meta == nullptr) throw NotAStoryFile("no default-export story metadata in " + std::string(filename));

  ExtractedStories out;
  if (const Node* component = property_value(meta, "component")) {
    out.component = component->kind == NodeKind::Identifier ? component->text : source_text(source, component);
  }

  // `Story.args = {...}` assignments after the declaration.
  std::map<std::string, const Node*> assigned_args;
  for (const Node* s : root->kids) {
    if (s->kind != NodeKind::ExpressionStatement) continue;
    const Node* e = ast::unwrap(s->kid(0));
    if (e == nullptr || e->kind != NodeKind::Assignment) continue;
    const Node* target = e->kid(0);
    if (target->kind == NodeKind::Member && !target->computed && target->kid(1)->text == "args" &&
        target->kid(0)->kind == NodeKind::Identifier) {
      assigned_args[target->kid(0)->text] = ast::unwrap(e->kid(1));
    }
  }

  for (const auto& [name, init] : exported) {
    if (init == meta) continue;
    const Node* story = init != nullptr && init->kind == NodeKind::ObjectExpression ? init : nullptr;
    const Node* args = story != nullptr ? property_value(story, "args") : nullptr;
    if (auto it = assigned_args.find(name); it != assigned_args.end()) args = it->second;
    if (story == nullptr && args == nullptr) continue;

    VariationConfig config;
    config.name = name;
    if (story != nullptr) {
      const std::string display = string_literal(property_value(story, "name"));
      if (!display.empty()) config.name = display;
      const Node* docs = property_value(property_value(story, "parameters"), "docs");
      config.description = string_literal(property_value(property_value(docs, "description"), "story"));
    }
    config.assignments = read_args(args, source, name, out.warnings);
    out.variations.push_back(std::move(config));
  }
  return out;
}

}  // namespace facet
