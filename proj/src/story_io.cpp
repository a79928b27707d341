#include "facet/story_io.hpp"

#include <cctype>
#include <set>

#include "facet/errors.hpp"

namespace facet {

namespace {

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> kWords{
      "break",     "case",     "catch",   "class",      "const",     "continue", "debugger",
      "default",   "delete",   "do",      "else",       "enum",      "export",   "extends",
      "false",     "finally",  "for",     "function",   "if",        "import",   "in",
      "instanceof", "new",     "null",    "return",     "super",     "switch",   "this",
      "throw",     "true",     "try",     "typeof",     "var",       "void",     "while",
      "with",      "yield",    "let",     "static",     "implements", "interface", "package",
      "private",   "protected", "public", "await",      "async",     "arguments", "eval",
      "undefined", "NaN",      "Infinity", "meta",      "Story",     "type",     "as"};
  return kWords;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) != 0) return false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_' && c != '$') return false;
  }
  return true;
}

std::string quote(const std::string& s) {
  try {
    return Json(s).dump();
  } catch (const Json::exception&) {
    throw UnserializableValue("string is not valid UTF-8");
  }
}

std::string object_key(const std::string& key) {
  return is_identifier(key) && reserved_words().count(key) == 0 ? key : quote(key);
}

void write_value(const Json& v, std::string& out, int indent) {
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    for (const auto& [k, child] : v.items()) {
      out.append(static_cast<std::size_t>(indent + 2), ' ');
      out += object_key(k) + ": ";
      write_value(child, out, indent + 2);
      out += ",\n";
    }
    out.append(static_cast<std::size_t>(indent), ' ');
    out += "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (const auto& child : v) {
      out.append(static_cast<std::size_t>(indent + 2), ' ');
      write_value(child, out, indent + 2);
      out += ",\n";
    }
    out.append(static_cast<std::size_t>(indent), ' ');
    out += "]";
  } else if (v.is_string()) {
    out += quote(v.get<std::string>());
  } else {
    out += v.dump();
  }
}

std::string jsdoc_text(const std::string& description) {
  std::string out;
  for (char c : description) {
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  std::size_t pos = 0;
  while ((pos = out.find("*/", pos)) != std::string::npos) {
    out.replace(pos, 2, "*\\/");
    pos += 3;
  }
  return out;
}

bool uses_actions(const ComponentSchema& schema, const std::vector<VariationConfig>& variations) {
  for (const auto& v : variations) {
    for (const auto& [k, value] : v.assignments.items()) {
      const PropertySpec* spec = schema.find(k);
      if (spec != nullptr && spec->kind == PropertyKind::Function) return true;
    }
  }
  return false;
}

std::string story_block(const ComponentSchema& schema, const VariationConfig& v, const std::string& id) {
  std::string out;
  if (!v.description.empty()) out += "/** " + jsdoc_text(v.description) + " */\n";
  out += "export const " + id + ": Story = {\n";
  out += "  name: " + quote(v.name) + ",\n";
  if (!v.description.empty()) {
    out += "  parameters: { docs: { description: { story: " + quote(v.description) + " } } },\n";
  }
  const Json args = ordered_assignments(schema, v.assignments);
  if (args.empty()) {
    out += "  args: {},\n";
  } else {
    out += "  args: {\n";
    for (const auto& [k, value] : args.items()) {
      const PropertySpec* spec = schema.find(k);
      out += "    " + object_key(k) + ": ";
      if (spec != nullptr && spec->kind == PropertyKind::Function) {
        if (!value.is_string() || value.get<std::string>().empty()) {
          throw UnserializableValue(v.name + "." + k + ": function value needs a descriptive string");
        }
        out += "action(" + quote(value.get<std::string>()) + ")";
      } else {
        write_value(value, out, 4);
      }
      out += ",\n";
    }
    out += "  },\n";
  }
  out += "};\n";
  return out;
}

}  // namespace

Json ordered_assignments(const ComponentSchema& schema, const Json& assignments) {
  Json out = Json::object();
  for (const auto& spec : schema.properties) {
    auto it = assignments.find(spec.name);
    if (it != assignments.end()) out[spec.name] = *it;
  }
  for (const auto& [k, v] : assignments.items()) {
    if (!out.contains(k)) out[k] = v;
  }
  return out;
}

Json emit_json(const ComponentSchema& schema, const std::vector<VariationConfig>& variations) {
  Json doc = Json::object();
  doc["component"] = schema.component_name;
  doc["source_digest"] = schema.source_digest;
  Json list = Json::array();
  for (const auto& v : variations) {
    Json item = Json::object();
    item["name"] = v.name;
    item["description"] = v.description;
    item["properties"] = ordered_assignments(schema, v.assignments);
    list.push_back(std::move(item));
  }
  doc["variations"] = std::move(list);
  return doc;
}

std::string emit_json_text(const ComponentSchema& schema, const std::vector<VariationConfig>& variations) {
  try {
    return emit_json(schema, variations).dump(2) + "\n";
  } catch (const Json::exception& e) {
    throw UnserializableValue(e.what());
  }
}

std::vector<VariationConfig> variations_from_json(const Json& document) {
  if (!document.is_object() || !document.contains("variations") || !document["variations"].is_array()) {
    throw Error("variations document must be an object with a \"variations\" array");
  }
  std::vector<VariationConfig> out;
  for (const auto& item : document["variations"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
      throw Error("each variation needs a string \"name\"");
    }
    VariationConfig v;
    v.name = item["name"].get<std::string>();
    if (item.contains("description") && item["description"].is_string()) {
      v.description = item["description"].get<std::string>();
    }
    if (item.contains("properties")) {
      if (!item["properties"].is_object()) throw Error("variation \"" + v.name + "\": properties must be an object");
      v.assignments = item["properties"];
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string sanitize_identifier(std::string_view name) {
  std::string out;
  bool pending = false;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
      if (pending && !out.empty()) out += '_';
      pending = false;
      out += c;
    } else {
      pending = true;
    }
  }
  if (out.empty()) return "V";
  if (std::isdigit(static_cast<unsigned char>(out[0])) != 0 || reserved_words().count(out) != 0) out = "V" + out;
  return out;
}

std::vector<std::string> story_identifiers(const std::vector<VariationConfig>& variations) {
  std::vector<std::string> ids;
  std::set<std::string> used;
  for (const auto& v : variations) {
    const std::string base = sanitize_identifier(v.name);
    std::string id = base;
    for (int k = 2; used.count(id) != 0; ++k) id = base + "_" + std::to_string(k);
    used.insert(id);
    ids.push_back(id);
  }
  return ids;
}

std::string emit_story_module(const ComponentSchema& schema, const std::vector<VariationConfig>& variations,
                              std::string_view import_path) {
  const std::string& c = schema.component_name;
  const std::string path = import_path.empty() ? "./" + c : std::string(import_path);
  std::string out;
  out += "import type { Meta, StoryObj } from \"@storybook/react\";\n";
  if (uses_actions(schema, variations)) out += "import { action } from \"@storybook/addon-actions\";\n";
  out += "import { " + c + " } from " + quote(path) + ";\n\n";
  out += "const meta = {\n  title: " + quote("Generated/" + c) + ",\n  component: " + c + ",\n} satisfies Meta<typeof " +
         c + ">;\n\n";
  out += "export default meta;\ntype Story = StoryObj<typeof meta>;\n";
  const auto ids = story_identifiers(variations);
  for (std::size_t i = 0; i < variations.size(); ++i) {
    out += "\n";
    out += story_block(schema, variations[i], ids[i]);
  }
  return out;
}

std::string emit_story_snippet(const ComponentSchema& schema, const std::vector<VariationConfig>& variations,
                               std::size_t index) {
  if (index >= variations.size()) throw Error("variation index out of range");
  const auto ids = story_identifiers(variations);
  return story_block(schema, variations[index], ids[index]);
}

}  // namespace facet
