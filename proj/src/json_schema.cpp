#include "facet/json_schema.hpp"

#include <cmath>

namespace facet {

namespace {

bool type_matches(const std::string& type, const Json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void check(const Json& schema, const Json& v, const std::string& path, std::vector<std::string>& out) const {
    if (schema.is_boolean()) {
      if (!schema.get<bool>()) out.push_back(path + ": no value allowed");
      return;
    }
    if (!schema.is_object()) return;

    if (auto ref = schema.find("$ref"); ref != schema.end()) {
      const Json* target = resolve(ref->get<std::string>());
      if (target == nullptr) {
        out.push_back(path + ": unresolvable $ref " + ref->get<std::string>());
      } else {
        check(*target, v, path, out);
      }
    }

    if (auto t = schema.find("type"); t != schema.end()) {
      bool ok = false;
      std::string names;
      if (t->is_string()) {
        ok = type_matches(t->get<std::string>(), v);
        names = t->get<std::string>();
      } else {
        for (const auto& name : *t) {
          ok = ok || type_matches(name.get<std::string>(), v);
          names += (names.empty() ? "" : "|") + name.get<std::string>();
        }
      }
      if (!ok) {
        out.push_back(path + ": expected " + names);
        return;
      }
    }

    if (auto e = schema.find("enum"); e != schema.end()) {
      bool found = false;
      for (const auto& option : *e) found = found || option == v;
      if (!found) out.push_back(path + ": value not in enum");
    }
    if (auto c = schema.find("const"); c != schema.end() && *c != v) out.push_back(path + ": expected constant " + c->dump());

    if (v.is_number()) {
      const double d = v.get<double>();
      if (auto m = schema.find("minimum"); m != schema.end() && d < m->get<double>()) {
        out.push_back(path + ": below minimum " + m->dump());
      }
      if (auto m = schema.find("maximum"); m != schema.end() && d > m->get<double>()) {
        out.push_back(path + ": above maximum " + m->dump());
      }
    }
    if (v.is_string()) {
      if (auto m = schema.find("minLength"); m != schema.end() && v.get<std::string>().size() < m->get<std::size_t>()) {
        out.push_back(path + ": shorter than " + m->dump());
      }
    }

    if (v.is_object()) {
      if (auto req = schema.find("required"); req != schema.end()) {
        for (const auto& name : *req) {
          if (!v.contains(name.get<std::string>())) out.push_back(path + ": missing required \"" + name.get<std::string>() + "\"");
        }
      }
      const auto props = schema.find("properties");
      const auto additional = schema.find("additionalProperties");
      for (const auto& [key, child] : v.items()) {
        const std::string child_path = path + "/" + key;
        if (props != schema.end() && props->contains(key)) {
          check((*props)[key], child, child_path, out);
        } else if (additional != schema.end()) {
          if (additional->is_boolean() && !additional->get<bool>()) {
            out.push_back(child_path + ": unexpected property");
          } else if (additional->is_object()) {
            check(*additional, child, child_path, out);
          }
        }
      }
    }

    if (v.is_array()) {
      if (auto items = schema.find("items"); items != schema.end()) {
        for (std::size_t i = 0; i < v.size(); ++i) check(*items, v[i], path + "/" + std::to_string(i), out);
      }
      if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>()) {
        out.push_back(path + ": fewer than " + m->dump() + " items");
      }
      if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<std::size_t>()) {
        out.push_back(path + ": more than " + m->dump() + " items");
      }
    }

    for (const char* key : {"anyOf", "oneOf"}) {
      auto options = schema.find(key);
      if (options == schema.end()) continue;
      std::size_t matches = 0;
      for (const auto& option : *options) {
        std::vector<std::string> scratch;
        check(option, v, path, scratch);
        if (scratch.empty()) ++matches;
      }
      const bool ok = std::string(key) == "anyOf" ? matches > 0 : matches == 1;
      if (!ok) out.push_back(path + ": " + key + " matched " + std::to_string(matches) + " alternatives");
    }
  }

 private:
  const Json* resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) return nullptr;
    const Json* node = &root_;
    std::size_t pos = 2;
    while (pos <= ref.size()) {
      const auto slash = ref.find('/', pos);
      const std::string part = ref.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos);
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
      if (slash == std::string::npos) break;
      pos = slash + 1;
    }
    return node;
  }

  const Json& root_;
};

}  // namespace

std::vector<std::string> validate_json(const Json& schema, const Json& instance) {
  std::vector<std::string> out;
  Validator(schema).check(schema, instance, "", out);
  return out;
}

}  // namespace facet
