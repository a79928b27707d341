#include "facet/stub_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

namespace facet {

namespace {

const std::vector<std::string> kAdjectives{
    "Amber", "Coastal", "Midnight", "Alpine", "Copper", "Velvet", "Harbor", "Golden", "Quiet", "Northern",
    "Rustic", "Urban", "Linen", "Maple", "Cedar", "Silver", "Crimson", "Meadow", "Granite", "Saffron"};

const std::vector<std::string> kProducts{
    "Ceramic Mug", "Desk Lamp", "Trail Backpack", "Wool Scarf", "Espresso Grinder", "Walnut Bookshelf",
    "Linen Throw", "Wireless Earbuds", "Cast Iron Skillet", "Leather Journal", "Running Shoes", "Glass Teapot",
    "Bamboo Cutting Board", "Canvas Tote", "Studio Headphones", "Pour-Over Kettle", "Rain Jacket", "Oak Side Table"};

const std::vector<std::string> kPeople{
    "Amara Okafor", "Lukas Schneider", "Priya Raman", "Mateo Alvarez", "Hana Sato", "Noah Bennett",
    "Fatima Zahra", "Elena Petrova", "Kwame Mensah", "Sofia Rossi", "Liam O'Connell", "Mei Lin"};

const std::vector<std::string> kCities{
    "Lisbon", "Kyoto", "Nairobi", "Montreal", "Reykjavik", "Buenos Aires", "Melbourne", "Seoul",
    "Cape Town", "Oslo", "Marrakesh", "Vancouver"};

const std::vector<std::string> kSentences{
    "Hand-finished stoneware with a speckled glaze",
    "Ships within two business days from our Portland studio",
    "Rated best in class by outdoor gear reviewers this season",
    "Made from recycled aluminium and responsibly sourced oak",
    "Limited run restocked after selling out in under a week",
    "Pairs well with the matching set from the autumn collection",
    "Customers mention the sturdy build and the quiet operation",
    "Available in three sizes with free returns for thirty days"};

const std::vector<std::string> kWords{
    "harbor", "lantern", "orchard", "summit", "meadow", "canyon", "breeze", "ember", "willow", "atlas",
    "cobalt", "juniper", "prairie", "tundra", "lagoon", "quartz"};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool has(const std::string& haystack, std::initializer_list<const char*> needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](const char* n) { return haystack.find(n) != std::string::npos; });
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct Gap {
  std::vector<Json> values;
  bool want_long = false;
  std::vector<int> lengths;  // requested length classes: 0, 1, 5
};

struct PromptModel {
  std::string component;
  int count = 1;
  std::vector<PropertySpec> properties;
  std::map<std::string, Gap> gaps;
  std::string instruction;
};

PromptModel read_prompt(const std::string& prompt) {
  static const std::regex kProp(R"(^- ([A-Za-z_$][A-Za-z0-9_$]*) \((boolean|number|string|categorical|object|array|function|node)\)$)");
  static const std::regex kGap(R"re(^- Property "([^"]+)": (.*)$)re");
  static const std::regex kCount(R"(\(where N = (\d+)\))");

  PromptModel model;
  std::istringstream in(prompt);
  std::string line;
  enum class Part { Head, Gaps, Instructions } part = Part::Head;
  PropertySpec* current = nullptr;
  std::string instruction;
  std::smatch m;
  while (std::getline(in, line)) {
    if (line == "**Coverage Requirements**") {
      part = Part::Gaps;
      current = nullptr;
      continue;
    }
    if (line == "**User Instructions**") {
      part = Part::Instructions;
      continue;
    }
    if (part == Part::Instructions) {
      instruction += (instruction.empty() ? "" : "\n") + line;
      continue;
    }
    if (part == Part::Gaps) {
      if (!std::regex_match(line, m, kGap)) continue;
      const std::string prop = m[1];
      const std::string what = m[2];
      Gap& gap = model.gaps[prop];
      const std::string marker = "generate at least one variation with value ";
      if (what.rfind(marker, 0) == 0) {
        Json v = Json::parse(what.substr(marker.size()), nullptr, false);
        if (!v.is_discarded()) gap.values.push_back(v);
      } else if (what.find("longer than 50") != std::string::npos) {
        gap.want_long = true;
      } else if (what.find("empty array") != std::string::npos) {
        gap.lengths.push_back(0);
      } else if (what.find("1 to 4 items") != std::string::npos) {
        gap.lengths.push_back(1);
      } else if (what.find("5 or more items") != std::string::npos) {
        gap.lengths.push_back(5);
      }
      continue;
    }
    if (line.rfind("Component: ", 0) == 0 && model.component.empty()) model.component = line.substr(11);
    if (std::regex_search(line, m, kCount)) model.count = std::max(1, std::stoi(m[1]));
    if (std::regex_match(line, m, kProp)) {
      PropertySpec spec;
      spec.name = m[1];
      spec.kind = *property_kind_from_string(std::string(m[2]));
      model.properties.push_back(std::move(spec));
      current = &model.properties.back();
      continue;
    }
    if (current == nullptr || line.rfind("  - ", 0) != 0) {
      if (line.rfind("  ", 0) != 0) current = nullptr;
      continue;
    }
    const std::string field = line.substr(4);
    auto value_of = [&](const char* label) -> std::optional<Json> {
      const std::string prefix = std::string(label) + ": ";
      if (field.rfind(prefix, 0) != 0) return std::nullopt;
      Json v = Json::parse(field.substr(prefix.size()), nullptr, false);
      if (v.is_discarded()) return std::nullopt;
      return v;
    };
    if (field == "Required: true") current->required = true;
    if (auto v = value_of("Default value")) current->default_value = *v;
    if (auto v = value_of("Allowed values"); v && v->is_array()) {
      current->allowed_values.assign(v->begin(), v->end());
    }
    if (auto v = value_of("Schema"); v && v->is_array()) {
      std::vector<PropertySpec> fields;
      for (const auto& f : *v) fields.push_back(property_spec_from_json(f));
      current->element_schema = std::move(fields);
    }
  }
  while (!instruction.empty() && instruction.back() == '\n') instruction.pop_back();
  if (instruction != "(none)") model.instruction = instruction;
  return model;
}

class Generator {
 public:
  Generator(std::uint64_t seed, const PromptModel& model) : rng_(seed), model_(model) {}

  Json configuration(std::size_t index) {
    Json props = Json::object();
    std::vector<std::string> highlights;
    for (const auto& spec : model_.properties) {
      const Gap* gap = nullptr;
      if (auto it = model_.gaps.find(spec.name); it != model_.gaps.end()) gap = &it->second;
      std::optional<Json> v;
      if (gap != nullptr && index < gap->values.size()) {
        v = gap->values[index];
      } else {
        v = value_for(spec, spec.name, gap, index);
      }
      if (!v) continue;
      if ((spec.kind == PropertyKind::Categorical || (spec.kind == PropertyKind::Boolean && v->get<bool>())) &&
          highlights.size() < 2) {
        highlights.push_back(spec.kind == PropertyKind::Boolean ? spec.name
                                                                : (v->is_string() ? v->get<std::string>() : v->dump()));
      }
      props[spec.name] = std::move(*v);
    }

    std::string name;
    for (const auto& h : highlights) name += capitalize(h) + " ";
    name += pick(kAdjectives);
    for (int k = 2; used_names_.count(name) != 0; ++k) name += " " + std::to_string(k);
    used_names_.insert(name);

    std::string description = "Shows";
    std::size_t listed = 0;
    for (const auto& [k, v] : props.items()) {
      if (listed == 3) break;
      description += std::string(listed == 0 ? " " : ", ") + k + " " + (v.is_string() ? v.get<std::string>() : v.dump());
      ++listed;
    }
    if (listed == 0) description = "Baseline configuration";
    if (!model_.instruction.empty()) description += " (" + model_.instruction + ")";

    Json config = Json::object();
    config["name"] = name;
    config["description"] = description;
    config["properties"] = std::move(props);
    return config;
  }

 private:
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }

  const std::string& pick(const std::vector<std::string>& list) { return list[below(list.size())]; }

  std::string fresh(const std::string& key, const std::function<std::string()>& make) {
    auto& used = used_values_[key];
    std::string v = make();
    for (int tries = 0; used.count(v) != 0 && tries < 12; ++tries) v = make();
    for (int k = 2; used.count(v) != 0; ++k) v = make() + " " + std::to_string(k);
    used.insert(v);
    return v;
  }

  std::string long_text(const std::string& seed_text) {
    std::string out = seed_text;
    while (out.size() <= 60) out += ". " + pick(kSentences);
    return out;
  }

  std::string string_for(const std::string& name, bool want_long) {
    const std::string n = lower(name);
    if (is_image_like(name)) {
      static const int kWidths[] = {320, 400, 600, 800, 1200};
      static const int kHeights[] = {200, 240, 300, 400, 600};
      return fresh(name, [&] {
        std::string url = "https://placehold.co/" + std::to_string(kWidths[below(5)]) + "x" +
                          std::to_string(kHeights[below(5)]);
        if (want_long) {
          url += "?text=" + pick(kAdjectives);
          while (url.size() <= 60) url += "+" + pick(kWords);
        } else if (below(2) == 0) {
          url += "?text=" + pick(kAdjectives);
        }
        return url;
      });
    }
    if (has(n, {"url", "href", "link", "website"})) {
      return fresh(name, [&] {
        std::string url = "https://www.northwind.shop/" + lower(pick(kAdjectives)) + "-" + pick(kWords);
        if (want_long) {
          while (url.size() <= 60) url += "/" + pick(kWords);
        }
        return url;
      });
    }
    if (has(n, {"email"})) {
      return fresh(name, [&] {
        std::string person = lower(pick(kPeople));
        std::replace(person.begin(), person.end(), ' ', '.');
        person.erase(std::remove(person.begin(), person.end(), '\''), person.end());
        return person + "@example.com";
      });
    }
    if (has(n, {"date", "time", "updated", "created"})) {
      return fresh(name, [&] {
        std::ostringstream os;
        os << "2025-" << (below(12) < 9 ? "0" : "") << (below(12) + 1) << "-" << (10 + below(18));
        return os.str();
      });
    }
    std::function<std::string()> make;
    if (has(n, {"author", "user", "owner", "person", "fullname"}) || n == "name" || n == "username") {
      make = [&] { return pick(kPeople); };
    } else if (has(n, {"city", "location", "place", "country", "region"})) {
      make = [&] { return pick(kCities); };
    } else if (has(n, {"description", "body", "summary", "bio", "message", "content", "text", "subtitle", "note"})) {
      make = [&] { return pick(kSentences); };
    } else {
      make = [&] { return pick(kAdjectives) + " " + pick(kProducts); };
    }
    if (want_long) return fresh(name, [&] { return long_text(make()); });
    return fresh(name, make);
  }

  Json number_for(const std::string& name) {
    const std::string n = lower(name);
    const std::string key = "#" + name;
    auto& used = used_values_[key];
    for (int tries = 0;; ++tries) {
      Json v;
      if (has(n, {"price", "cost", "amount", "total", "fee"})) {
        static const double kCents[] = {0.0, 0.49, 0.95, 0.99};
        v = static_cast<double>(4 + below(296)) + kCents[below(4)];
      } else if (has(n, {"rating", "stars", "score"})) {
        v = static_cast<double>(2 + below(7)) / 2.0;
      } else if (has(n, {"percent", "progress", "ratio"})) {
        v = static_cast<long long>(below(101));
      } else if (has(n, {"temp"})) {
        v = static_cast<long long>(below(49)) - 10;
      } else if (has(n, {"age"})) {
        v = static_cast<long long>(18 + below(63));
      } else {
        v = static_cast<long long>(below(250));
      }
      if (used.insert(v.dump()).second || tries > 12) return v;
    }
  }

  std::optional<Json> value_for(const PropertySpec& spec, const std::string& hint, const Gap* gap, std::size_t index) {
    switch (spec.kind) {
      case PropertyKind::Boolean:
        return Json(below(2) == 0);
      case PropertyKind::Number:
        return number_for(hint);
      case PropertyKind::String:
        return Json(string_for(hint, gap != nullptr && gap->want_long && index == 0));
      case PropertyKind::Categorical:
        if (spec.allowed_values.empty()) return std::nullopt;
        return spec.allowed_values[below(spec.allowed_values.size())];
      case PropertyKind::Object: {
        Json obj = Json::object();
        for (const auto& field : spec.element_schema.value_or(std::vector<PropertySpec>{})) {
          if (auto v = value_for(field, hint + "." + field.name, nullptr, index)) obj[field.name] = std::move(*v);
        }
        return obj;
      }
      case PropertyKind::Array: {
        std::size_t length = 1 + below(6);
        if (gap != nullptr && index < gap->lengths.size()) {
          const int cls = gap->lengths[index];
          length = cls == 0 ? 0 : cls == 1 ? 1 + below(4) : 5 + below(4);
        }
        Json arr = Json::array();
        const PropertySpec* item = spec.element_schema && !spec.element_schema->empty()
                                       ? &spec.element_schema->front()
                                       : nullptr;
        for (std::size_t i = 0; i < length; ++i) {
          if (item == nullptr) {
            arr.push_back(string_for(hint, false));
          } else if (auto v = value_for(*item, hint, nullptr, index + 1)) {
            arr.push_back(std::move(*v));
          }
        }
        return arr;
      }
      case PropertyKind::Function:
        if (!spec.required) return std::nullopt;
        return Json("handle" + capitalize(spec.name));
      case PropertyKind::Node:
        if (!spec.required) return std::nullopt;
        return Json(pick(kAdjectives) + " " + pick(kProducts));
    }
    return std::nullopt;
  }

  std::mt19937_64 rng_;
  const PromptModel& model_;
  std::map<std::string, std::set<std::string>> used_values_;
  std::set<std::string> used_names_;
};

}  // namespace

std::string StubBackend::complete(const std::string& system_prompt, const std::string& user_message,
                                  bool /*json_mode*/) {
  const PromptModel model = read_prompt(system_prompt);
  Generator gen(seed_ ^ fnv1a(system_prompt + "\x1e" + user_message), model);
  Json list = Json::array();
  for (int i = 0; i < model.count; ++i) list.push_back(gen.configuration(static_cast<std::size_t>(i)));
  Json reply = Json::object();
  reply["configurations"] = std::move(list);
  return reply.dump();
}

}  // namespace facet
