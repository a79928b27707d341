#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "facet/impact.hpp"
#include "facet/sampler.hpp"

namespace facet::test {

std::string source_path(const std::string& relative) { return std::string(FACET_SOURCE_DIR) + "/" + relative; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& relative) { return read_text(source_path(relative)); }

std::string product_card() { return fixture("fixtures/components/ProductCard.tsx"); }

Json response_schema(const std::string& definition) {
  Json root = Json::parse(fixture("schemas/facet.schema.json"));
  root["$ref"] = "#/$defs/" + definition;
  return root;
}

CorpusResult evaluate_corpus() {
  namespace fs = std::filesystem;
  CorpusResult r;
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(source_path("fixtures/corpus"))) {
    if (entry.path().extension() == ".tsx") sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());
  for (const auto& src : sources) {
    fs::path labels_path = src;
    labels_path.replace_extension(".labels.json");
    if (!fs::exists(labels_path)) {
      r.problems.push_back(src.filename().string() + ": no labels");
      continue;
    }
    const Json labels = Json::parse(read_text(labels_path.string()));
    const auto analysis = analyze_component(read_text(src.string()), src.filename().string());
    ++r.components;
    if (labels.value("component", std::string()) != analysis.schema.component_name) {
      r.problems.push_back(src.filename().string() + ": component name mismatch");
    }
    for (const auto& spec : analysis.schema.properties) {
      if (is_sampled_kind(spec.kind) && !labels["labels"].contains(spec.name)) {
        r.problems.push_back(analysis.schema.component_name + "." + spec.name + ": unlabeled");
      }
    }
    for (const auto& [property, label] : labels["labels"].items()) {
      const ImpactScore* score = analysis.impact_of(property);
      if (score == nullptr) {
        r.problems.push_back(analysis.schema.component_name + "." + property + ": not a scored property");
        continue;
      }
      ++r.properties;
      const std::string predicted(to_string(score->level));
      const std::string expected = label.get<std::string>();
      if (predicted == expected) {
        ++r.matches;
        continue;
      }
      if ((predicted == "High" && expected == "Low") || (predicted == "Low" && expected == "High")) ++r.extremes;
      r.misses.push_back({analysis.schema.component_name, property, expected, predicted});
    }
  }
  return r;
}

ComponentSchema mixed_schema() {
  return analyze_component(R"(
    type Row = { label: string; score: number };
    type P = {
      flag?: boolean;
      size: number;
      text: string;
      tone?: "calm" | "loud" | "quiet";
      meta?: { author: string; pinned: boolean };
      rows?: Row[];
      tags?: string[];
      onPick?: (id: string) => void;
    };
    export const Mixed = ({ flag, size, text, tone, meta, rows, tags, onPick }: P) => (
      <div className={tone} onClick={onPick}>{flag && text}{size}{meta?.author}{rows?.length}{tags}</div>
    );
  )", "Mixed.tsx").schema;
}

namespace {

class Gen {
 public:
  explicit Gen(std::mt19937_64& rng) : rng_(rng) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 1; }

  std::string text() {
    static const std::vector<std::string> pieces = {
        "Mug", "ceramic", "\"quoted\"", "back\\slash", "line\nbreak", "tab\t", "naïve", "東京", "emoji 🌧",
        "</script>", "*/", "${x}", "`tick`", "'single'", "", " ", "O'Brien", " sep"};
    std::string out;
    const int n = pick(4);
    for (int i = 0; i <= n; ++i) {
      if (i > 0) out += " ";
      out += pieces[static_cast<std::size_t>(pick(static_cast<int>(pieces.size())))];
    }
    return out;
  }

  Json number() {
    switch (pick(4)) {
      case 0: return pick(2000) - 1000;
      case 1: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
      case 2: return 0.1 * pick(100);
      default: return 1e21 * (pick(5) + 1);
    }
  }

  Json value(const PropertySpec& spec) {
    switch (spec.kind) {
      case PropertyKind::Boolean: return coin();
      case PropertyKind::Number: return number();
      case PropertyKind::String: return text();
      case PropertyKind::Categorical:
        return spec.allowed_values[static_cast<std::size_t>(pick(static_cast<int>(spec.allowed_values.size())))];
      case PropertyKind::Function: return "pick " + std::to_string(pick(9));
      case PropertyKind::Object: {
        Json o = Json::object();
        for (const auto& f : spec.element_schema.value_or(std::vector<PropertySpec>{})) {
          if (coin() || f.required) o[f.name] = value(f);
        }
        return o;
      }
      case PropertyKind::Array: {
        Json a = Json::array();
        const int n = pick(6);
        for (int i = 0; i < n; ++i) {
          if (spec.element_schema && !spec.element_schema->empty()) {
            a.push_back(value(spec.element_schema->front()));
          } else {
            a.push_back(text());
          }
        }
        return a;
      }
      default: return nullptr;
    }
  }

 private:
  std::mt19937_64& rng_;
};

}  // namespace

std::vector<VariationConfig> random_variations(const ComponentSchema& schema, std::mt19937_64& rng) {
  Gen gen(rng);
  std::vector<VariationConfig> out;
  const int n = gen.pick(5) + 1;
  for (int i = 0; i < n; ++i) {
    VariationConfig v;
    v.name = "Case " + std::to_string(i);
    if (gen.coin()) v.name += " " + gen.text();
    v.description = gen.coin() ? gen.text() : "";
    for (const auto& p : schema.properties) {
      if (p.kind == PropertyKind::Node) continue;
      if (p.required || gen.coin()) v.assignments[p.name] = gen.value(p);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string template_mismatch(const std::string& prompt) {
  const std::string tmpl(prompt_template());
  std::size_t t = 0;
  std::size_t p = 0;
  while (true) {
    std::size_t next_slot = std::string::npos;
    std::size_t slot_len = 0;
    for (const auto& slot : prompt_slots()) {
      const auto at = tmpl.find("{" + slot + "}", t);
      if (at < next_slot) {
        next_slot = at;
        slot_len = slot.size() + 2;
      }
    }
    const std::string literal = tmpl.substr(t, next_slot == std::string::npos ? std::string::npos : next_slot - t);
    if (next_slot == std::string::npos) {
      // The tail must close the prompt exactly.
      if (prompt.size() < literal.size() || prompt.compare(prompt.size() - literal.size(), literal.size(), literal) != 0 ||
          prompt.size() - literal.size() < p) {
        return "template tail does not end the prompt";
      }
      return {};
    }
    const auto found = prompt.find(literal, p);
    if (found == std::string::npos || (t == 0 && found != 0)) return "missing template text: " + literal.substr(0, 60);
    p = found + literal.size();
    t = next_slot + slot_len;
  }
}

Json valid_product_config(const std::string& name, const std::string& variant, bool badge) {
  return {{"name", name},
          {"description", "d"},
          {"properties",
           {{"variant", variant}, {"title", "Ceramic Mug"}, {"price", 24}, {"imageUrl", "https://placehold.co/600x400"},
            {"showBadge", badge}}}};
}

std::vector<MalformedCase> malformed_corpus() {
  const Json base = valid_product_config("Base", "detailed", true);
  auto with = [&](const std::string& key, Json value) {
    Json c = base;
    c["properties"][key] = std::move(value);
    return c;
  };
  auto without = [&](const std::string& key) {
    Json c = base;
    c["properties"].erase(key);
    return c;
  };
  return {
      {"wrong number", with("price", "cheap"), "price: expected number"},
      {"number as array", with("price", Json::array()), "price: expected number"},
      {"boolean as word", with("showBadge", "yes"), "showBadge: expected boolean"},
      {"boolean as integer", with("showBadge", 1), "showBadge: expected boolean"},
      {"string as number", with("title", 42), "title: expected string"},
      {"string as object", with("title", Json::object()), "title: expected string"},
      {"missing required title", without("title"), "title: required, no default"},
      {"missing required price", without("price"), "price: required, no default"},
      {"out of enum variant", with("variant", "fancy"), "variant: not in allowed values"},
      {"out of enum theme", with("theme", 3), "theme: not in allowed values"},
      {"out of enum border", with("borderStyle", "dotted"), "borderStyle: not in allowed values"},
      {"enum case mismatch", with("variant", "Detailed"), "variant: not in allowed values"},
      {"relative image", with("imageUrl", "cat.png"), "imageUrl: expected an image URL"},
      {"ftp image", with("imageUrl", "ftp://files.example.com/a.png"), "imageUrl: expected an image URL"},
      {"image as number", with("imageUrl", 600), "imageUrl: expected string"},
      {"properties as array", Json{{"name", "X"}, {"properties", Json::array({1})}}, "properties: expected object"},
      {"configuration as string", Json("variant=detailed"), "configuration: expected object"},
      {"name as number", Json{{"name", 5}, {"properties", base["properties"]}}, "name: expected string"},
      {"description as number", Json{{"name", "X"}, {"description", 7}, {"properties", base["properties"]}},
       "description: expected string"},
  };
}

std::string analyze_body(const std::string& source, const std::string& filename) {
  return Json{{"source", source}, {"filename", filename}}.dump();
}

std::vector<Exchange> documented_sequence() {
  const std::string card = product_card();
  return {
      {"POST", "/api/analyze", {}, analyze_body(card, "ProductCard.tsx"), 200, "analyze_response"},
      {"POST", "/api/analyze", {}, analyze_body("export const Broken = () => <div>;", "Broken.tsx"), 400, "error_response"},
      {"POST", "/api/analyze", {}, "", 400, "error_response"},
      {"GET", "/api/coverage", {{"component", "ProductCard"}}, "", 200, "coverage_report"},
      {"POST", "/api/generate", {}, R"({"component": "ProductCard", "count": 4})", 200, "generate_response"},
      {"POST", "/api/generate", {}, R"({"component": "ProductCard", "count": 2, "instruction": "searchable and selectable"})",
       200, "generate_response"},
      {"POST", "/api/generate", {}, R"({"component": "Nope", "count": 4})", 404, "error_response"},
      {"GET", "/api/coverage", {{"component", "ProductCard"}}, "", 200, "coverage_report"},
      {"GET", "/api/coverage", {{"component", "Nope"}}, "", 404, "error_response"},
      {"GET", "/api/variations/ProductCard", {}, "", 200, "variations_document"},
      {"GET", "/api/stories/ProductCard", {}, "", 200, "stories_response"},
  };
}

}  // namespace facet::test
