#include <doctest.h>

#include <deque>
#include <set>

#include "facet/coverage.hpp"
#include "facet/errors.hpp"
#include "facet/impact.hpp"
#include "facet/sampler.hpp"
#include "facet/stub_backend.hpp"
#include "support.hpp"

using namespace facet;

namespace {

class ScriptedBackend : public SamplerBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

  std::string complete(const std::string& system_prompt, const std::string& user_message, bool json_mode) override {
    systems.push_back(system_prompt);
    users.push_back(user_message);
    CHECK(json_mode);
    if (replies_.empty()) return "{\"configurations\": []}";
    std::string next = replies_.front();
    replies_.pop_front();
    return next;
  }

  std::vector<std::string> systems;
  std::vector<std::string> users;

 private:
  std::deque<std::string> replies_;
};

const ComponentAnalysis& product_card() {
  static const ComponentAnalysis a = analyze_component(test::product_card(), "ProductCard.tsx");
  return a;
}

SamplingRequest request(int count) {
  SamplingRequest req;
  req.schema = product_card().schema;
  req.impacts = product_card().impacts;
  req.count = count;
  return req;
}

std::string wrap(const Json& configs) { return Json{{"configurations", configs}}.dump(); }

Json good(const std::string& name, const std::string& variant, bool badge) {
  return {{"name", name},
          {"description", "d"},
          {"properties",
           {{"variant", variant}, {"title", "Ceramic Mug"}, {"price", 24}, {"imageUrl", "https://placehold.co/600x400"},
            {"showBadge", badge}}}};
}

Json with_property(Json config, const std::string& key, Json value) {
  config["properties"][key] = std::move(value);
  return config;
}

Json without_property(Json config, const std::string& key) {
  config["properties"].erase(key);
  return config;
}

bool mentions(const std::vector<std::string>& reasons, const std::string& text) {
  for (const auto& r : reasons) {
    if (r.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("template is embedded byte for byte") {
    CHECK(std::string(prompt_template()) == test::fixture("templates/sampler_prompt.md"));
  }

  TEST_CASE("blanked slots reproduce the template") {
    std::map<std::string, std::string> identity;
    for (const auto& slot : prompt_slots()) identity[slot] = "{" + slot + "}";
    CHECK(render_prompt(prompt_template(), identity) == std::string(prompt_template()));
    for (const auto& slot : prompt_slots()) {
      CHECK_MESSAGE(prompt_template().find("{" + slot + "}") != std::string_view::npos, slot);
    }
  }

  TEST_CASE("built prompt is the template with slots filled") {
    SamplingRequest req = request(4);
    req.user_instruction = "Arabic notifications with images";
    const std::string prompt = build_prompt(req);

    CHECK(test::template_mismatch(prompt) == "");

    CHECK(prompt.find("Component: ProductCard\n") != std::string::npos);
    CHECK(prompt.find("Has Children: false\n") != std::string::npos);
    CHECK(prompt.find("(where N = 4)") != std::string::npos);
    CHECK(prompt.find("https://placehold.co/{width}x{height}") != std::string::npos);
    CHECK(prompt.find("**User Instructions**\nArabic notifications with images") != std::string::npos);
    CHECK(prompt.find("**Coverage Requirements**\n(none)\n") != std::string::npos);
  }

  TEST_CASE("properties are grouped by impact level") {
    const std::string prompt = build_prompt(request(4));
    const auto high = prompt.find("- variant (categorical)");
    const auto badge = prompt.find("- showBadge (boolean)");
    const auto image = prompt.find("- imageUrl (string)");
    const auto title = prompt.find("- title (string)");
    const auto theme = prompt.find("- theme (categorical)");
    REQUIRE(high != std::string::npos);
    REQUIRE(title != std::string::npos);
    REQUIRE(theme != std::string::npos);
    CHECK(badge < title);
    CHECK(image < title);
    CHECK(title < theme);
    CHECK(prompt.find("  - Allowed values: [\"summary\",\"detailed\"]") != std::string::npos);
    CHECK(prompt.find("  - Default value: \"summary\"") != std::string::npos);
    CHECK(prompt.find("    - Structure: `") != std::string::npos);
  }

  TEST_CASE("property block") {
    const auto& a = product_card();
    const std::string block = render_property_block(*a.schema.find("title"), a.impact_of("title"));
    CHECK(block.rfind("- title (string)\n  - Required: true\n", 0) == 0);
    CHECK(block.find("  - Usage Examples:\n    - Content: `") != std::string::npos);
  }

  TEST_CASE("validate_config accepts and coerces") {
    const auto& schema = product_card().schema;
    const auto ok = validate_config(schema, good("Mug", "detailed", true));
    REQUIRE(ok.config.has_value());
    CHECK(ok.violations.empty());

    Json coerced = good("Mug", "detailed", true);
    coerced["properties"]["price"] = "24.5";
    coerced["properties"]["showBadge"] = "false";
    coerced["properties"]["sparkle"] = true;
    const auto c = validate_config(schema, coerced);
    REQUIRE(c.config.has_value());
    CHECK(c.config->assignments["price"] == 24.5);
    CHECK(c.config->assignments["showBadge"] == false);
    CHECK_FALSE(c.config->assignments.contains("sparkle"));
    CHECK(mentions(c.warnings, "sparkle: unknown property dropped"));
  }

  TEST_CASE("documented violations") {
    const auto& schema = product_card().schema;
    CHECK(validate_config(schema, without_property(good("A", "summary", false), "title")).violations ==
          std::vector<std::string>{"title: required, no default"});
    CHECK(validate_config(schema, with_property(good("A", "summary", false), "variant", "fancy")).violations ==
          std::vector<std::string>{"variant: not in allowed values"});
    CHECK(validate_config(schema, with_property(good("A", "summary", false), "price", "cheap")).violations ==
          std::vector<std::string>{"price: expected number"});
  }

  TEST_CASE("urls") {
    CHECK(is_image_like("imageUrl"));
    CHECK(is_image_like("avatarSrc"));
    CHECK_FALSE(is_image_like("title"));
    CHECK(is_well_formed_url("https://placehold.co/600x400"));
    CHECK(is_well_formed_url("http://localhost:8080/a.png"));
    CHECK_FALSE(is_well_formed_url("placehold.co/600x400"));
    CHECK_FALSE(is_well_formed_url("https://exa mple.com"));
    CHECK_FALSE(is_well_formed_url("https://"));
  }

  TEST_CASE("malformed response corpus") {
    const auto corpus = test::malformed_corpus();
    REQUIRE(corpus.size() == 19);

    for (const auto& c : corpus) {
      CAPTURE(c.label);
      // The same broken config comes back from the repair round.
      ScriptedBackend backend({wrap(Json::array({c.config})), wrap(Json::array({c.config}))});
      const auto outcome = sample(request(1), backend);
      CHECK(outcome.accepted.empty());
      REQUIRE(outcome.rejected.size() == 1);
      CHECK(mentions(outcome.rejected[0].reasons, c.reason));
      CHECK(backend.users.size() == 2);
      CHECK(backend.users[1].find("Violations:") != std::string::npos);
    }

    // The twentieth entry: a duplicate of an existing variation.
    SamplingRequest req = request(1);
    req.existing.push_back(*validate_config(req.schema, good("Existing", "detailed", true)).config);
    Json dup = good("Copy", "detailed", true);
    dup["properties"]["title"] = "Another title";  // title is not impactful
    ScriptedBackend backend({wrap(Json::array({dup}))});
    const auto outcome = sample(req, backend);
    CHECK(outcome.accepted.empty());
    REQUIRE(outcome.rejected.size() == 1);
    CHECK(outcome.rejected[0].reasons == std::vector<std::string>{"not distinct from existing variation 'Existing'"});
  }

  TEST_CASE("no invalid config is ever accepted") {
    const auto& schema = product_card().schema;
    const Json base = good("Base", "detailed", true);
    Json mixed = Json::array({base, with_property(good("B", "summary", false), "price", "cheap"),
                              without_property(good("C", "summary", true), "title"), good("D", "summary", true)});
    ScriptedBackend backend({wrap(mixed), wrap(Json::array({with_property(good("B", "summary", false), "price", 9)}))});
    const auto outcome = sample(request(4), backend);
    for (const auto& v : outcome.accepted) {
      Json raw = {{"name", v.name}, {"description", v.description}, {"properties", v.assignments}};
      CHECK(validate_config(schema, raw).violations.empty());
    }
    CHECK(outcome.repaired_count == 1);
    CHECK(outcome.accepted.size() == 3);
    REQUIRE(outcome.rejected.size() == 1);
    CHECK(mentions(outcome.rejected[0].reasons, "title: required, no default"));
  }

  TEST_CASE("duplicates within one response") {
    ScriptedBackend backend({wrap(Json::array({good("First", "detailed", true), good("Second", "detailed", true)}))});
    const auto outcome = sample(request(2), backend);
    CHECK(outcome.accepted.size() == 1);
    REQUIRE(outcome.rejected.size() == 1);
    CHECK(outcome.rejected[0].reasons[0] == "not distinct from existing variation 'First'");
  }

  TEST_CASE("names are made unique") {
    ScriptedBackend backend({wrap(Json::array({good("Mug", "detailed", true), good("Mug", "summary", true)}))});
    const auto outcome = sample(request(2), backend);
    REQUIRE(outcome.accepted.size() == 2);
    CHECK(outcome.accepted[0].name == "Mug");
    CHECK(outcome.accepted[1].name == "Mug 2");
  }

  TEST_CASE("malformed output gets one re-ask") {
    ScriptedBackend recovers({"Sure! Here you go", wrap(Json::array({good("A", "detailed", true)}))});
    CHECK(sample(request(1), recovers).accepted.size() == 1);
    CHECK(recovers.users.size() == 2);

    ScriptedBackend hopeless({"not json", "still not json"});
    CHECK_THROWS_AS(sample(request(1), hopeless), MalformedResponse);
  }

  TEST_CASE("response shapes") {
    CHECK(parse_candidates("[{\"properties\": {}}]").size() == 1);
    CHECK(parse_candidates("```json\n{\"configurations\": [{}, {}]}\n```").size() == 2);
    CHECK(parse_candidates("{\"name\": \"x\", \"properties\": {}}").size() == 1);
    CHECK_THROWS_AS(parse_candidates("{\"answer\": 42}"), MalformedResponse);
    CHECK_THROWS_AS(parse_candidates(""), MalformedResponse);
  }

  TEST_CASE("extra configurations are truncated") {
    ScriptedBackend backend({wrap(Json::array({good("A", "detailed", true), good("B", "summary", true)}))});
    const auto outcome = sample(request(1), backend);
    CHECK(outcome.accepted.size() == 1);
    CHECK_FALSE(outcome.warnings.empty());
  }

  TEST_CASE("count must be positive") {
    ScriptedBackend backend({});
    CHECK_THROWS_AS(sample(request(0), backend), Error);
  }

  TEST_CASE("signatures use impactful properties only") {
    const auto& a = product_card();
    const VariationConfig x{"x", "", {{"variant", "detailed"}, {"title", "A"}, {"price", 1}, {"showBadge", true}}};
    VariationConfig y = x;
    y.assignments["title"] = "B";
    y.assignments["theme"] = "dark";
    CHECK(distinctness_signature(a.schema, a.impacts, x) == distinctness_signature(a.schema, a.impacts, y));
    y.assignments["showBadge"] = false;
    CHECK(distinctness_signature(a.schema, a.impacts, x) != distinctness_signature(a.schema, a.impacts, y));
  }

  TEST_CASE("stub backend is deterministic and honours gaps") {
    SamplingRequest req = request(4);
    req.coverage_gaps = "- Property \"variant\": generate at least one variation with value \"detailed\"\n";
    const std::string system = build_prompt(req);
    const std::string user = build_user_message(req);
    StubBackend a(1);
    StubBackend b(1);
    const std::string first = a.complete(system, user, true);
    CHECK(first == b.complete(system, user, true));
    CHECK(first != StubBackend(2).complete(system, user, true));
    const auto configs = parse_candidates(first);
    REQUIRE(configs.size() == 4);
    CHECK(configs[0]["properties"]["variant"] == "detailed");
  }

  TEST_CASE("stub sampling yields distinct valid configs") {
    StubBackend stub(1);
    const auto outcome = sample(request(4), stub);
    CHECK(outcome.accepted.size() == 4);
    CHECK(outcome.rejected.empty());
    std::set<std::string> sigs;
    for (const auto& v : outcome.accepted) {
      sigs.insert(distinctness_signature(product_card().schema, product_card().impacts, v));
    }
    CHECK(sigs.size() == 4);
  }

  TEST_CASE("gap closure with the stub") {
    const auto& a = product_card();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(seed);
      std::vector<VariationConfig> all;
      double previous = coverage(a.schema, a.impacts, all).aggregate;
      int rounds = 0;
      bool closed = false;
      while (rounds < 2 && !closed) {
        SamplingRequest req = request(4);
        req.existing = all;
        req.coverage_gaps = render_gap_instructions(coverage(a.schema, a.impacts, all), a.impacts);
        StubBackend stub(seed + static_cast<std::uint64_t>(rounds));
        const auto outcome = sample(req, stub);
        all.insert(all.end(), outcome.accepted.begin(), outcome.accepted.end());
        ++rounds;
        const auto report = coverage(a.schema, a.impacts, all);
        CHECK(report.aggregate > previous);
        previous = report.aggregate;
        closed = true;
        for (const auto& e : report.entries) {
          if (e.kind == PropertyKind::Categorical || e.kind == PropertyKind::Boolean) closed = closed && e.ratio >= 1.0;
        }
        if (closed) CHECK(report.aggregate == doctest::Approx(1.0));
      }
      CHECK(closed);
    }
  }
}
