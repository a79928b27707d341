#include <doctest.h>

#include <cmath>

#include "facet/coverage.hpp"
#include "facet/errors.hpp"
#include "facet/impact.hpp"
#include "support.hpp"

using namespace facet;

namespace {

PropertySpec spec(const std::string& name, PropertyKind kind) {
  PropertySpec p;
  p.name = name;
  p.kind = kind;
  return p;
}

VariationConfig variation(const std::string& name, Json assignments) {
  return {name, "", std::move(assignments)};
}

bool has(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

TEST_SUITE("coverage") {
  TEST_CASE("categorical one of two") {
    auto variant = spec("variant", PropertyKind::Categorical);
    variant.allowed_values = {"summary", "detailed"};
    const auto e = coverage_entry(variant, {"summary", "summary"});
    CHECK(e.ratio == doctest::Approx(0.5));
    CHECK(e.missing == std::vector<std::string>{"value \"detailed\" unobserved"});
  }

  TEST_CASE("boolean second value implied by the default") {
    const auto a = analyze_component(test::product_card(), "ProductCard.tsx");
    const std::vector<VariationConfig> vs = {
        variation("A", {{"title", "Mug"}, {"price", 12}, {"showBadge", true}}),
        variation("B", {{"title", "Cup"}, {"price", 9}}),
    };
    const auto report = coverage(a.schema, a.impacts, vs);
    REQUIRE(report.find("showBadge") != nullptr);
    CHECK(report.find("showBadge")->ratio == doctest::Approx(1.0));
    CHECK(report.find("variant")->ratio == doctest::Approx(0.5));
  }

  TEST_CASE("string distinct values and the long class") {
    const auto s = spec("title", PropertyKind::String);
    const std::string long_text(51, 'x');
    CHECK(coverage_entry(s, {"a", "b", long_text}).ratio == doctest::Approx(1.0));
    CHECK(coverage_entry(s, {"a", "b", "c"}).ratio == doctest::Approx(0.5));
    CHECK(coverage_entry(s, {std::string(50, 'y')}).ratio == doctest::Approx(1.0 / 6.0));
    const auto e = coverage_entry(s, {"a"});
    CHECK(has(e.missing, "2 more distinct values needed"));
    CHECK(has(e.missing, "no string > 50 chars"));
  }

  TEST_CASE("numbers") {
    const auto n = spec("price", PropertyKind::Number);
    CHECK(std::abs(coverage_entry(n, {12, 30}).ratio - 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(coverage_entry(n, {12, 12.0, 30}).ratio - 2.0 / 3.0) < 1e-9);
    CHECK(coverage_entry(n, {1, 2, 3, 4}).ratio == doctest::Approx(1.0));
  }

  TEST_CASE("arrays and nested objects") {
    auto field_a = spec("label", PropertyKind::String);
    auto field_b = spec("on", PropertyKind::Boolean);
    auto item = spec("item", PropertyKind::Object);
    item.element_schema = std::vector<PropertySpec>{field_a, field_b};
    auto rows = spec("rows", PropertyKind::Array);
    rows.element_schema = std::vector<PropertySpec>{item};

    const Json one = Json::array({{{"label", "a"}, {"on", true}}});
    const auto e = coverage_entry(rows, {Json::array(), one});
    CHECK(has(e.observed_classes, "length-0"));
    CHECK(has(e.observed_classes, "length-1-4"));
    CHECK(has(e.missing, "length class 5+ unobserved"));
    REQUIRE(e.children.size() == 1);
    CHECK(e.children[0].property == "rows[]");
    REQUIRE(e.children[0].children.size() == 2);
    CHECK(e.children[0].children[1].property == "rows[].on");
    CHECK(has(e.missing, "rows[]: rows[].on: value false unobserved"));
    CHECK(e.ratio > 0.0);
    CHECK(e.ratio < 1.0);
  }

  TEST_CASE("invalid categorical values are their own class") {
    auto theme = spec("theme", PropertyKind::Categorical);
    theme.allowed_values = {"light", "dark"};
    const auto classes = EquivalenceClassifier::observed(theme, {"light", "neon"});
    CHECK(has(classes, EquivalenceClassifier::kInvalid));
    CHECK(coverage_entry(theme, {"light", "neon"}).ratio == doctest::Approx(0.5));
  }

  TEST_CASE("fresh set has zero coverage") {
    const auto a = analyze_component(test::product_card(), "ProductCard.tsx");
    const auto report = coverage(a.schema, a.impacts, {});
    for (const auto& e : report.entries) CHECK(e.ratio == 0.0);
    CHECK(report.aggregate == 0.0);
    CHECK_FALSE(report.fully_covered);
  }

  TEST_CASE("unknown properties are rejected") {
    const auto a = analyze_component(test::product_card(), "ProductCard.tsx");
    CHECK_THROWS_AS(coverage(a.schema, a.impacts, {variation("X", {{"colour", "red"}})}), UnknownProperty);
  }

  TEST_CASE("entries follow impact order and aggregate uses impactful props") {
    const auto a = analyze_component(test::product_card(), "ProductCard.tsx");
    const std::vector<VariationConfig> vs = {
        variation("A", {{"variant", "detailed"}, {"title", "Mug"}, {"price", 12}, {"imageUrl", "https://placehold.co/1"}}),
    };
    const auto report = coverage(a.schema, a.impacts, vs);
    REQUIRE(report.entries.size() == 7);
    CHECK(report.entries[0].property == "variant");
    CHECK(report.entries.back().property == "borderStyle");
    double sum = 0.0;
    for (const char* p : {"variant", "imageUrl", "showBadge"}) sum += report.find(p)->ratio;
    CHECK(report.aggregate == doctest::Approx(sum / 3.0));
  }

  TEST_CASE("gap instructions") {
    const auto a = analyze_component(test::product_card(), "ProductCard.tsx");
    const auto report = coverage(a.schema, a.impacts, {variation("A", {{"title", "Mug"}, {"price", 12}})});
    const std::string gaps = render_gap_instructions(report, a.impacts);
    CHECK(gaps.find("- Property \"variant\": generate at least one variation with value \"detailed\"\n") !=
          std::string::npos);
    CHECK(gaps.find("- Property \"showBadge\": generate at least one variation with value true\n") != std::string::npos);
    CHECK(gaps.find("- Property \"title\": include at least one value longer than 50 characters\n") !=
          std::string::npos);
    CHECK(gaps.find("variant") < gaps.find("theme"));
    CHECK(render_gap_instructions(CoverageReport{}, {}).empty());
  }

  TEST_CASE("story source extraction") {
    const auto stories = extract_from_story_source(R"(
      import type { Meta, StoryObj } from "@storybook/react";
      import { action } from "@storybook/addon-actions";
      import { ProductCard } from "./ProductCard";

      const meta = { title: "Shop/ProductCard", component: ProductCard } satisfies Meta<typeof ProductCard>;
      export default meta;
      type Story = StoryObj<typeof meta>;

      export const Detailed: Story = {
        name: "Detailed mug",
        parameters: { docs: { description: { story: "A detailed card" } } },
        args: { variant: "detailed", title: "Mug", price: 12.5, showBadge: true, onBuy: action("buy") },
      };

      export const Plain = { args: { title: "Cup", price: -3 } };

      export const Computed = Template.bind({});
      Computed.args = { title: `Tea`, price: 1 + 2 };
    )");
    CHECK(stories.component == "ProductCard");
    REQUIRE(stories.variations.size() == 3);
    CHECK(stories.variations[0].name == "Detailed mug");
    CHECK(stories.variations[0].description == "A detailed card");
    CHECK(stories.variations[0].assignments["price"] == 12.5);
    CHECK(stories.variations[0].assignments["onBuy"] == "buy");
    CHECK(stories.variations[1].name == "Plain");
    CHECK(stories.variations[1].assignments["price"] == -3);
    CHECK(stories.variations[2].assignments["title"] == "Tea");
    CHECK_FALSE(stories.warnings.empty());
  }

  TEST_CASE("non-story files") {
    CHECK_THROWS_AS(extract_from_story_source("export const x = 1;"), NotAStoryFile);
    CHECK_THROWS_AS(extract_from_story_source("export default {"), SyntaxError);
  }
}
