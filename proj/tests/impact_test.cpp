#include <doctest.h>

#include <cmath>
#include <random>

#include "facet/impact.hpp"
#include "support.hpp"

using namespace facet;

namespace {

// Independent form of the score: B * (2 - e^(-n/10)) = B * (1 - expm1(-n/10)).
double oracle(double base, std::size_t n) { return base * (1.0 - std::expm1(-static_cast<double>(n) / 10.0)); }

ViContextKind max_kind(const ImpactScore& s) {
  ViContextKind best = ViContextKind::Styling;
  for (const auto& o : s.occurrences) best = std::max(best, o.kind);
  return best;
}

ComponentAnalysis analyze(const std::string& source) { return analyze_component(source, "C.tsx"); }

ViContextOccurrence occ(const std::string& prop, ViContextKind kind, std::size_t at) {
  return {prop, kind, {at, at + 1}, "x"};
}

}  // namespace

TEST_SUITE("impact") {
  TEST_CASE("product card contexts") {
    const auto a = analyze(test::product_card());
    const std::map<std::string, ViContextKind> expected = {
        {"variant", ViContextKind::Structure}, {"showBadge", ViContextKind::Structure},
        {"imageUrl", ViContextKind::Structure}, {"title", ViContextKind::Content},
        {"price", ViContextKind::Content},     {"theme", ViContextKind::Styling},
        {"borderStyle", ViContextKind::Styling}};
    for (const auto& [name, kind] : expected) {
      const ImpactScore* s = a.impact_of(name);
      REQUIRE(s != nullptr);
      CHECK_MESSAGE(max_kind(*s) == kind, name);
    }
    CHECK(a.impact_of("variant")->n == 2);
    CHECK(a.impact_of("title")->n == 2);
    CHECK(a.impact_of("imageUrl")->n == 2);
    CHECK(a.impact_of("price")->n == 1);
  }

  TEST_CASE("product card scores match the formula") {
    const auto a = analyze(test::product_card());
    for (const auto& s : a.impacts) {
      CHECK(s.impact == doctest::Approx(oracle(s.base, s.n)).epsilon(1e-12));
    }
    CHECK(std::abs(a.impact_of("showBadge")->impact - 109.5162582) < 1e-6);
    CHECK(std::abs(a.impact_of("variant")->impact - 118.1269247) < 1e-6);
    CHECK(std::abs(a.impact_of("price")->impact - 87.6130066) < 1e-6);
    CHECK(std::abs(a.impact_of("theme")->impact - 65.7097549) < 1e-6);
    CHECK(a.impact_of("title")->level == ImpactLevel::Medium);
    CHECK(a.impact_of("theme")->level == ImpactLevel::Low);
    const auto impactful = a.impactful_properties();
    CHECK(std::set<std::string>(impactful.begin(), impactful.end()) ==
          std::set<std::string>{"variant", "showBadge", "imageUrl"});
  }

  TEST_CASE("impacts are sorted descending") {
    const auto a = analyze(test::product_card());
    for (std::size_t i = 1; i < a.impacts.size(); ++i) CHECK(a.impacts[i - 1].impact >= a.impacts[i].impact);
  }

  TEST_CASE("threshold algebra") {
    auto first_impactful = [](double base) {
      for (std::size_t n = 1; n <= 12; ++n) {
        if (base * frequency_coefficient(n) >= kImpactfulThreshold) return n;
      }
      return std::size_t{0};
    };
    CHECK(first_impactful(100) == 1);
    CHECK(first_impactful(80) == 3);
    CHECK(first_impactful(60) == 11);
  }

  TEST_CASE("levels at the boundaries") {
    CHECK(impact_level(100.0) == ImpactLevel::High);
    CHECK(impact_level(99.999) == ImpactLevel::Medium);
    CHECK(impact_level(80.0) == ImpactLevel::Medium);
    CHECK(impact_level(79.999) == ImpactLevel::Low);
  }

  TEST_CASE("no occurrences scores zero") {
    const auto s = score_property("p", {});
    CHECK(s.n == 0);
    CHECK(s.impact == 0.0);
    CHECK(s.level == ImpactLevel::Low);
    CHECK_FALSE(s.impactful);
  }

  TEST_CASE("formula properties over random occurrence sets") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> size(1, 40);
    for (int trial = 0; trial < 1500; ++trial) {
      std::vector<ViContextOccurrence> occurrences;
      const int count = size(rng);
      double previous = 0.0;
      for (int i = 0; i < count; ++i) {
        occurrences.push_back(occ("p", static_cast<ViContextKind>(kind(rng)), static_cast<std::size_t>(i) * 3));
        const auto s = score_property("p", occurrences);
        REQUIRE(s.impact >= s.base);
        REQUIRE(s.impact < 2.0 * s.base);
        REQUIRE(s.impact >= previous);
        REQUIRE(s.impact == doctest::Approx(oracle(s.base, s.n)).epsilon(1e-12));
        previous = s.impact;
      }
    }
  }

  TEST_CASE("analysis is deterministic") {
    const std::string src = test::product_card();
    const auto a = analyze(src);
    for (int i = 0; i < 5; ++i) {
      const auto b = analyze(src);
      CHECK(a.schema == b.schema);
      CHECK(a.impacts == b.impacts);
    }
  }

  TEST_CASE("derived locals and render helpers") {
    const auto a = analyze(R"(
      type P = { items: string[]; compact?: boolean; accent?: string; caption?: string };
      export function List({ items, compact = false, accent = "blue", caption }: P) {
        const cls = compact ? "list list-compact" : "list";
        const renderCaption = () => <figcaption>{caption}</figcaption>;
        return (
          <ul className={cls} style={{ color: accent }}>
            {items.map((i) => <li key={i}>{i}</li>)}
            {caption && renderCaption()}
          </ul>
        );
      }
    )");
    CHECK(max_kind(*a.impact_of("compact")) == ViContextKind::Styling);
    CHECK(max_kind(*a.impact_of("accent")) == ViContextKind::Styling);
    CHECK(max_kind(*a.impact_of("items")) == ViContextKind::Content);
    CHECK(max_kind(*a.impact_of("caption")) == ViContextKind::Structure);
  }

  TEST_CASE("early return and switch count as structure") {
    const auto a = analyze(R"(
      type P = { open: boolean; mode: "a" | "b"; label: string };
      export const Pop = ({ open, mode, label }: P) => {
        if (!open) return null;
        switch (mode) {
          case "a":
            return <b>{label}</b>;
          default:
            return <i>{label}</i>;
        }
      };
    )");
    CHECK(max_kind(*a.impact_of("open")) == ViContextKind::Structure);
    CHECK(max_kind(*a.impact_of("mode")) == ViContextKind::Structure);
    CHECK(max_kind(*a.impact_of("label")) == ViContextKind::Content);
  }

  TEST_CASE("dynamic tags are structure") {
    const auto a = analyze(R"(
      type P = { as?: "h1" | "h2"; text: string };
      export const Heading = ({ as = "h1", text }: P) => {
        const Tag = as;
        return <Tag>{text}</Tag>;
      };
    )");
    CHECK(max_kind(*a.impact_of("as")) == ViContextKind::Structure);
  }

  TEST_CASE("event handlers, keys and refs are not contexts") {
    const auto a = analyze(R"(
      type P = { id: string; onPick?: () => void; label: string };
      export const Row = ({ id, onPick, label }: P) => <li key={id} onClick={onPick}>{label}</li>;
    )");
    const ImpactScore* id = a.impact_of("id");
    CHECK((id == nullptr || id->n == 0));
    CHECK(a.impact_of("onPick") == nullptr);
  }

  TEST_CASE("shadowed names do not count") {
    const auto a = analyze(R"(
      type P = { title: string; rows: string[] };
      export const T = ({ title, rows }: P) => <ul>{rows.map((title) => <li>{title}</li>)}</ul>;
    )");
    const ImpactScore* t = a.impact_of("title");
    CHECK((t == nullptr || t->n == 0));
  }

  TEST_CASE("mutated locals carry guarding props") {
    const auto a = analyze(R"(
      type P = { banner?: boolean; kind: "a" | "b" };
      export const Alert = ({ banner = false, kind }: P) => {
        const classes = ["alert"];
        if (banner) classes.push("alert-banner");
        classes.push(`alert-${kind}`);
        return <div className={classes.join(" ")} />;
      };
    )");
    CHECK(max_kind(*a.impact_of("banner")) == ViContextKind::Styling);
    CHECK(max_kind(*a.impact_of("kind")) == ViContextKind::Styling);
  }

  TEST_CASE("snippets are bounded and utf-8 safe") {
    CHECK(truncate_utf8("héllo", 2) == "h");
    CHECK(truncate_utf8("héllo", 3) == "hé");
    CHECK(truncate_utf8("abc", 10) == "abc");
    const auto a = analyze(test::product_card());
    for (const auto& s : a.impacts) {
      for (const auto& o : s.occurrences) CHECK(o.snippet.size() <= 200);
    }
  }
}
