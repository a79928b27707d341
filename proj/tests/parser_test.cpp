#include <doctest.h>

#include "facet/parser.hpp"
#include "support.hpp"

using namespace facet;
using ast::NodeKind;

namespace {

const ast::Node* first_of(const ast::Ast& tree, NodeKind kind) {
  const ast::Node* found = nullptr;
  ast::walk(tree.root(), [&](const ast::Node* n) {
    if (found != nullptr) return false;
    if (n->kind == kind) {
      found = n;
      return false;
    }
    return true;
  });
  return found;
}

SourcePosition syntax_error_at(const std::string& source) {
  try {
    parse_program(source);
  } catch (const SyntaxError& e) {
    return e.position();
  }
  FAIL("expected a syntax error");
  return {};
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("parses the product card fixture") {
    const auto tree = parse_program(test::product_card());
    REQUIRE(tree.root() != nullptr);
    CHECK(first_of(tree, NodeKind::TypeAlias) != nullptr);
    CHECK(first_of(tree, NodeKind::JsxElement) != nullptr);
    CHECK(first_of(tree, NodeKind::Logical) != nullptr);
  }

  TEST_CASE("jsx attributes, children and expression containers") {
    const auto tree = parse_program(R"(const a = <div className={x} id="y">{z} text <b /></div>;)");
    const auto* el = first_of(tree, NodeKind::JsxElement);
    REQUIRE(el != nullptr);
    CHECK(el->text == "div");
    REQUIRE(el->attributes.size() == 2);
    CHECK(el->attributes[0]->text == "className");
    CHECK(el->attributes[1]->kid(0)->kind == NodeKind::StringLiteral);
    int containers = 0;
    for (const auto* c : el->children) containers += c->kind == NodeKind::JsxExpressionContainer;
    CHECK(containers == 1);
  }

  TEST_CASE("generic arrow functions are not jsx in tsx") {
    const auto tree = parse_program("const id = <T,>(x: T) => x;");
    CHECK(first_of(tree, NodeKind::ArrowFunction) != nullptr);
    CHECK(first_of(tree, NodeKind::JsxElement) == nullptr);
  }

  TEST_CASE("type assertions in .ts files") {
    const auto tree = parse_program("const n = <number>value;", options_for_filename("util.ts"));
    CHECK(first_of(tree, NodeKind::TypeCast) != nullptr);
  }

  TEST_CASE("template literals keep quasis and expressions") {
    const auto tree = parse_program("const c = `card theme-${theme} ${border}`;");
    const auto* t = first_of(tree, NodeKind::TemplateLiteral);
    REQUIRE(t != nullptr);
    CHECK(t->quasis.size() == 3);
    CHECK(t->kids.size() == 2);
    CHECK(t->quasis[0] == "card theme-");
  }

  TEST_CASE("optional chaining, nullish coalescing and satisfies") {
    const auto tree = parse_program("const v = a?.b ?? (c satisfies D);");
    CHECK(first_of(tree, NodeKind::Logical)->text == "??");
    CHECK(first_of(tree, NodeKind::Member)->optional);
    CHECK(first_of(tree, NodeKind::TypeCast) != nullptr);
  }

  TEST_CASE("regex versus division") {
    const auto tree = parse_program("const r = /a\\/b/g.test(s) ? x / 2 : y;");
    CHECK(first_of(tree, NodeKind::RegexLiteral) != nullptr);
    CHECK(first_of(tree, NodeKind::Binary)->text == "/");
  }

  TEST_CASE("type declarations") {
    const auto tree = parse_program(R"(
      type Size = "small" | "large";
      interface P extends Base<string> { size?: Size; onClick(): void; [key: string]: unknown }
      enum Color { Red, Green = 4 }
    )");
    const auto* iface = first_of(tree, NodeKind::InterfaceDeclaration);
    REQUIRE(iface != nullptr);
    REQUIRE(iface->type != nullptr);
    CHECK(iface->type->members.size() == 3);
    CHECK(iface->type->members[0].optional);
    CHECK(iface->type->members[1].is_method);
    CHECK(iface->type->members[2].is_index_signature);
    CHECK(iface->heritage.size() == 1);
    CHECK(first_of(tree, NodeKind::EnumDeclaration)->kids.size() == 2);
  }

  TEST_CASE("syntax errors carry line and column") {
    const auto pos = syntax_error_at("const a = 1;\nconst b = <div>;\n");
    CHECK(pos.line == 2);
    CHECK(pos.column >= 11);

    const auto unclosed = syntax_error_at("function f() {\n  return <div>\n}\n");
    CHECK(unclosed.line >= 2);
  }

  TEST_CASE("mismatched closing tag") {
    CHECK_THROWS_AS(parse_program("const a = <div></span>;"), SyntaxError);
  }

  TEST_CASE("unterminated string") {
    const auto pos = syntax_error_at("const s = \"abc\n;");
    CHECK(pos.line == 1);
  }

  TEST_CASE("position_of counts lines and byte columns") {
    const std::string text = "ab\ncd\n";
    const auto p = position_of(text, 4);
    CHECK(p.line == 2);
    CHECK(p.column == 2);
  }

  TEST_CASE("comments are collected") {
    const auto tree = parse_program("// lead\nconst a = 1; /* tail */\n");
    CHECK(tree.comments().size() == 2);
    CHECK(tree.comments()[0].text == "lead");
  }
}
