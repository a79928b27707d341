#include "facet/parser.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "lexer.hpp"

namespace facet {

using ast::Node;
using ast::NodeKind;
using ast::TypeKind;
using ast::TypeMember;
using ast::TypeNode;
using detail::Tok;
using detail::Token;

SourcePosition position_of(std::string_view source, std::size_t offset) {
  SourcePosition pos;
  pos.offset = std::min(offset, source.size());
  for (std::size_t i = 0; i < pos.offset; ++i) {
    if (source[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

ParseOptions options_for_filename(std::string_view filename) {
  ParseOptions options;
  auto ends_with = [&](std::string_view suffix) {
    return filename.size() >= suffix.size() &&
           filename.substr(filename.size() - suffix.size()) == suffix;
  };
  if (ends_with(".ts") || ends_with(".mts") || ends_with(".cts")) options.jsx = false;
  return options;
}

namespace {

struct Speculation {};  // thrown to abandon a speculative parse

// A syntax error after an arrow's `=>`: never swallowed by speculation.
struct Committed {
  SyntaxError error;
};

const std::unordered_set<std::string_view> kTypeKeywords{
    "string", "number", "boolean", "any",    "unknown", "void",
    "null",   "undefined", "never", "object", "bigint", "symbol", "this",
};

const std::unordered_set<std::string_view> kAssignOps{
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=",
    "&&=", "||=", "?\?=",
};

int binary_precedence(std::string_view op) {
  if (op == "??") return 1;
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "|") return 4;
  if (op == "^") return 5;
  if (op == "&") return 6;
  if (op == "==" || op == "!=" || op == "===" || op == "!==") return 7;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof" || op == "in") return 8;
  if (op == "<<" || op == ">>" || op == ">>>") return 9;
  if (op == "+" || op == "-") return 10;
  if (op == "*" || op == "/" || op == "%") return 11;
  if (op == "**") return 12;
  return -1;
}

class Parser {
 public:
  Parser(std::string_view source, ParseOptions options)
      : src_(source), options_(options), lex_(source, ast_.comments()) {
    advance();
  }

  ast::Ast run() {
    Node* program = ast_.make(NodeKind::Program, {0, src_.size()});
    while (cur_.type != Tok::Eof) program->kids.push_back(parse_statement());
    ast_.set_root(program);
    std::sort(ast_.comments().begin(), ast_.comments().end(),
              [](const ast::Comment& a, const ast::Comment& b) { return a.span.start < b.span.start; });
    return std::move(ast_);
  }

 private:
  // ---- token helpers -----------------------------------------------------

  struct State {
    std::size_t pos;
    Token cur;
    std::size_t prev_end;
  };

  State save() const { return {lex_.pos(), cur_, prev_end_}; }
  void restore(const State& s) {
    lex_.reset(s.pos);
    cur_ = s.cur;
    prev_end_ = s.prev_end;
  }

  void advance() {
    prev_end_ = cur_.end;
    cur_ = lex_.next();
  }

  Token peek_token() {
    State s = save();
    advance();
    Token t = cur_;
    restore(s);
    return t;
  }

  bool is(std::string_view punct) const { return cur_.type == Tok::Punct && cur_.value == punct; }
  bool is_word(std::string_view word) const {
    return cur_.type == Tok::Identifier && cur_.value == word;
  }
  bool is_ident() const { return cur_.type == Tok::Identifier; }

  bool eat(std::string_view punct) {
    if (!is(punct)) return false;
    advance();
    return true;
  }
  bool eat_word(std::string_view word) {
    if (!is_word(word)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& message) {
    if (speculating_ > 0) throw Speculation{};
    lex_.fail(message, cur_.start);
  }

  [[noreturn]] void unexpected() {
    if (cur_.type == Tok::Eof) fail("unexpected end of input");
    fail("unexpected token '" + std::string(src_.substr(cur_.start, cur_.end - cur_.start)) + "'");
  }

  void expect(std::string_view punct) {
    if (!eat(punct)) fail("expected '" + std::string(punct) + "'");
  }

  std::string expect_ident() {
    if (!is_ident()) fail("expected identifier");
    std::string name = cur_.value;
    advance();
    return name;
  }

  void consume_semicolon() {
    if (eat(";")) return;
    if (is("}") || cur_.type == Tok::Eof || cur_.newline_before) return;
    fail("expected ';'");
  }

  // `>` followed directly by `>`/`=` forms one operator.
  std::string glued_greater() {
    std::string op = ">";
    std::size_t p = cur_.end;
    while (p < src_.size() && src_[p] == '>' && op.size() < 3) {
      op.push_back('>');
      ++p;
    }
    if (p < src_.size() && src_[p] == '=' && (p + 1 >= src_.size() || src_[p + 1] != '=')) {
      op.push_back('=');
    }
    return op;
  }

  void consume_glued(const std::string& op) {
    lex_.reset(cur_.start + op.size());
    prev_end_ = cur_.start + op.size();
    cur_ = lex_.next();
  }

  Node* make(NodeKind kind, std::size_t start) { return ast_.make(kind, {start, prev_end_}); }
  Node* finish(Node* n, std::size_t start) {
    n->span = {start, prev_end_};
    return n;
  }

  template <typename Fn>
  auto speculate(Fn&& fn) -> decltype(fn()) {
    State s = save();
    ++speculating_;
    try {
      auto result = fn();
      --speculating_;
      return result;
    } catch (const Speculation&) {
      --speculating_;
      restore(s);
      return nullptr;
    } catch (const SyntaxError&) {
      --speculating_;
      restore(s);
      return nullptr;
    }
  }

  // ---- statements --------------------------------------------------------

  Node* parse_statement() {
    const std::size_t start = cur_.start;
    if (cur_.type == Tok::Punct) {
      if (is("{")) return parse_block();
      if (is(";")) {
        advance();
        return make(NodeKind::Empty, start);
      }
      if (is("@")) {
        skip_decorators();
        return parse_statement();
      }
    }
    if (is_ident()) {
      const std::string& w = cur_.value;
      if (w == "import") {
        Token nxt = peek_token();
        if (!(nxt.type == Tok::Punct && (nxt.value == "(" || nxt.value == "."))) return parse_import();
      }
      if (w == "export") return parse_export();
      if (Node* decl = try_declaration()) return decl;
      if (w == "if") return parse_if();
      if (w == "return") {
        advance();
        Node* n = make(NodeKind::Return, start);
        if (!is(";") && !is("}") && cur_.type != Tok::Eof && !cur_.newline_before) {
          n->kids.push_back(parse_expression());
        }
        consume_semicolon();
        return finish(n, start);
      }
      if (w == "for") return parse_for();
      if (w == "while") {
        advance();
        Node* n = make(NodeKind::While, start);
        expect("(");
        n->kids.push_back(parse_expression());
        expect(")");
        n->kids.push_back(parse_statement());
        return finish(n, start);
      }
      if (w == "do") {
        advance();
        Node* n = make(NodeKind::DoWhile, start);
        n->kids.push_back(parse_statement());
        if (!eat_word("while")) fail("expected 'while'");
        expect("(");
        n->kids.push_back(parse_expression());
        expect(")");
        eat(";");
        return finish(n, start);
      }
      if (w == "switch") return parse_switch();
      if (w == "try") return parse_try();
      if (w == "throw") {
        advance();
        Node* n = make(NodeKind::Throw, start);
        n->kids.push_back(parse_expression());
        consume_semicolon();
        return finish(n, start);
      }
      if (w == "break" || w == "continue") {
        NodeKind kind = w == "break" ? NodeKind::Break : NodeKind::Continue;
        advance();
        if (is_ident() && !cur_.newline_before) advance();  // label
        consume_semicolon();
        return make(kind, start);
      }
      // labeled statement
      Token nxt = peek_token();
      if (nxt.type == Tok::Punct && nxt.value == ":" && !is_reserved(w)) {
        advance();
        advance();
        return parse_statement();
      }
    }
    Node* n = make(NodeKind::ExpressionStatement, start);
    n->kids.push_back(parse_expression());
    consume_semicolon();
    return finish(n, start);
  }

  static bool is_reserved(std::string_view w) {
    static const std::unordered_set<std::string_view> kReserved{
        "break", "case", "catch", "class", "const", "continue", "debugger", "default",
        "delete", "do", "else", "export", "extends", "finally", "for", "function",
        "if", "import", "in", "instanceof", "new", "return", "super", "switch",
        "this", "throw", "try", "typeof", "var", "void", "while", "with", "null",
        "true", "false"};
    return kReserved.count(w) != 0;
  }

  // Declarations that may follow `export`. Returns null when the current
  // token does not start one.
  Node* try_declaration() {
    if (!is_ident()) return nullptr;
    const std::size_t start = cur_.start;
    const std::string w = cur_.value;
    if (w == "const") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && nxt.value == "enum") {
        advance();
        return parse_enum(start);
      }
      return parse_variable_declaration(true);
    }
    if (w == "var") return parse_variable_declaration(true);
    if (w == "let") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier || (nxt.type == Tok::Punct && (nxt.value == "[" || nxt.value == "{"))) {
        return parse_variable_declaration(true);
      }
      return nullptr;
    }
    if (w == "function") return parse_function(NodeKind::FunctionDeclaration, start, false);
    if (w == "async") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && nxt.value == "function" && !nxt.newline_before) {
        advance();
        return parse_function(NodeKind::FunctionDeclaration, start, true);
      }
      return nullptr;
    }
    if (w == "class") return parse_class(NodeKind::ClassDeclaration, start);
    if (w == "abstract") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && nxt.value == "class") {
        advance();
        return parse_class(NodeKind::ClassDeclaration, start);
      }
      return nullptr;
    }
    if (w == "type") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && !nxt.newline_before) return parse_type_alias();
      return nullptr;
    }
    if (w == "interface") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier) return parse_interface();
      return nullptr;
    }
    if (w == "enum") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier) return parse_enum(start);
      return nullptr;
    }
    if (w == "declare") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && !nxt.newline_before) {
        advance();
        if (is_word("module") || is_word("global") || is_word("namespace")) return parse_namespace(start);
        Node* decl = try_declaration();
        if (decl == nullptr) unexpected();
        return decl;
      }
      return nullptr;
    }
    if (w == "namespace" || w == "module") {
      Token nxt = peek_token();
      if ((nxt.type == Tok::Identifier || nxt.type == Tok::String) && !nxt.newline_before) {
        return parse_namespace(start);
      }
      return nullptr;
    }
    return nullptr;
  }

  Node* parse_namespace(std::size_t start) {
    advance();  // module / namespace / global
    while (is_ident() || cur_.type == Tok::String || is(".")) advance();
    Node* block = make(NodeKind::Block, start);
    if (is("{")) {
      advance();
      while (!is("}")) {
        if (cur_.type == Tok::Eof) fail("unterminated namespace");
        block->kids.push_back(parse_statement());
      }
      advance();
    } else {
      consume_semicolon();
    }
    return finish(block, start);
  }

  void skip_decorators() {
    while (eat("@")) parse_call_member(false);
  }

  Node* parse_import() {
    const std::size_t start = cur_.start;
    advance();  // import
    Node* n = make(NodeKind::ImportDeclaration, start);
    if (cur_.type == Tok::String) {
      n->text = cur_.value;
      advance();
      consume_semicolon();
      return finish(n, start);
    }
    eat_word("type");
    // default import
    auto add = [&](const std::string& imported, const std::string& local) {
      n->names.emplace_back(imported, local);
    };
    if (is_ident() && !is_word("from")) {
      std::string local = cur_.value;
      advance();
      add("default", local);
      eat(",");
    } else if (is_word("from")) {
      // `import from from "x"` is pathological; treat `from` as keyword.
    }
    if (eat("*")) {
      if (!eat_word("as")) fail("expected 'as'");
      add("*", expect_ident());
    } else if (eat("{")) {
      while (!is("}")) {
        if (is_word("type")) {
          Token nxt = peek_token();
          if (nxt.type == Tok::Identifier && !(nxt.value == "as")) advance();
        }
        std::string imported = cur_.type == Tok::String ? cur_.value : expect_ident_or_keep();
        if (cur_.type == Tok::String) advance();
        std::string local = imported;
        if (eat_word("as")) local = expect_ident();
        add(imported, local);
        if (!eat(",")) break;
      }
      expect("}");
    }
    if (!eat_word("from")) fail("expected 'from'");
    if (cur_.type != Tok::String) fail("expected module specifier");
    n->text = cur_.value;
    advance();
    if ((is_word("assert") || is_word("with")) && !cur_.newline_before) {
      advance();
      parse_primary();
    }
    consume_semicolon();
    return finish(n, start);
  }

  std::string expect_ident_or_keep() {
    if (!is_ident()) fail("expected identifier");
    std::string v = cur_.value;
    advance();
    return v;
  }

  Node* parse_export() {
    const std::size_t start = cur_.start;
    advance();  // export
    if (eat_word("default")) {
      Node* n = make(NodeKind::ExportDefault, start);
      if (is_word("function") || is_word("class") || is_word("interface") ||
          (is_word("async") && peek_token().value == "function") || is_word("abstract")) {
        const std::size_t dstart = cur_.start;
        if (is_word("function")) {
          n->kids.push_back(parse_function(NodeKind::FunctionDeclaration, dstart, false, true));
        } else if (is_word("async")) {
          advance();
          n->kids.push_back(parse_function(NodeKind::FunctionDeclaration, dstart, true, true));
        } else if (is_word("interface")) {
          n->kids.push_back(parse_interface());
        } else {
          eat_word("abstract");
          n->kids.push_back(parse_class(NodeKind::ClassDeclaration, dstart, true));
        }
      } else {
        n->kids.push_back(parse_assignment());
        consume_semicolon();
      }
      return finish(n, start);
    }
    if (is("=")) {  // export = x;
      advance();
      Node* n = make(NodeKind::ExportDefault, start);
      n->kids.push_back(parse_assignment());
      consume_semicolon();
      return finish(n, start);
    }
    Node* n = make(NodeKind::ExportNamed, start);
    bool type_only = false;
    if (is_word("type")) {
      Token nxt = peek_token();
      if (nxt.type == Tok::Punct && nxt.value == "{") {
        advance();
        type_only = true;
      }
    }
    if (eat("*")) {
      if (eat_word("as")) expect_ident();
      if (!eat_word("from")) fail("expected 'from'");
      advance();
      consume_semicolon();
      return finish(n, start);
    }
    if (eat("{")) {
      while (!is("}")) {
        eat_word("type");
        std::string local = expect_ident_or_keep();
        std::string exported = local;
        if (eat_word("as")) exported = expect_ident_or_keep();
        if (!type_only) n->names.emplace_back(local, exported);
        if (!eat(",")) break;
      }
      expect("}");
      if (eat_word("from")) {
        n->names.clear();  // re-export of another module
        advance();
      }
      consume_semicolon();
      return finish(n, start);
    }
    Node* decl = try_declaration();
    if (decl == nullptr) unexpected();
    n->kids.push_back(decl);
    return finish(n, start);
  }

  Node* parse_block() {
    const std::size_t start = cur_.start;
    expect("{");
    Node* n = make(NodeKind::Block, start);
    while (!is("}")) {
      if (cur_.type == Tok::Eof) fail("expected '}'");
      n->kids.push_back(parse_statement());
    }
    advance();
    return finish(n, start);
  }

  Node* parse_variable_declaration(bool consume_semi) {
    const std::size_t start = cur_.start;
    Node* n = make(NodeKind::VariableDeclaration, start);
    n->text = cur_.value;
    advance();
    do {
      const std::size_t dstart = cur_.start;
      Node* d = make(NodeKind::VariableDeclarator, dstart);
      Node* target = parse_binding_target();
      eat("!");  // definite assignment
      if (eat(":")) d->type = parse_type();
      d->kids.push_back(target);
      if (eat("=")) {
        d->kids.push_back(parse_assignment());
      } else {
        d->kids.push_back(nullptr);
      }
      n->kids.push_back(finish(d, dstart));
    } while (eat(","));
    if (consume_semi) consume_semicolon();
    return finish(n, start);
  }

  Node* parse_if() {
    const std::size_t start = cur_.start;
    advance();
    Node* n = make(NodeKind::If, start);
    expect("(");
    n->kids.push_back(parse_expression());
    expect(")");
    n->kids.push_back(parse_statement());
    if (eat_word("else")) {
      n->kids.push_back(parse_statement());
    } else {
      n->kids.push_back(nullptr);
    }
    return finish(n, start);
  }

  Node* parse_for() {
    const std::size_t start = cur_.start;
    advance();
    eat_word("await");
    expect("(");
    Node* init = nullptr;
    if (is(";")) {
      // empty init
    } else if (is_word("const") || is_word("let") || is_word("var")) {
      const std::size_t vstart = cur_.start;
      Node* decl = make(NodeKind::VariableDeclaration, vstart);
      decl->text = cur_.value;
      advance();
      Node* d = make(NodeKind::VariableDeclarator, cur_.start);
      d->kids.push_back(parse_binding_target());
      if (eat(":")) d->type = parse_type();
      if (eat("=")) {
        d->kids.push_back(parse_assignment(true));
      } else {
        d->kids.push_back(nullptr);
      }
      decl->kids.push_back(d);
      while (eat(",")) {
        Node* d2 = make(NodeKind::VariableDeclarator, cur_.start);
        d2->kids.push_back(parse_binding_target());
        d2->kids.push_back(eat("=") ? parse_assignment(true) : nullptr);
        decl->kids.push_back(d2);
      }
      init = finish(decl, vstart);
    } else {
      init = parse_expression(true);
    }
    if (is_word("of") || is_word("in")) {
      Node* n = make(NodeKind::ForOf, start);
      n->text = cur_.value;
      advance();
      n->kids.push_back(init);
      n->kids.push_back(parse_assignment());
      expect(")");
      n->kids.push_back(parse_statement());
      return finish(n, start);
    }
    Node* n = make(NodeKind::For, start);
    expect(";");
    n->kids.push_back(init);
    n->kids.push_back(is(";") ? nullptr : parse_expression());
    expect(";");
    n->kids.push_back(is(")") ? nullptr : parse_expression());
    expect(")");
    n->kids.push_back(parse_statement());
    return finish(n, start);
  }

  Node* parse_switch() {
    const std::size_t start = cur_.start;
    advance();
    Node* n = make(NodeKind::Switch, start);
    expect("(");
    n->kids.push_back(parse_expression());
    expect(")");
    expect("{");
    while (!is("}")) {
      const std::size_t cstart = cur_.start;
      Node* c = make(NodeKind::SwitchCase, cstart);
      if (eat_word("case")) {
        c->kids.push_back(parse_expression());
      } else if (eat_word("default")) {
        c->kids.push_back(nullptr);
      } else {
        unexpected();
      }
      expect(":");
      while (!is("}") && !is_word("case") && !is_word("default")) {
        if (cur_.type == Tok::Eof) fail("unterminated switch");
        c->kids.push_back(parse_statement());
      }
      n->kids.push_back(finish(c, cstart));
    }
    advance();
    return finish(n, start);
  }

  Node* parse_try() {
    const std::size_t start = cur_.start;
    advance();
    Node* n = make(NodeKind::Try, start);
    n->kids.push_back(parse_block());
    Node* param = nullptr;
    Node* handler = nullptr;
    Node* finalizer = nullptr;
    if (eat_word("catch")) {
      if (eat("(")) {
        param = parse_binding_target();
        if (eat(":")) parse_type();
        expect(")");
      }
      handler = parse_block();
    }
    if (eat_word("finally")) finalizer = parse_block();
    n->kids.push_back(param);
    n->kids.push_back(handler);
    n->kids.push_back(finalizer);
    return finish(n, start);
  }

  Node* parse_function(NodeKind kind, std::size_t start, bool is_async, bool name_optional = false) {
    if (!eat_word("function")) fail("expected 'function'");
    eat("*");
    Node* n = make(kind, start);
    n->is_async = is_async;
    if (is_ident() && !is("(")) {
      n->text = cur_.value;
      advance();
    } else if (kind == NodeKind::FunctionDeclaration && !name_optional) {
      fail("expected function name");
    }
    if (is("<")) parse_type_parameters();
    parse_params(n);
    if (eat(":")) n->return_type = parse_return_type();
    if (is("{")) {
      n->body = parse_block();
    } else {
      consume_semicolon();  // overload signature
    }
    return finish(n, start);
  }

  void parse_params(Node* fn) {
    expect("(");
    while (!is(")")) {
      fn->params.push_back(parse_param());
      if (!eat(",")) break;
    }
    expect(")");
  }

  Node* parse_param() {
    skip_decorators();
    const std::size_t start = cur_.start;
    while (is_ident() && (cur_.value == "public" || cur_.value == "private" ||
                          cur_.value == "protected" || cur_.value == "readonly" ||
                          cur_.value == "override")) {
      Token nxt = peek_token();
      if (nxt.type != Tok::Identifier && !(nxt.type == Tok::Punct && (nxt.value == "{" || nxt.value == "["))) break;
      advance();
    }
    if (is("...")) {
      advance();
      Node* rest = make(NodeKind::RestElement, start);
      rest->kids.push_back(parse_binding_target());
      eat("?");
      if (eat(":")) rest->type = parse_type();
      return finish(rest, start);
    }
    Node* target = parse_binding_target();
    if (eat("?")) target->optional = true;
    if (eat(":")) target->type = parse_type();
    if (eat("=")) {
      Node* ap = make(NodeKind::AssignmentPattern, start);
      ap->kids.push_back(target);
      ap->kids.push_back(parse_assignment());
      return finish(ap, start);
    }
    return target;
  }

  Node* parse_binding_target() {
    const std::size_t start = cur_.start;
    if (is("{")) {
      advance();
      Node* n = make(NodeKind::ObjectPattern, start);
      while (!is("}")) {
        const std::size_t pstart = cur_.start;
        if (eat("...")) {
          Node* rest = make(NodeKind::RestElement, pstart);
          rest->kids.push_back(parse_binding_target());
          n->kids.push_back(finish(rest, pstart));
        } else {
          Node* prop = make(NodeKind::Property, pstart);
          Node* key = parse_property_key(prop);
          Node* value = nullptr;
          if (eat(":")) {
            value = parse_binding_element();
          } else {
            if (key->kind != NodeKind::Identifier) fail("expected ':' in object pattern");
            prop->shorthand = true;
            value = ast_.make(NodeKind::Identifier, key->span);
            value->text = key->text;
            if (is("=")) {
              advance();
              Node* ap = make(NodeKind::AssignmentPattern, pstart);
              ap->kids.push_back(value);
              ap->kids.push_back(parse_assignment());
              value = finish(ap, pstart);
            }
          }
          prop->kids.push_back(key);
          prop->kids.push_back(value);
          n->kids.push_back(finish(prop, pstart));
        }
        if (!eat(",")) break;
      }
      expect("}");
      return finish(n, start);
    }
    if (is("[")) {
      advance();
      Node* n = make(NodeKind::ArrayPattern, start);
      while (!is("]")) {
        if (is(",")) {
          advance();
          n->kids.push_back(nullptr);
          continue;
        }
        const std::size_t estart = cur_.start;
        if (eat("...")) {
          Node* rest = make(NodeKind::RestElement, estart);
          rest->kids.push_back(parse_binding_target());
          n->kids.push_back(finish(rest, estart));
        } else {
          n->kids.push_back(parse_binding_element());
        }
        if (!eat(",")) break;
      }
      expect("]");
      return finish(n, start);
    }
    if (!is_ident()) fail("expected binding name");
    Node* id = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
    id->text = cur_.value;
    advance();
    return id;
  }

  Node* parse_binding_element() {
    const std::size_t start = cur_.start;
    Node* target = parse_binding_target();
    if (is("=")) {
      advance();
      Node* ap = make(NodeKind::AssignmentPattern, start);
      ap->kids.push_back(target);
      ap->kids.push_back(parse_assignment());
      return finish(ap, start);
    }
    return target;
  }

  Node* parse_class(NodeKind kind, std::size_t start, bool name_optional = false) {
    if (!eat_word("class")) fail("expected 'class'");
    Node* n = make(kind, start);
    if (is_ident() && !is_word("extends") && !is_word("implements")) {
      n->text = cur_.value;
      advance();
    } else if (kind == NodeKind::ClassDeclaration && !name_optional) {
      fail("expected class name");
    }
    if (is("<")) parse_type_parameters();
    Node* super = nullptr;
    if (eat_word("extends")) {
      super = parse_call_member(false);
      if (is("<")) parse_type_arguments();
    }
    n->kids.push_back(super);
    if (eat_word("implements")) {
      do {
        parse_type();
      } while (eat(","));
    }
    expect("{");
    Node* body = make(NodeKind::Block, prev_end_);
    while (!is("}")) {
      if (cur_.type == Tok::Eof) fail("unterminated class body");
      if (eat(";")) continue;
      body->kids.push_back(parse_class_member());
    }
    advance();
    n->body = body;
    return finish(n, start);
  }

  Node* parse_class_member() {
    skip_decorators();
    const std::size_t start = cur_.start;
    static const std::unordered_set<std::string_view> kModifiers{
        "public", "private", "protected", "static", "readonly", "abstract",
        "override", "declare", "async", "accessor"};
    while (is_ident() && kModifiers.count(cur_.value) != 0) {
      Token nxt = peek_token();
      if (nxt.type == Tok::Punct && (nxt.value == "(" || nxt.value == "=" || nxt.value == ":" ||
                                      nxt.value == ";" || nxt.value == "?" || nxt.value == "<")) {
        break;  // the modifier word is itself the member name
      }
      advance();
    }
    if ((is_word("get") || is_word("set"))) {
      Token nxt = peek_token();
      if (!(nxt.type == Tok::Punct && (nxt.value == "(" || nxt.value == "=" || nxt.value == ":" ||
                                        nxt.value == ";"))) {
        advance();
      }
    }
    eat("*");
    if (is("[")) {
      // index signature or computed member
      State s = save();
      advance();
      if (is_ident() && peek_token().value == ":") {
        restore(s);
        advance();
        advance();
        advance();
        parse_type();
        expect("]");
        expect(":");
        parse_type();
        consume_semicolon();
        return make(NodeKind::Empty, start);
      }
      restore(s);
    }
    Node* prop = make(NodeKind::Property, start);
    Node* key = parse_property_key(prop);
    prop->kids.push_back(key);
    eat("?");
    eat("!");
    if (is("(") || is("<")) {
      Node* fn = make(NodeKind::FunctionExpression, cur_.start);
      if (is("<")) parse_type_parameters();
      parse_params(fn);
      if (eat(":")) fn->return_type = parse_return_type();
      if (is("{")) {
        fn->body = parse_block();
      } else {
        consume_semicolon();
      }
      prop->is_async = true;
      prop->kids.push_back(finish(fn, start));
      return finish(prop, start);
    }
    if (eat(":")) prop->type = parse_type();
    if (eat("=")) {
      prop->kids.push_back(parse_assignment());
    } else {
      prop->kids.push_back(nullptr);
    }
    consume_semicolon();
    return finish(prop, start);
  }

  Node* parse_type_alias() {
    const std::size_t start = cur_.start;
    advance();  // type
    Node* n = make(NodeKind::TypeAlias, start);
    n->text = expect_ident();
    if (is("<")) parse_type_parameters();
    expect("=");
    n->type = parse_type();
    consume_semicolon();
    return finish(n, start);
  }

  Node* parse_interface() {
    const std::size_t start = cur_.start;
    advance();  // interface
    Node* n = make(NodeKind::InterfaceDeclaration, start);
    n->text = expect_ident();
    if (is("<")) parse_type_parameters();
    if (eat_word("extends")) {
      do {
        n->heritage.push_back(parse_type_operator());
      } while (eat(","));
    }
    n->type = parse_object_type();
    return finish(n, start);
  }

  Node* parse_enum(std::size_t start) {
    advance();  // enum
    Node* n = make(NodeKind::EnumDeclaration, start);
    n->text = expect_ident();
    expect("{");
    while (!is("}")) {
      const std::size_t mstart = cur_.start;
      Node* m = make(NodeKind::EnumMember, mstart);
      if (cur_.type == Tok::String) {
        m->text = cur_.value;
        advance();
      } else {
        m->text = expect_ident();
      }
      m->kids.push_back(eat("=") ? parse_assignment() : nullptr);
      n->kids.push_back(finish(m, mstart));
      if (!eat(",")) break;
    }
    expect("}");
    return finish(n, start);
  }

  // ---- expressions -------------------------------------------------------

  Node* parse_expression(bool no_in = false) {
    const std::size_t start = cur_.start;
    Node* first = parse_assignment(no_in);
    if (!is(",")) return first;
    Node* seq = make(NodeKind::Sequence, start);
    seq->kids.push_back(first);
    while (eat(",")) seq->kids.push_back(parse_assignment(no_in));
    return finish(seq, start);
  }

  Node* parse_assignment(bool no_in = false) {
    const std::size_t start = cur_.start;
    if (Node* arrow = try_arrow()) return arrow;
    if (is_word("yield") && in_generator_guess()) {
      advance();
      Node* n = make(NodeKind::Yield, start);
      eat("*");
      if (!is(")") && !is("]") && !is("}") && !is(",") && !is(";") && !cur_.newline_before) {
        n->kids.push_back(parse_assignment(no_in));
      }
      return finish(n, start);
    }
    Node* left = parse_conditional(no_in);
    std::string op;
    if (cur_.type == Tok::Punct) {
      if (is(">")) {
        std::string g = glued_greater();
        if (g == ">>=" || g == ">>>=") op = g;
      } else if (kAssignOps.count(cur_.value) != 0) {
        op = cur_.value;
      }
    }
    if (op.empty()) return left;
    if (op[0] == '>') {
      consume_glued(op);
    } else {
      advance();
    }
    Node* n = make(NodeKind::Assignment, start);
    n->text = op;
    n->kids.push_back(left);
    n->kids.push_back(parse_assignment(no_in));
    return finish(n, start);
  }

  bool in_generator_guess() const { return false; }

  Node* try_arrow() {
    const std::size_t start = cur_.start;
    bool is_async = false;
    if (is_word("async")) {
      Token nxt = peek_token();
      if (!nxt.newline_before &&
          ((nxt.type == Tok::Punct && (nxt.value == "(" || nxt.value == "<")) ||
           nxt.type == Tok::Identifier)) {
        Node* r = speculate([&]() -> Node* {
          advance();
          return parse_arrow_after_async(start, true);
        });
        if (r != nullptr) return r;
      }
    }
    if (is_ident() && !is_reserved(cur_.value)) {
      Token nxt = peek_token();
      if (nxt.type == Tok::Punct && nxt.value == "=>" && !nxt.newline_before) {
        Node* fn = make(NodeKind::ArrowFunction, start);
        Node* id = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
        id->text = cur_.value;
        fn->params.push_back(id);
        advance();
        advance();
        parse_arrow_body(fn);
        return finish(fn, start);
      }
      return nullptr;
    }
    if (is("(") || is("<")) {
      return speculate([&]() -> Node* { return parse_arrow_after_async(start, is_async); });
    }
    return nullptr;
  }

  Node* parse_arrow_after_async(std::size_t start, bool is_async) {
    Node* fn = make(NodeKind::ArrowFunction, start);
    fn->is_async = is_async;
    if (is_ident()) {
      Node* id = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
      id->text = cur_.value;
      fn->params.push_back(id);
      advance();
    } else {
      if (is("<")) parse_type_parameters();
      parse_params(fn);
      if (eat(":")) fn->return_type = parse_return_type();
    }
    if (!is("=>") || cur_.newline_before) fail("expected '=>'");
    advance();
    // Commit: errors inside the body are real errors, not failed speculation.
    int saved = speculating_;
    speculating_ = 0;
    try {
      parse_arrow_body(fn);
    } catch (const SyntaxError& e) {
      speculating_ = saved;
      throw Committed{e};
    } catch (...) {
      speculating_ = saved;
      throw;
    }
    speculating_ = saved;
    return finish(fn, start);
  }

  void parse_arrow_body(Node* fn) {
    if (is("{")) {
      fn->body = parse_block();
    } else {
      fn->body = parse_assignment();
    }
  }

  Node* parse_conditional(bool no_in) {
    const std::size_t start = cur_.start;
    Node* test = parse_binary(0, no_in);
    if (!is("?")) return test;
    advance();
    Node* n = make(NodeKind::Conditional, start);
    n->kids.push_back(test);
    n->kids.push_back(parse_assignment());
    expect(":");
    n->kids.push_back(parse_assignment(no_in));
    return finish(n, start);
  }

  // Returns the binary operator at the current token, or "".
  std::string current_binary_op(bool no_in) {
    if (cur_.type == Tok::Punct) {
      if (is(">")) {
        std::string g = glued_greater();
        if (g == ">>=" || g == ">>>=") return {};
        return g;
      }
      if (binary_precedence(cur_.value) > 0) return cur_.value;
      return {};
    }
    if (is_word("instanceof")) return "instanceof";
    if (is_word("in") && !no_in) return "in";
    return {};
  }

  Node* parse_binary(int min_prec, bool no_in) {
    const std::size_t start = cur_.start;
    Node* left = parse_unary();
    while (true) {
      if ((is_word("as") || is_word("satisfies")) && !cur_.newline_before) {
        if (binary_precedence("<") < min_prec) break;
        Node* cast = make(NodeKind::TypeCast, start);
        cast->text = cur_.value;
        advance();
        if (is_word("const")) {
          advance();
          cast->type = std::make_unique<TypeNode>();
          cast->type->kind = TypeKind::Keyword;
          cast->type->name = "const";
        } else {
          cast->type = parse_type();
        }
        cast->kids.push_back(left);
        left = finish(cast, start);
        continue;
      }
      std::string op = current_binary_op(no_in);
      if (op.empty()) break;
      int prec = binary_precedence(op);
      if (prec < min_prec || prec <= 0) break;
      if (op[0] == '>') {
        consume_glued(op);
      } else {
        advance();
      }
      // `**` is right-associative.
      Node* right = parse_binary(op == "**" ? prec : prec + 1, no_in);
      const bool logical = op == "&&" || op == "||" || op == "??";
      Node* n = make(logical ? NodeKind::Logical : NodeKind::Binary, start);
      n->text = op;
      n->kids.push_back(left);
      n->kids.push_back(right);
      left = finish(n, start);
    }
    return left;
  }

  Node* parse_unary() {
    const std::size_t start = cur_.start;
    if (cur_.type == Tok::Punct) {
      const std::string& v = cur_.value;
      if (v == "!" || v == "-" || v == "+" || v == "~") {
        std::string op = v;
        advance();
        Node* n = make(NodeKind::Unary, start);
        n->text = op;
        n->prefix = true;
        n->kids.push_back(parse_unary());
        return finish(n, start);
      }
      if (v == "++" || v == "--") {
        std::string op = v;
        advance();
        Node* n = make(NodeKind::Update, start);
        n->text = op;
        n->prefix = true;
        n->kids.push_back(parse_unary());
        return finish(n, start);
      }
      if (v == "<" && !options_.jsx) {
        // <T>expr type assertion
        advance();
        Node* n = make(NodeKind::TypeCast, start);
        n->text = "<>";
        n->type = parse_type();
        if (!is(">")) fail("expected '>'");
        advance();
        n->kids.push_back(parse_unary());
        return finish(n, start);
      }
    }
    if (is_ident()) {
      const std::string& v = cur_.value;
      if (v == "typeof" || v == "void" || v == "delete") {
        std::string op = v;
        advance();
        Node* n = make(NodeKind::Unary, start);
        n->text = op;
        n->prefix = true;
        n->kids.push_back(parse_unary());
        return finish(n, start);
      }
      if (v == "await") {
        Token nxt = peek_token();
        const bool operand_follows =
            !(nxt.type == Tok::Punct && (nxt.value == ")" || nxt.value == ";" || nxt.value == "," ||
                                          nxt.value == "]" || nxt.value == "}" || nxt.value == "=" ||
                                          nxt.value == ":" || nxt.value == "."));
        if (operand_follows && nxt.type != Tok::Eof) {
          advance();
          Node* n = make(NodeKind::Await, start);
          n->kids.push_back(parse_unary());
          return finish(n, start);
        }
      }
    }
    Node* expr = parse_call_member(true);
    if ((is("++") || is("--")) && !cur_.newline_before) {
      Node* n = make(NodeKind::Update, start);
      n->text = cur_.value;
      advance();
      n->kids.push_back(expr);
      return finish(n, start);
    }
    return expr;
  }

  Node* parse_call_member(bool allow_call) {
    const std::size_t start = cur_.start;
    Node* expr = nullptr;
    if (is_word("new")) {
      advance();
      if (eat(".")) {  // new.target
        expect_ident();
        expr = make(NodeKind::Identifier, start);
        expr->text = "new.target";
      } else {
        Node* n = make(NodeKind::New, start);
        n->kids.push_back(parse_call_member(false));
        if (is("<")) {
          speculate([&]() -> Node* {
            parse_type_arguments();
            if (!is("(")) fail("expected '('");
            return n;
          });
        }
        if (is("(")) parse_arguments(n);
        expr = finish(n, start);
      }
    } else {
      expr = parse_primary();
    }
    while (true) {
      if (is(".")) {
        advance();
        expr = make_member(expr, start, false);
      } else if (is("?.")) {
        advance();
        if (is("(")) {
          if (!allow_call) break;
          Node* call = make(NodeKind::Call, start);
          call->optional = true;
          call->kids.push_back(expr);
          parse_arguments(call);
          expr = finish(call, start);
        } else if (is("[")) {
          advance();
          Node* m = make(NodeKind::Member, start);
          m->computed = true;
          m->optional = true;
          m->kids.push_back(expr);
          m->kids.push_back(parse_expression());
          expect("]");
          expr = finish(m, start);
        } else {
          expr = make_member(expr, start, true);
        }
      } else if (is("[")) {
        advance();
        Node* m = make(NodeKind::Member, start);
        m->computed = true;
        m->kids.push_back(expr);
        m->kids.push_back(parse_expression());
        expect("]");
        expr = finish(m, start);
      } else if (is("(") && allow_call) {
        Node* call = make(NodeKind::Call, start);
        call->kids.push_back(expr);
        parse_arguments(call);
        expr = finish(call, start);
      } else if (cur_.type == Tok::Template) {
        Node* tagged = make(NodeKind::TaggedTemplate, start);
        tagged->kids.push_back(expr);
        tagged->kids.push_back(parse_template());
        expr = finish(tagged, start);
      } else if (is("<") && !cur_.newline_before) {
        std::vector<std::unique_ptr<TypeNode>> args;
        Node* ok = speculate([&]() -> Node* {
          args = parse_type_arguments();
          if (!(is("(") || cur_.type == Tok::Template)) fail("expected call");
          return expr;
        });
        if (ok == nullptr) break;
        if (is("(") && allow_call) {
          Node* call = make(NodeKind::Call, start);
          call->kids.push_back(expr);
          call->type_args = std::move(args);
          parse_arguments(call);
          expr = finish(call, start);
        } else if (cur_.type == Tok::Template) {
          continue;
        } else {
          break;
        }
      } else if (is("!") && !cur_.newline_before) {
        // non-null assertion
        advance();
        Node* cast = make(NodeKind::TypeCast, start);
        cast->text = "!";
        cast->kids.push_back(expr);
        expr = finish(cast, start);
      } else {
        break;
      }
    }
    return expr;
  }

  Node* make_member(Node* object, std::size_t start, bool optional) {
    if (!is_ident() && cur_.type != Tok::PrivateName) fail("expected property name");
    Node* prop = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
    prop->text = cur_.value;
    advance();
    Node* m = make(NodeKind::Member, start);
    m->optional = optional;
    m->kids.push_back(object);
    m->kids.push_back(prop);
    return finish(m, start);
  }

  void parse_arguments(Node* call) {
    expect("(");
    while (!is(")")) {
      const std::size_t start = cur_.start;
      if (eat("...")) {
        Node* s = make(NodeKind::SpreadElement, start);
        s->kids.push_back(parse_assignment());
        call->kids.push_back(finish(s, start));
      } else {
        call->kids.push_back(parse_assignment());
      }
      if (!eat(",")) break;
    }
    expect(")");
  }

  Node* parse_primary() {
    const std::size_t start = cur_.start;
    switch (cur_.type) {
      case Tok::Number: {
        Node* n = ast_.make(NodeKind::NumberLiteral, {cur_.start, cur_.end});
        n->text = cur_.value;
        n->number = cur_.number;
        n->is_integer = cur_.is_integer;
        advance();
        return n;
      }
      case Tok::String: {
        Node* n = ast_.make(NodeKind::StringLiteral, {cur_.start, cur_.end});
        n->text = cur_.value;
        advance();
        return n;
      }
      case Tok::Template:
        return parse_template();
      case Tok::PrivateName: {
        Node* n = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
        n->text = cur_.value;
        advance();
        return n;
      }
      case Tok::Eof:
        unexpected();
      case Tok::Identifier:
        break;
      case Tok::Punct: {
        if (is("(")) {
          advance();
          Node* n = make(NodeKind::Parenthesized, start);
          n->kids.push_back(parse_expression());
          expect(")");
          return finish(n, start);
        }
        if (is("[")) return parse_array_literal();
        if (is("{")) return parse_object_literal();
        if (is("<") && options_.jsx) return parse_jsx_element(false);
        if (is("/") || is("/=")) {
          Token re = lex_.scan_regex(cur_.start);
          Node* n = ast_.make(NodeKind::RegexLiteral, {re.start, re.end});
          n->text = re.value;
          prev_end_ = re.end;
          cur_ = lex_.next();
          return n;
        }
        if (is("@")) {
          skip_decorators();
          return parse_primary();
        }
        unexpected();
      }
    }
    const std::string w = cur_.value;
    if (w == "true" || w == "false") {
      Node* n = ast_.make(NodeKind::BooleanLiteral, {cur_.start, cur_.end});
      n->text = w;
      advance();
      return n;
    }
    if (w == "null") {
      Node* n = ast_.make(NodeKind::NullLiteral, {cur_.start, cur_.end});
      advance();
      return n;
    }
    if (w == "function") return parse_function(NodeKind::FunctionExpression, start, false);
    if (w == "async") {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && nxt.value == "function" && !nxt.newline_before) {
        advance();
        return parse_function(NodeKind::FunctionExpression, start, true);
      }
    }
    if (w == "class") return parse_class(NodeKind::ClassExpression, start, true);
    if (is_reserved(w) && w != "this" && w != "super" && w != "import" && w != "new") unexpected();
    Node* n = ast_.make(NodeKind::Identifier, {cur_.start, cur_.end});
    n->text = w;
    advance();
    return n;
  }

  Node* parse_template() {
    const std::size_t start = cur_.start;
    Node* n = ast_.make(NodeKind::TemplateLiteral, {start, start});
    lex_.reset(cur_.end);
    while (true) {
      detail::TemplateChunk chunk = lex_.scan_template_chunk();
      n->quasis.push_back(std::move(chunk.cooked));
      if (chunk.tail) {
        prev_end_ = chunk.end;
        cur_ = lex_.next();
        break;
      }
      prev_end_ = chunk.end;
      cur_ = lex_.next();
      n->kids.push_back(parse_expression());
      if (!is("}")) fail("expected '}' in template literal");
      lex_.reset(cur_.end);
    }
    n->span = {start, prev_end_};
    return n;
  }

  Node* parse_array_literal() {
    const std::size_t start = cur_.start;
    expect("[");
    Node* n = make(NodeKind::ArrayExpression, start);
    while (!is("]")) {
      if (is(",")) {
        advance();
        n->kids.push_back(nullptr);
        continue;
      }
      const std::size_t estart = cur_.start;
      if (eat("...")) {
        Node* s = make(NodeKind::SpreadElement, estart);
        s->kids.push_back(parse_assignment());
        n->kids.push_back(finish(s, estart));
      } else {
        n->kids.push_back(parse_assignment());
      }
      if (!eat(",")) break;
    }
    expect("]");
    return finish(n, start);
  }

  Node* parse_property_key(Node* prop) {
    const std::size_t start = cur_.start;
    if (is("[")) {
      advance();
      prop->computed = true;
      Node* key = parse_assignment();
      expect("]");
      return key;
    }
    if (cur_.type == Tok::String) {
      Node* key = ast_.make(NodeKind::StringLiteral, {start, cur_.end});
      key->text = cur_.value;
      advance();
      return key;
    }
    if (cur_.type == Tok::Number) {
      Node* key = ast_.make(NodeKind::NumberLiteral, {start, cur_.end});
      key->text = cur_.value;
      key->number = cur_.number;
      key->is_integer = cur_.is_integer;
      advance();
      return key;
    }
    if (is_ident() || cur_.type == Tok::PrivateName) {
      Node* key = ast_.make(NodeKind::Identifier, {start, cur_.end});
      key->text = cur_.value;
      advance();
      return key;
    }
    fail("expected property name");
  }

  Node* parse_object_literal() {
    const std::size_t start = cur_.start;
    expect("{");
    Node* n = make(NodeKind::ObjectExpression, start);
    while (!is("}")) {
      const std::size_t pstart = cur_.start;
      if (eat("...")) {
        Node* s = make(NodeKind::SpreadElement, pstart);
        s->kids.push_back(parse_assignment());
        n->kids.push_back(finish(s, pstart));
        if (!eat(",")) break;
        continue;
      }
      Node* prop = make(NodeKind::Property, pstart);
      bool is_method = false;
      if (is_word("async") || is_word("get") || is_word("set")) {
        Token nxt = peek_token();
        if (!(nxt.type == Tok::Punct && (nxt.value == "," || nxt.value == ":" || nxt.value == "(" ||
                                          nxt.value == "}" || nxt.value == "="))) {
          advance();
          is_method = true;
        }
      }
      if (eat("*")) is_method = true;
      Node* key = parse_property_key(prop);
      prop->kids.push_back(key);
      if (is("(") || is("<")) {
        Node* fn = make(NodeKind::FunctionExpression, cur_.start);
        if (is("<")) parse_type_parameters();
        parse_params(fn);
        if (eat(":")) fn->return_type = parse_return_type();
        fn->body = parse_block();
        prop->kids.push_back(finish(fn, pstart));
        prop->is_async = true;  // marks method shorthand
      } else if (eat(":")) {
        prop->kids.push_back(parse_assignment());
      } else {
        if (is_method || key->kind != NodeKind::Identifier || prop->computed) fail("expected ':'");
        prop->shorthand = true;
        Node* value = ast_.make(NodeKind::Identifier, key->span);
        value->text = key->text;
        prop->kids.push_back(value);
      }
      n->kids.push_back(finish(prop, pstart));
      if (!eat(",")) break;
    }
    expect("}");
    return finish(n, start);
  }

  // ---- JSX ---------------------------------------------------------------

  std::string parse_jsx_name(std::size_t& name_end) {
    if (!is_ident()) fail("expected JSX tag name");
    Token t = lex_.scan_jsx_identifier(cur_.start);
    std::string name = t.value;
    prev_end_ = t.end;
    cur_ = lex_.next();
    while (is(".") || is(":")) {
      std::string sep = cur_.value;
      advance();
      if (!is_ident()) fail("expected JSX name segment");
      Token seg = lex_.scan_jsx_identifier(cur_.start);
      name += sep + seg.value;
      prev_end_ = seg.end;
      cur_ = lex_.next();
    }
    name_end = prev_end_;
    return name;
  }

  // Parses `<...>` starting at the current `<`. When `in_children` is true the
  // lexer is left positioned right after the final `>` without tokenizing,
  // since JSX text follows.
  Node* parse_jsx_element(bool in_children) {
    const std::size_t start = cur_.start;
    advance();  // <
    if (is(">")) {
      Node* frag = ast_.make(NodeKind::JsxFragment, {start, start});
      parse_jsx_children(frag, "");
      return finish_jsx(frag, start, in_children);
    }
    Node* el = ast_.make(NodeKind::JsxElement, {start, start});
    std::size_t name_start = cur_.start;
    std::size_t name_end = 0;
    el->text = parse_jsx_name(name_end);
    Node* name = ast_.make(NodeKind::JsxName, {name_start, name_end});
    name->text = el->text;
    el->kids.push_back(name);
    if (is("<")) el->type_args = parse_type_arguments();
    while (!is(">") && !is("/")) {
      const std::size_t astart = cur_.start;
      if (is("{")) {
        advance();
        if (!eat("...")) fail("expected '...' in JSX spread attribute");
        Node* spread = ast_.make(NodeKind::JsxSpreadAttribute, {astart, astart});
        spread->kids.push_back(parse_assignment());
        expect("}");
        el->attributes.push_back(finish(spread, astart));
        continue;
      }
      if (!is_ident()) fail("expected JSX attribute");
      Node* attr = ast_.make(NodeKind::JsxAttribute, {astart, astart});
      std::size_t attr_name_end = 0;
      attr->text = parse_jsx_name(attr_name_end);
      if (is("=")) {
        const std::size_t vstart = lex_.pos();
        (void)vstart;
        // The value token may be a JSX string; rescan from after '='.
        std::size_t after_eq = cur_.end;
        lex_.reset(after_eq);
        Token probe = lex_.next();
        if (probe.type == Tok::String) {
          Token s = lex_.scan_jsx_string(probe.start);
          Node* lit = ast_.make(NodeKind::StringLiteral, {s.start, s.end});
          lit->text = s.value;
          attr->kids.push_back(lit);
          prev_end_ = s.end;
          cur_ = lex_.next();
        } else {
          lex_.reset(after_eq);
          advance();
          if (is("{")) {
            const std::size_t cstart = cur_.start;
            advance();
            Node* container = ast_.make(NodeKind::JsxExpressionContainer, {cstart, cstart});
            container->kids.push_back(is("}") ? nullptr : parse_assignment());
            expect("}");
            attr->kids.push_back(finish(container, cstart));
          } else if (is("<")) {
            attr->kids.push_back(parse_jsx_element(false));
          } else {
            fail("expected JSX attribute value");
          }
        }
      } else {
        attr->kids.push_back(nullptr);
      }
      el->attributes.push_back(finish(attr, astart));
    }
    if (is("/")) {
      // self-closing: `/` then `>`
      std::size_t slash_end = cur_.end;
      lex_.reset(slash_end);
      Token gt = lex_.next();
      if (!(gt.type == Tok::Punct && gt.value == ">")) fail("expected '>' after '/'");
      cur_ = gt;
      return finish_jsx(el, start, in_children);
    }
    parse_jsx_children(el, el->text);
    return finish_jsx(el, start, in_children);
  }

  // cur_ is the final `>` of the element.
  Node* finish_jsx(Node* n, std::size_t start, bool in_children) {
    const std::size_t end = cur_.end;
    n->span = {start, end};
    prev_end_ = end;
    lex_.reset(end);
    if (!in_children) cur_ = lex_.next();
    return n;
  }

  // cur_ is the `>` closing the opening tag. Leaves cur_ at the `>` of the
  // closing tag.
  void parse_jsx_children(Node* parent, const std::string& tag) {
    lex_.reset(cur_.end);
    while (true) {
      Token text = lex_.scan_jsx_text();
      if (text.end > text.start) {
        Node* t = ast_.make(NodeKind::JsxText, {text.start, text.end});
        t->text = text.value;
        parent->children.push_back(t);
      }
      if (lex_.pos() >= src_.size()) {
        lex_.fail(tag.empty() ? "unterminated JSX fragment" : "unclosed JSX element <" + tag + ">",
                  parent->span.start);
      }
      const std::size_t at = lex_.pos();
      if (src_[at] == '{') {
        lex_.reset(at + 1);
        prev_end_ = at + 1;
        cur_ = lex_.next();
        Node* container = ast_.make(NodeKind::JsxExpressionContainer, {at, at});
        if (is("...")) advance();
        container->kids.push_back(is("}") ? nullptr : parse_expression());
        if (!is("}")) fail("expected '}' in JSX expression");
        container->span = {at, cur_.end};
        parent->children.push_back(container);
        lex_.reset(cur_.end);
        continue;
      }
      // '<'
      lex_.reset(at);
      prev_end_ = at;
      cur_ = lex_.next();  // '<'
      Token after = peek_token();
      if (after.type == Tok::Punct && after.value == "/") {
        advance();  // <
        advance();  // /
        std::string closing;
        if (!is(">")) {
          std::size_t ignored = 0;
          closing = parse_jsx_name(ignored);
        }
        if (closing != tag) {
          lex_.fail(tag.empty() ? "expected closing fragment </>, found </" + closing + ">"
                                : "expected closing tag </" + tag + ">, found </" + closing + ">",
                    at);
        }
        if (!is(">")) fail("expected '>'");
        return;
      }
      parent->children.push_back(parse_jsx_element(true));
      lex_.reset(prev_end_);
    }
  }

  // ---- types -------------------------------------------------------------

  std::unique_ptr<TypeNode> make_type(TypeKind kind, std::size_t start) {
    auto t = std::make_unique<TypeNode>();
    t->kind = kind;
    t->span = {start, prev_end_};
    return t;
  }

  void parse_type_parameters() {
    expect("<");
    while (!is(">")) {
      eat_word("const");
      eat_word("in");
      eat_word("out");
      expect_ident();
      if (eat_word("extends")) parse_type();
      if (eat("=")) parse_type();
      if (!eat(",")) break;
    }
    if (!is(">")) fail("expected '>'");
    consume_glued(">");
  }

  std::vector<std::unique_ptr<TypeNode>> parse_type_arguments() {
    std::vector<std::unique_ptr<TypeNode>> args;
    expect("<");
    while (!is(">")) {
      args.push_back(parse_type());
      if (!eat(",")) break;
    }
    if (!is(">")) fail("expected '>'");
    consume_glued(">");
    return args;
  }

  std::unique_ptr<TypeNode> parse_return_type() {
    // `x is T` / `asserts x is T` predicates
    if (is_word("asserts")) {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier) advance();
    }
    if (is_ident()) {
      Token nxt = peek_token();
      if (nxt.type == Tok::Identifier && nxt.value == "is" && !nxt.newline_before) {
        const std::size_t start = cur_.start;
        advance();
        advance();
        parse_type();
        auto t = make_type(TypeKind::Keyword, start);
        t->name = "boolean";
        return t;
      }
    }
    return parse_type();
  }

  std::unique_ptr<TypeNode> parse_type() {
    const std::size_t start = cur_.start;
    auto t = parse_union_type();
    if (is_word("extends") && !cur_.newline_before) {
      advance();
      parse_union_type();
      expect("?");
      parse_type();
      expect(":");
      parse_type();
      auto c = make_type(TypeKind::Conditional, start);
      c->args.push_back(std::move(t));
      return c;
    }
    return t;
  }

  std::unique_ptr<TypeNode> parse_union_type() {
    const std::size_t start = cur_.start;
    eat("|");
    auto first = parse_intersection_type();
    if (!is("|")) return first;
    auto u = make_type(TypeKind::Union, start);
    u->args.push_back(std::move(first));
    while (eat("|")) u->args.push_back(parse_intersection_type());
    u->span = {start, prev_end_};
    return u;
  }

  std::unique_ptr<TypeNode> parse_intersection_type() {
    const std::size_t start = cur_.start;
    eat("&");
    auto first = parse_type_operator();
    if (!is("&")) return first;
    auto u = make_type(TypeKind::Intersection, start);
    u->args.push_back(std::move(first));
    while (eat("&")) u->args.push_back(parse_type_operator());
    u->span = {start, prev_end_};
    return u;
  }

  std::unique_ptr<TypeNode> parse_type_operator() {
    const std::size_t start = cur_.start;
    if (is_word("keyof") || is_word("unique") || is_word("infer")) {
      std::string op = cur_.value;
      advance();
      auto inner = parse_type_operator();
      if (op == "keyof") {
        auto t = make_type(TypeKind::Keyof, start);
        t->args.push_back(std::move(inner));
        return t;
      }
      return inner;
    }
    if (is_word("readonly")) {
      advance();
      return parse_type_operator();
    }
    auto t = parse_primary_type();
    while (is("[") && !cur_.newline_before) {
      advance();
      if (eat("]")) {
        auto arr = make_type(TypeKind::Array, start);
        arr->args.push_back(std::move(t));
        t = std::move(arr);
      } else {
        auto idx = parse_type();
        expect("]");
        auto ia = make_type(TypeKind::IndexedAccess, start);
        ia->args.push_back(std::move(t));
        ia->args.push_back(std::move(idx));
        t = std::move(ia);
      }
    }
    return t;
  }

  std::unique_ptr<TypeNode> parse_function_type(std::size_t start) {
    auto fn = make_type(TypeKind::Function, start);
    if (is("<")) parse_type_parameters();
    expect("(");
    while (!is(")")) {
      TypeMember m;
      eat("...");
      if (is("{") || is("[")) {
        parse_binding_target();
      } else {
        m.name = expect_ident();
      }
      if (eat("?")) m.optional = true;
      if (eat(":")) m.type = parse_type();
      fn->members.push_back(std::move(m));
      if (!eat(",")) break;
    }
    expect(")");
    if (!is("=>")) fail("expected '=>'");
    advance();
    fn->args.push_back(parse_return_type());
    fn->span = {start, prev_end_};
    return fn;
  }

  std::unique_ptr<TypeNode> parse_primary_type() {
    const std::size_t start = cur_.start;
    if (is("(") || is("<")) {
      std::unique_ptr<TypeNode> fn;
      State s = save();
      ++speculating_;
      try {
        fn = parse_function_type(start);
      } catch (const Speculation&) {
        restore(s);
      } catch (const SyntaxError&) {
        restore(s);
      }
      --speculating_;
      if (fn) return fn;
      expect("(");
      auto inner = parse_type();
      expect(")");
      return inner;
    }
    if (is_word("new")) {
      advance();
      return parse_function_type(start);
    }
    if (is_word("abstract")) {
      advance();
      if (!eat_word("new")) fail("expected 'new'");
      return parse_function_type(start);
    }
    if (is("{")) {
      auto obj = parse_object_type();
      return obj;
    }
    if (is("[")) {
      advance();
      auto tup = make_type(TypeKind::Tuple, start);
      while (!is("]")) {
        eat("...");
        if (is_ident()) {
          Token nxt = peek_token();
          if (nxt.type == Tok::Punct && (nxt.value == ":" || nxt.value == "?")) {
            advance();
            eat("?");
            expect(":");
          }
        }
        tup->args.push_back(parse_type());
        eat("?");
        if (!eat(",")) break;
      }
      expect("]");
      tup->span = {start, prev_end_};
      return tup;
    }
    if (cur_.type == Tok::String) {
      auto t = make_type(TypeKind::StringLiteral, start);
      t->text = cur_.value;
      advance();
      t->span = {start, prev_end_};
      return t;
    }
    if (cur_.type == Tok::Number || (is("-") && peek_token().type == Tok::Number)) {
      bool neg = eat("-");
      auto t = make_type(TypeKind::NumberLiteral, start);
      t->number = neg ? -cur_.number : cur_.number;
      t->text = (neg ? "-" : "") + cur_.value;
      advance();
      t->span = {start, prev_end_};
      return t;
    }
    if (cur_.type == Tok::Template) {
      Node* tpl = parse_template();
      auto t = make_type(TypeKind::Template, start);
      if (tpl->kids.empty() && tpl->quasis.size() == 1) {
        t->kind = TypeKind::StringLiteral;
        t->text = tpl->quasis[0];
      }
      return t;
    }
    if (is_word("typeof")) {
      advance();
      auto t = make_type(TypeKind::Typeof, start);
      if (is_word("import")) {
        advance();
        expect("(");
        advance();
        expect(")");
      } else {
        t->name = expect_ident();
      }
      while (is(".")) {
        advance();
        t->name += "." + expect_ident();
      }
      if (is("<") && !cur_.newline_before) parse_type_arguments();
      t->span = {start, prev_end_};
      return t;
    }
    if (is_word("true") || is_word("false")) {
      auto t = make_type(TypeKind::BooleanLiteral, start);
      t->text = cur_.value;
      advance();
      t->span = {start, prev_end_};
      return t;
    }
    if (is_word("void") || is_word("null")) {
      auto t = make_type(TypeKind::Keyword, start);
      t->name = cur_.value;
      advance();
      t->span = {start, prev_end_};
      return t;
    }
    if (is_word("import")) {  // import("x").Y
      advance();
      expect("(");
      advance();
      expect(")");
      auto t = make_type(TypeKind::Reference, start);
      t->name = "import";
      while (eat(".")) t->name = expect_ident();
      if (is("<") && !cur_.newline_before) t->args = parse_type_arguments();
      t->span = {start, prev_end_};
      return t;
    }
    if (is_ident()) {
      std::string name = cur_.value;
      advance();
      if (kTypeKeywords.count(name) != 0 && !is(".")) {
        auto t = make_type(TypeKind::Keyword, start);
        t->name = name;
        return t;
      }
      while (is(".")) {
        advance();
        name += "." + expect_ident();
      }
      auto t = make_type(TypeKind::Reference, start);
      t->name = name;
      if (is("<") && !cur_.newline_before) t->args = parse_type_arguments();
      t->span = {start, prev_end_};
      return t;
    }
    unexpected();
  }

  // Comments fully between `from` and `to` not yet attached.
  std::string collect_comments(std::size_t from, std::size_t to) {
    std::string out;
    for (const auto& c : ast_.comments()) {
      if (c.span.start >= from && c.span.end <= to && attached_.count(c.span.start) == 0) {
        attached_.insert(c.span.start);
        if (c.text.empty()) continue;
        if (!out.empty()) out += " ";
        out += c.text;
      }
    }
    return out;
  }

  // A comment starting on the same line right after `end`.
  std::string trailing_comment(std::size_t end) {
    for (const auto& c : ast_.comments()) {
      if (c.span.start < end || attached_.count(c.span.start) != 0) continue;
      bool same_line = true;
      for (std::size_t i = end; i < c.span.start; ++i) {
        if (src_[i] == '\n') {
          same_line = false;
          break;
        }
      }
      if (!same_line) continue;
      attached_.insert(c.span.start);
      return c.text;
    }
    return {};
  }

  std::unique_ptr<TypeNode> parse_object_type() {
    const std::size_t start = cur_.start;
    expect("{");
    auto obj = make_type(TypeKind::Object, start);
    std::size_t boundary = prev_end_;
    while (!is("}")) {
      if (cur_.type == Tok::Eof) fail("unterminated object type");
      const std::size_t mstart = cur_.start;
      TypeMember m;
      m.comment = collect_comments(boundary, mstart);
      while (is_word("readonly") || is("+") || is("-")) {
        Token nxt = peek_token();
        if (nxt.type == Tok::Punct && (nxt.value == ":" || nxt.value == "?" || nxt.value == "(")) break;
        advance();
      }
      if (is("[")) {
        // index signature, computed key, or mapped type
        advance();
        if (is_ident()) {
          Token nxt = peek_token();
          if (nxt.type == Tok::Punct && nxt.value == ":") {
            advance();
            advance();
            parse_type();
            expect("]");
            m.is_index_signature = true;
          } else if (nxt.type == Tok::Identifier && nxt.value == "in") {
            advance();
            advance();
            parse_type();
            if (eat_word("as")) parse_type();
            expect("]");
            m.is_index_signature = true;
          } else {
            parse_assignment();
            expect("]");
          }
        } else {
          parse_assignment();
          expect("]");
        }
        if (is("+") || is("-")) advance();
        eat("?");
        if (eat(":")) m.type = parse_type();
      } else if (is("(") || is("<")) {
        auto fn = parse_function_type_signature(mstart);
        m.is_method = true;
        m.type = std::move(fn);
      } else if (is_word("new") && peek_token().value == "(") {
        advance();
        m.is_method = true;
        m.type = parse_function_type_signature(mstart);
      } else {
        if (cur_.type == Tok::String || cur_.type == Tok::Number || is_ident()) {
          m.name = cur_.value;
          advance();
        } else {
          unexpected();
        }
        if (eat("?")) m.optional = true;
        if (is("(") || is("<")) {
          m.is_method = true;
          m.type = parse_function_type_signature(mstart);
        } else if (eat(":")) {
          m.type = parse_type();
        }
      }
      m.span = {mstart, prev_end_};
      const std::size_t member_end = prev_end_;
      if (!eat(";")) eat(",");
      std::string trailing = trailing_comment(member_end);
      if (!trailing.empty()) {
        m.comment = m.comment.empty() ? trailing : m.comment + " " + trailing;
      }
      boundary = prev_end_;
      obj->members.push_back(std::move(m));
    }
    collect_comments(boundary, cur_.start);
    advance();
    obj->span = {start, prev_end_};
    return obj;
  }

  // `(a: T) : R` method / call signature -> Function type node.
  std::unique_ptr<TypeNode> parse_function_type_signature(std::size_t start) {
    auto fn = make_type(TypeKind::Function, start);
    if (is("<")) parse_type_parameters();
    expect("(");
    while (!is(")")) {
      TypeMember p;
      eat("...");
      if (is("{") || is("[")) {
        parse_binding_target();
      } else {
        p.name = expect_ident();
      }
      if (eat("?")) p.optional = true;
      if (eat(":")) p.type = parse_type();
      fn->members.push_back(std::move(p));
      if (!eat(",")) break;
    }
    expect(")");
    if (eat(":")) fn->args.push_back(parse_return_type());
    fn->span = {start, prev_end_};
    return fn;
  }

  std::string_view src_;
  ParseOptions options_;
  ast::Ast ast_;
  detail::Lexer lex_;
  Token cur_;
  std::size_t prev_end_ = 0;
  int speculating_ = 0;
  std::unordered_set<std::size_t> attached_;
};

}  // namespace

ast::Ast parse_program(std::string_view source, ParseOptions options) {
  Parser parser(source, options);
  try {
    return parser.run();
  } catch (const Committed& c) {
    throw c.error;
  }
}

}  // namespace facet
