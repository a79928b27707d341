#pragma once

// Syntax tree for the TSX/JSX subset facet analyzes. Nodes live in an arena
// owned by `Ast`; raw `const Node*` handles stay valid for the arena's life.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facet/schema.hpp"

namespace facet::ast {

enum class TypeKind {
  Keyword,        // name: string, number, boolean, any, unknown, void, null, undefined, never, object, bigint, symbol
  StringLiteral,  // text
  NumberLiteral,  // text (source spelling), number
  BooleanLiteral, // text: "true"/"false"
  Reference,      // name (dotted), args
  Union,          // args
  Intersection,   // args
  Array,          // args[0] element
  Tuple,          // args
  Object,         // members
  Function,       // members (params), args[0] return type
  Typeof,         // name
  Keyof,          // args[0]
  IndexedAccess,  // args[0] object, args[1] index
  Template,       // template literal type
  Conditional,    // unsupported, kept opaque
};

struct TypeMember;

struct TypeNode {
  TypeKind kind = TypeKind::Keyword;
  Span span;
  std::string name;
  std::string text;
  double number = 0.0;
  std::vector<std::unique_ptr<TypeNode>> args;
  std::vector<TypeMember> members;
};

struct TypeMember {
  std::string name;
  bool optional = false;
  bool is_method = false;
  bool is_index_signature = false;
  std::unique_ptr<TypeNode> type;  // may be null (untyped)
  std::string comment;             // leading + same-line trailing comments
  Span span;
};

enum class NodeKind {
  Program,
  // statements / declarations
  ImportDeclaration,
  ExportNamed,        // kids[0] declaration (or null for `export { a, b }`), names in `names`
  ExportDefault,      // kids[0] expression or declaration
  VariableDeclaration,  // text: const/let/var, kids: VariableDeclarator
  VariableDeclarator,   // kids[0] pattern, kids[1] init (nullable)
  FunctionDeclaration,  // text name, params, body
  ClassDeclaration,     // text name, kids[0] superclass (nullable)
  TypeAlias,            // text name, type
  InterfaceDeclaration, // text name, type (Object), heritage: extends list
  EnumDeclaration,      // text name, kids: EnumMember
  EnumMember,           // text name, kids[0] init (nullable)
  Block,
  Return,        // kids[0] nullable
  If,            // kids[0] test, kids[1] consequent, kids[2] alternate (nullable)
  Switch,        // kids[0] discriminant, kids[1..] SwitchCase
  SwitchCase,    // kids[0] test (nullable for default), kids[1..] statements
  For,           // kids[0] init, kids[1] test, kids[2] update, kids[3] body (nullable entries)
  ForOf,         // text "of"/"in", kids[0] left, kids[1] right, kids[2] body
  While,         // kids[0] test, kids[1] body
  DoWhile,       // kids[0] body, kids[1] test
  Try,           // kids[0] block, kids[1] catch param (nullable), kids[2] handler (nullable), kids[3] finalizer (nullable)
  Throw,
  Break,
  Continue,
  ExpressionStatement,
  Empty,
  // expressions
  Identifier,
  NumberLiteral,   // text spelling, number, is_integer
  StringLiteral,   // text (decoded)
  BooleanLiteral,  // text
  NullLiteral,
  RegexLiteral,
  TemplateLiteral,  // quasis (decoded), kids expressions
  TaggedTemplate,   // kids[0] tag, kids[1] TemplateLiteral
  ArrayExpression,  // kids (nullable holes)
  ObjectExpression, // kids: Property / SpreadElement
  Property,         // kids[0] key, kids[1] value; computed, shorthand, is_method
  SpreadElement,    // kids[0]
  Member,           // kids[0] object, kids[1] property (Identifier unless computed); optional
  Call,             // kids[0] callee, kids[1..] args; optional
  New,              // kids[0] callee, kids[1..] args
  Unary,            // text op, kids[0]
  Update,           // text op, kids[0]; prefix
  Binary,           // text op, kids[0], kids[1]
  Logical,          // text op (&&, ||, ??), kids[0], kids[1]
  Conditional,      // kids[0] test, kids[1] consequent, kids[2] alternate
  Assignment,       // text op, kids[0] target, kids[1] value
  Sequence,
  ArrowFunction,    // params, body (Block or expression)
  FunctionExpression,  // text name (may be empty), params, body
  ClassExpression,
  Parenthesized,    // kids[0]
  TypeCast,         // `as` / `satisfies` / `!` / <T>x; text op, kids[0]; type
  Await,
  Yield,
  // patterns
  ObjectPattern,    // kids: Property (value = pattern) / RestElement
  ArrayPattern,     // kids (nullable holes)
  AssignmentPattern,  // kids[0] target, kids[1] default
  RestElement,        // kids[0]
  // JSX
  JsxElement,        // text tag name (dotted), kids[0] JsxName, attrs, children
  JsxFragment,       // children
  JsxName,           // text
  JsxAttribute,      // text name, kids[0] value (StringLiteral / JsxExpressionContainer / JsxElement) nullable
  JsxSpreadAttribute,  // kids[0]
  JsxExpressionContainer,  // kids[0] nullable (empty `{}` / comment)
  JsxText,           // text raw
};

struct Node {
  NodeKind kind = NodeKind::Empty;
  Span span;
  std::string text;
  double number = 0.0;
  bool is_integer = false;
  bool computed = false;
  bool shorthand = false;
  bool optional = false;
  bool prefix = false;
  bool is_async = false;
  std::vector<Node*> kids;
  // functions
  std::vector<Node*> params;
  Node* body = nullptr;
  // JSX elements
  std::vector<Node*> attributes;
  std::vector<Node*> children;
  // template literals
  std::vector<std::string> quasis;
  // export { a as b }: pairs local, exported
  std::vector<std::pair<std::string, std::string>> names;
  // interface heritage
  std::vector<std::unique_ptr<TypeNode>> heritage;
  // type annotation (params, declarators, return type, aliases, casts)
  std::unique_ptr<TypeNode> type;
  std::unique_ptr<TypeNode> return_type;
  // type arguments on calls / JSX / heritage
  std::vector<std::unique_ptr<TypeNode>> type_args;
  std::string comment;  // leading comment for members / declarations

  Node* kid(std::size_t i) const { return i < kids.size() ? kids[i] : nullptr; }
};

struct Comment {
  Span span;
  std::string text;  // without delimiters, trimmed
  bool line = true;  // `//` vs `/* */`
};

class Ast {
 public:
  Node* make(NodeKind kind, Span span) {
    nodes_.push_back(std::make_unique<Node>());
    Node* n = nodes_.back().get();
    n->kind = kind;
    n->span = span;
    return n;
  }

  Node* root() const { return root_; }
  void set_root(Node* root) { root_ = root; }
  std::vector<Comment>& comments() { return comments_; }
  const std::vector<Comment>& comments() const { return comments_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<Comment> comments_;
  Node* root_ = nullptr;
};

/// Visits every node below `root` (pre-order), including function bodies
/// and JSX attributes/children. Return false from `fn` to skip a subtree.
template <typename Fn>
void walk(const Node* root, Fn&& fn) {
  if (root == nullptr) return;
  if (!fn(root)) return;
  for (const Node* k : root->kids) walk(k, fn);
  for (const Node* p : root->params) walk(p, fn);
  walk(root->body, fn);
  for (const Node* a : root->attributes) walk(a, fn);
  for (const Node* c : root->children) walk(c, fn);
}

/// Strips parentheses and TypeScript casts.
inline const Node* unwrap(const Node* n) {
  while (n != nullptr &&
         (n->kind == NodeKind::Parenthesized || n->kind == NodeKind::TypeCast)) {
    n = n->kid(0);
  }
  return n;
}

}  // namespace facet::ast
