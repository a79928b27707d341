#pragma once

// Discovery pass: locate the component, resolve its props type and alias
// table, and produce a ComponentSchema.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "facet/ast.hpp"
#include "facet/schema.hpp"

namespace facet {

/// local identifier -> property name
using AliasTable = std::map<std::string, std::string>;

struct ParsedComponent {
  std::shared_ptr<const ast::Ast> tree;
  std::string source;
  std::string filename;
  std::string component_name;

  const ast::Node* function = nullptr;       // arrow / function expression / declaration
  const ast::Node* props_param = nullptr;    // first parameter, unwrapped from defaults
  const ast::TypeNode* props_type = nullptr; // annotation, FC<...> argument or wrapper type arg
  // Identifiers that name the whole props object (`props`, `...rest`).
  std::set<std::string> props_objects;

  AliasTable prop_bindings;
  std::set<std::string> state_vars;
  // Same-file interface / type alias / enum declarations by name.
  std::map<std::string, const ast::Node*, std::less<>> type_decls;
  // `Component.defaultProps = {...}` object, when present.
  const ast::Node* default_props = nullptr;

  std::vector<std::string> warnings;
};

/// Parses `source` and selects the first exported function/arrow component.
/// Throws SyntaxError or NoComponentFound.
ParsedComponent parse_source(std::string_view source, std::string_view filename);

/// Alias table for `pc` (also stored in pc.prop_bindings by parse_source).
AliasTable resolve_aliases(const ParsedComponent& pc);

/// Schema from type annotations and destructuring defaults. Constructs the
/// analyzer cannot type are recorded as kind=string with a warning appended
/// to `warnings` when non-null.
ComponentSchema discover_schema(const ParsedComponent& pc,
                                std::vector<std::string>* warnings = nullptr);

/// Literal expression -> JSON (strings, numbers, booleans, null, and arrays /
/// objects of literals). Returns nullopt for anything computed.
std::optional<Json> literal_value(const ast::Node* expr);

}  // namespace facet
