#include "facet/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "facet/errors.hpp"
#include "facet/parser.hpp"

namespace facet {

using ast::Node;
using ast::NodeKind;
using ast::TypeKind;
using ast::TypeMember;
using ast::TypeNode;

namespace {

bool starts_upper(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0])) != 0;
}

bool contains_jsx(const Node* root) {
  bool found = false;
  ast::walk(root, [&](const Node* n) {
    if (n->kind == NodeKind::JsxElement || n->kind == NodeKind::JsxFragment) found = true;
    return !found;
  });
  return found;
}

bool is_function_node(const Node* n) {
  return n != nullptr && (n->kind == NodeKind::ArrowFunction ||
                          n->kind == NodeKind::FunctionExpression ||
                          n->kind == NodeKind::FunctionDeclaration);
}

std::string dotted_name(const Node* n) {
  n = ast::unwrap(n);
  if (n == nullptr) return {};
  if (n->kind == NodeKind::Identifier) return n->text;
  if (n->kind == NodeKind::Member && !n->computed) {
    std::string base = dotted_name(n->kid(0));
    return base.empty() ? std::string() : base + "." + n->kid(1)->text;
  }
  return {};
}

std::string last_segment(std::string_view dotted) {
  auto pos = dotted.rfind('.');
  return std::string(pos == std::string_view::npos ? dotted : dotted.substr(pos + 1));
}

std::string stem_of(std::string_view filename) {
  auto slash = filename.find_last_of("/\\");
  std::string_view base = slash == std::string_view::npos ? filename : filename.substr(slash + 1);
  auto dot = base.find('.');
  return std::string(dot == std::string_view::npos ? base : base.substr(0, dot));
}

// ---- component discovery ---------------------------------------------------

struct Candidate {
  std::string name;
  const Node* function = nullptr;
  const TypeNode* declared_type = nullptr;  // `const X: FC<P> = ...`
  const TypeNode* wrapper_props = nullptr;  // forwardRef<R, P> / memo<P>
  bool is_class = false;
};

// memo(forwardRef((props, ref) => ...)) and similar.
void unwrap_component_init(const Node* init, Candidate& c) {
  init = ast::unwrap(init);
  for (int depth = 0; init != nullptr && depth < 4; ++depth) {
    if (is_function_node(init)) {
      c.function = init;
      return;
    }
    if (init->kind == NodeKind::ClassExpression) {
      c.is_class = true;
      return;
    }
    if (init->kind != NodeKind::Call || init->kids.size() < 2) return;
    const std::string name = last_segment(dotted_name(init->kid(0)));
    if (c.wrapper_props == nullptr) {
      if (name == "forwardRef" && init->type_args.size() >= 2) {
        c.wrapper_props = init->type_args[1].get();
      } else if (name != "forwardRef" && !init->type_args.empty()) {
        c.wrapper_props = init->type_args[0].get();
      }
    }
    init = ast::unwrap(init->kid(1));
  }
}

const TypeNode* fc_props_argument(const TypeNode* annotation) {
  if (annotation == nullptr || annotation->kind != TypeKind::Reference || annotation->args.empty()) {
    return nullptr;
  }
  const std::string last = last_segment(annotation->name);
  if (last == "ForwardRefRenderFunction" || last == "ForwardRefExoticComponent") {
    return annotation->args.size() >= 2 ? annotation->args[1].get() : nullptr;
  }
  if (last == "FC" || last == "VFC" || last == "FunctionComponent" ||
      last == "VoidFunctionComponent" || last == "ComponentType" || last == "MemoExoticComponent") {
    return annotation->args[0].get();
  }
  return nullptr;
}

bool is_component(const Candidate& c) {
  return c.function != nullptr && starts_upper(c.name) && contains_jsx(c.function);
}

// Top-level declarations keyed by name.
struct TopLevel {
  std::map<std::string, Candidate> bindings;
  std::vector<std::string> order;  // declaration order of bindings
};

void record_declaration(const Node* decl, TopLevel& top) {
  if (decl == nullptr) return;
  if (decl->kind == NodeKind::FunctionDeclaration && !decl->text.empty()) {
    Candidate c;
    c.name = decl->text;
    c.function = decl;
    if (top.bindings.emplace(c.name, c).second) top.order.push_back(c.name);
  } else if (decl->kind == NodeKind::ClassDeclaration && !decl->text.empty()) {
    Candidate c;
    c.name = decl->text;
    c.is_class = true;
    if (top.bindings.emplace(c.name, c).second) top.order.push_back(c.name);
  } else if (decl->kind == NodeKind::VariableDeclaration) {
    for (const Node* d : decl->kids) {
      const Node* target = d->kid(0);
      if (target == nullptr || target->kind != NodeKind::Identifier || d->kid(1) == nullptr) continue;
      Candidate c;
      c.name = target->text;
      c.declared_type = d->type.get();
      unwrap_component_init(d->kid(1), c);
      if (top.bindings.emplace(c.name, c).second) top.order.push_back(c.name);
    }
  }
}

const Node* unwrap_param(const Node* p) {
  if (p != nullptr && p->kind == NodeKind::AssignmentPattern) return p->kid(0);
  return p;
}

// ---- type resolution -------------------------------------------------------

struct Member {
  std::string name;
  bool optional = false;
  bool is_method = false;
  const TypeNode* type = nullptr;
  std::string comment;
  bool force_node = false;  // synthesized `children` from PropsWithChildren
};

struct TypeContext {
  const ParsedComponent& pc;
  std::vector<std::string>& warnings;
  std::set<std::string> resolving;

  void warn(std::string message) {
    if (std::find(warnings.begin(), warnings.end(), message) == warnings.end()) {
      warnings.push_back(std::move(message));
    }
  }
};

bool is_nullish(const TypeNode* t) {
  return t != nullptr && t->kind == TypeKind::Keyword &&
         (t->name == "null" || t->name == "undefined" || t->name == "void" || t->name == "never");
}

bool is_node_type_name(std::string_view name) {
  static const std::set<std::string, std::less<>> kNames{
      "ReactNode", "ReactElement", "Element", "ReactChild", "ReactNodeArray",
      "ReactFragment", "ReactPortal", "ReactChildren"};
  return kNames.count(last_segment(name)) != 0;
}

bool is_function_type_name(std::string_view name) {
  const std::string last = last_segment(name);
  if (last == "Function" || last == "VoidFunction" || last == "Dispatch" || last == "Callback" ||
      last == "Ref" || last == "RefObject" || last == "MutableRefObject" || last == "ForwardedRef" ||
      last == "RefCallback" || last == "LegacyRef") {
    return true;
  }
  auto ends_with = [&](std::string_view suffix) {
    return last.size() >= suffix.size() &&
           last.compare(last.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with("Handler") || ends_with("Callback") || ends_with("Listener");
}

bool is_object_type_name(std::string_view name) {
  const std::string last = last_segment(name);
  return last == "CSSProperties" || last == "Record" || last == "Map" || last == "Object" ||
         last == "HTMLAttributes" || last == "SVGProps";
}

const Node* find_decl(const TypeContext& ctx, std::string_view name) {
  auto it = ctx.pc.type_decls.find(name);
  return it == ctx.pc.type_decls.end() ? nullptr : it->second;
}

void add_member(std::vector<Member>& out, Member m) {
  for (auto& existing : out) {
    if (existing.name == m.name) {
      existing = std::move(m);
      return;
    }
  }
  out.push_back(std::move(m));
}

std::set<std::string> literal_keys(const TypeNode* t) {
  std::set<std::string> keys;
  if (t == nullptr) return keys;
  if (t->kind == TypeKind::StringLiteral) keys.insert(t->text);
  if (t->kind == TypeKind::Union) {
    for (const auto& a : t->args) {
      if (a->kind == TypeKind::StringLiteral) keys.insert(a->text);
    }
  }
  return keys;
}

// Flattens the object members of interfaces, aliases, intersections and the
// common utility types. Returns false when some part could not be resolved.
bool collect_members(TypeContext& ctx, const TypeNode* type, std::vector<Member>& out, int depth) {
  if (type == nullptr || depth > 16) return false;
  switch (type->kind) {
    case TypeKind::Object:
      for (const auto& m : type->members) {
        if (m.is_index_signature || m.name.empty()) continue;
        add_member(out, Member{m.name, m.optional, m.is_method, m.type.get(), m.comment, false});
      }
      return true;
    case TypeKind::Intersection:
    case TypeKind::Union: {
      bool ok = true;
      for (const auto& a : type->args) {
        if (!is_nullish(a.get())) ok = collect_members(ctx, a.get(), out, depth + 1) && ok;
      }
      return ok;
    }
    case TypeKind::Reference: {
      const std::string last = last_segment(type->name);
      if ((last == "Omit" || last == "Pick") && type->args.size() == 2) {
        std::vector<Member> inner;
        const bool ok = collect_members(ctx, type->args[0].get(), inner, depth + 1);
        const auto keys = literal_keys(type->args[1].get());
        for (auto& m : inner) {
          const bool listed = keys.count(m.name) != 0;
          if ((last == "Omit") != listed) add_member(out, std::move(m));
        }
        return ok;
      }
      if ((last == "Partial" || last == "Required" || last == "Readonly") && type->args.size() == 1) {
        std::vector<Member> inner;
        const bool ok = collect_members(ctx, type->args[0].get(), inner, depth + 1);
        for (auto& m : inner) {
          if (last == "Partial") m.optional = true;
          if (last == "Required") m.optional = false;
          add_member(out, std::move(m));
        }
        return ok;
      }
      if (last == "PropsWithChildren") {
        bool ok = type->args.empty() || collect_members(ctx, type->args[0].get(), out, depth + 1);
        Member children;
        children.name = "children";
        children.optional = true;
        children.force_node = true;
        add_member(out, std::move(children));
        return ok;
      }
      const Node* decl = find_decl(ctx, type->name);
      if (decl == nullptr || decl->kind == NodeKind::EnumDeclaration) {
        ctx.warn("props type '" + type->name + "' is not declared in this file");
        return false;
      }
      if (!ctx.resolving.insert(type->name).second) return true;
      bool ok = true;
      if (decl->kind == NodeKind::InterfaceDeclaration) {
        for (const auto& base : decl->heritage) ok = collect_members(ctx, base.get(), out, depth + 1) && ok;
      }
      ok = collect_members(ctx, decl->type.get(), out, depth + 1) && ok;
      ctx.resolving.erase(type->name);
      return ok;
    }
    default:
      ctx.warn("unsupported props type construct");
      return false;
  }
}

void spec_from_type(TypeContext& ctx, const TypeNode* type, PropertySpec& spec, int depth);

std::vector<PropertySpec> fields_from_members(TypeContext& ctx, const std::vector<Member>& members, int depth) {
  std::vector<PropertySpec> fields;
  for (const auto& m : members) {
    PropertySpec field;
    field.name = m.name;
    field.required = !m.optional;
    field.description = m.comment;
    if (m.force_node) {
      field.kind = PropertyKind::Node;
    } else if (m.is_method) {
      field.kind = PropertyKind::Function;
    } else {
      spec_from_type(ctx, m.type, field, depth + 1);
    }
    fields.push_back(std::move(field));
  }
  return fields;
}

void set_fallback(TypeContext& ctx, PropertySpec& spec, const std::string& what) {
  spec.kind = PropertyKind::String;
  spec.allowed_values.clear();
  spec.element_schema.reset();
  ctx.warn(spec.name + ": " + what + "; treated as string");
}

void set_object(TypeContext& ctx, const TypeNode* type, PropertySpec& spec, int depth) {
  spec.kind = PropertyKind::Object;
  std::vector<Member> members;
  if (type != nullptr && depth < 8) collect_members(ctx, type, members, depth + 1);
  spec.element_schema = fields_from_members(ctx, members, depth);
}

void set_array(TypeContext& ctx, const TypeNode* element, PropertySpec& spec, int depth) {
  spec.kind = PropertyKind::Array;
  PropertySpec item;
  item.name = "item";
  item.required = true;
  if (element == nullptr || depth >= 8) {
    item.kind = PropertyKind::String;
  } else {
    spec_from_type(ctx, element, item, depth + 1);
  }
  spec.element_schema = std::vector<PropertySpec>{std::move(item)};
}

bool literal_type(const TypeNode* t, Json& out) {
  switch (t->kind) {
    case TypeKind::StringLiteral:
      out = t->text;
      return true;
    case TypeKind::NumberLiteral:
      if (t->number == static_cast<double>(static_cast<long long>(t->number))) {
        out = static_cast<long long>(t->number);
      } else {
        out = t->number;
      }
      return true;
    case TypeKind::BooleanLiteral:
      out = t->text == "true";
      return true;
    default:
      return false;
  }
}

void enum_values(const Node* decl, std::vector<Json>& values) {
  long long next = 0;
  for (const Node* m : decl->kids) {
    const Node* init = ast::unwrap(m->kid(0));
    if (init == nullptr) {
      values.emplace_back(next++);
    } else if (init->kind == NodeKind::StringLiteral) {
      values.emplace_back(init->text);
    } else if (init->kind == NodeKind::NumberLiteral) {
      next = static_cast<long long>(init->number);
      values.emplace_back(next++);
    } else {
      values.emplace_back(m->text);
    }
  }
}

void spec_from_union(TypeContext& ctx, const TypeNode* type, PropertySpec& spec, int depth) {
  std::vector<const TypeNode*> parts;
  std::function<void(const TypeNode*)> flatten = [&](const TypeNode* t) {
    if (t->kind == TypeKind::Union) {
      for (const auto& a : t->args) flatten(a.get());
    } else if (!is_nullish(t)) {
      parts.push_back(t);
    }
  };
  flatten(type);
  if (parts.empty()) {
    set_fallback(ctx, spec, "only nullish types");
    return;
  }
  if (parts.size() == 1) {
    spec_from_type(ctx, parts[0], spec, depth);
    return;
  }

  std::vector<Json> literals;
  bool all_literal = true;
  bool has_boolean = false;
  for (const TypeNode* p : parts) {
    Json v;
    if (p->kind == TypeKind::Keyword && p->name == "boolean") {
      has_boolean = true;
      literals.emplace_back(true);
      literals.emplace_back(false);
    } else if (literal_type(p, v)) {
      has_boolean = has_boolean || v.is_boolean();
      literals.push_back(std::move(v));
    } else {
      all_literal = false;
    }
  }
  if (all_literal) {
    std::vector<Json> unique;
    for (auto& v : literals) {
      if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
    }
    const bool only_booleans =
        std::all_of(unique.begin(), unique.end(), [](const Json& v) { return v.is_boolean(); });
    if (only_booleans) {
      spec.kind = PropertyKind::Boolean;
    } else {
      spec.kind = PropertyKind::Categorical;
      spec.allowed_values = std::move(unique);
    }
    return;
  }
  (void)has_boolean;

  // Mixed unions: classify each arm and pick the dominant shape.
  std::vector<PropertySpec> arms;
  for (const TypeNode* p : parts) {
    PropertySpec arm;
    arm.name = spec.name;
    std::vector<std::string> scratch;
    TypeContext quiet{ctx.pc, scratch, ctx.resolving};
    spec_from_type(quiet, p, arm, depth + 1);
    arms.push_back(std::move(arm));
  }
  auto any_kind = [&](PropertyKind k) {
    return std::any_of(arms.begin(), arms.end(), [&](const PropertySpec& a) { return a.kind == k; });
  };
  auto all_kind = [&](PropertyKind k) {
    return std::all_of(arms.begin(), arms.end(), [&](const PropertySpec& a) { return a.kind == k; });
  };
  if (any_kind(PropertyKind::Node)) {
    spec.kind = PropertyKind::Node;
  } else if (all_kind(PropertyKind::Function)) {
    spec.kind = PropertyKind::Function;
  } else if (all_kind(PropertyKind::Number) ||
             (any_kind(PropertyKind::Number) &&
              std::all_of(arms.begin(), arms.end(), [](const PropertySpec& a) {
                return a.kind == PropertyKind::Number ||
                       (a.kind == PropertyKind::Categorical &&
                        std::all_of(a.allowed_values.begin(), a.allowed_values.end(),
                                    [](const Json& v) { return v.is_number(); }));
              }))) {
    spec.kind = PropertyKind::Number;
  } else if (all_kind(PropertyKind::Object)) {
    set_object(ctx, type, spec, depth);
  } else if (any_kind(PropertyKind::Array) && std::all_of(arms.begin(), arms.end(), [](const PropertySpec& a) {
               return a.kind == PropertyKind::Array;
             })) {
    spec.kind = PropertyKind::Array;
    spec.element_schema = arms.front().element_schema;
  } else if (std::all_of(arms.begin(), arms.end(), [](const PropertySpec& a) {
               return a.kind == PropertyKind::String || a.kind == PropertyKind::Categorical;
             })) {
    // `"sm" | "md" | string` is an open string.
    spec.kind = PropertyKind::String;
  } else {
    set_fallback(ctx, spec, "union of unrelated types");
  }
}

void spec_from_type(TypeContext& ctx, const TypeNode* type, PropertySpec& spec, int depth) {
  spec.allowed_values.clear();
  spec.element_schema.reset();
  if (type == nullptr) {
    set_fallback(ctx, spec, "no type annotation");
    return;
  }
  if (depth > 24) {
    set_fallback(ctx, spec, "type nesting too deep");
    return;
  }
  switch (type->kind) {
    case TypeKind::Keyword:
      if (type->name == "boolean") {
        spec.kind = PropertyKind::Boolean;
      } else if (type->name == "number" || type->name == "bigint") {
        spec.kind = PropertyKind::Number;
      } else if (type->name == "string") {
        spec.kind = PropertyKind::String;
      } else if (type->name == "object") {
        set_object(ctx, nullptr, spec, depth);
      } else {
        set_fallback(ctx, spec, "type '" + type->name + "' is not analyzable");
      }
      return;
    case TypeKind::StringLiteral:
    case TypeKind::NumberLiteral: {
      Json v;
      literal_type(type, v);
      spec.kind = PropertyKind::Categorical;
      spec.allowed_values = {v};
      return;
    }
    case TypeKind::BooleanLiteral:
      spec.kind = PropertyKind::Boolean;
      return;
    case TypeKind::Union:
      spec_from_union(ctx, type, spec, depth);
      return;
    case TypeKind::Intersection:
    case TypeKind::Object:
      set_object(ctx, type, spec, depth);
      return;
    case TypeKind::Array:
      set_array(ctx, type->args.empty() ? nullptr : type->args[0].get(), spec, depth);
      return;
    case TypeKind::Tuple:
      set_array(ctx, type->args.empty() ? nullptr : type->args[0].get(), spec, depth);
      return;
    case TypeKind::Function:
      spec.kind = PropertyKind::Function;
      return;
    case TypeKind::Template:
      spec.kind = PropertyKind::String;
      return;
    case TypeKind::Keyof: {
      const TypeNode* target = type->args.empty() ? nullptr : type->args[0].get();
      if (target != nullptr) {
        std::vector<Member> members;
        if (target->kind == TypeKind::Typeof) {
          // keyof typeof OBJ: keys of a same-file const object literal.
          auto it = ctx.pc.type_decls.find("value:" + target->name);
          if (it != ctx.pc.type_decls.end()) {
            const Node* obj = ast::unwrap(it->second);
            for (const Node* p : obj->kids) {
              if (p->kind != NodeKind::Property || p->computed) continue;
              const Node* key = p->kid(0);
              if (key != nullptr) spec.allowed_values.emplace_back(key->text);
            }
          }
        } else if (collect_members(ctx, target, members, depth + 1)) {
          for (const auto& m : members) spec.allowed_values.emplace_back(m.name);
        }
        if (!spec.allowed_values.empty()) {
          spec.kind = PropertyKind::Categorical;
          return;
        }
      }
      set_fallback(ctx, spec, "keyof target is not resolvable");
      return;
    }
    case TypeKind::Reference: {
      const std::string last = last_segment(type->name);
      if (is_node_type_name(type->name)) {
        spec.kind = PropertyKind::Node;
        return;
      }
      if (is_function_type_name(type->name)) {
        spec.kind = PropertyKind::Function;
        return;
      }
      if (last == "Array" || last == "ReadonlyArray") {
        set_array(ctx, type->args.empty() ? nullptr : type->args[0].get(), spec, depth);
        return;
      }
      if (last == "Partial" || last == "Required" || last == "Readonly" || last == "Pick" ||
          last == "Omit" || last == "PropsWithChildren") {
        if (last == "Readonly" && !type->args.empty() && type->args[0]->kind == TypeKind::Array) {
          spec_from_type(ctx, type->args[0].get(), spec, depth + 1);
          return;
        }
        set_object(ctx, type, spec, depth);
        return;
      }
      if (is_object_type_name(type->name)) {
        spec.kind = PropertyKind::Object;
        spec.element_schema = std::vector<PropertySpec>{};
        return;
      }
      const Node* decl = find_decl(ctx, type->name);
      if (decl == nullptr) {
        set_fallback(ctx, spec, "type '" + type->name + "' is not declared in this file");
        return;
      }
      if (decl->kind == NodeKind::EnumDeclaration) {
        spec.kind = PropertyKind::Categorical;
        enum_values(decl, spec.allowed_values);
        return;
      }
      if (!ctx.resolving.insert(type->name).second) {
        set_fallback(ctx, spec, "recursive type '" + type->name + "'");
        return;
      }
      if (decl->kind == NodeKind::InterfaceDeclaration) {
        set_object(ctx, type, spec, depth);
      } else {
        spec_from_type(ctx, decl->type.get(), spec, depth + 1);
      }
      ctx.resolving.erase(type->name);
      return;
    }
    default:
      set_fallback(ctx, spec, "type construct is not analyzable");
      return;
  }
}

// ---- props bindings ----------------------------------------------------------

struct BindingScan {
  AliasTable aliases;
  std::set<std::string> props_objects;
  std::set<std::string> state_vars;
  // Destructured keys with their default expressions (nullptr if none).
  std::vector<std::pair<std::string, const Node*>> destructured;
};

std::string property_key(const Node* prop) {
  const Node* key = prop->kid(0);
  if (key == nullptr || prop->computed) return {};
  return key->text;
}

void bind_pattern_to_prop(const Node* pattern, const std::string& prop, BindingScan& scan) {
  if (pattern == nullptr) return;
  if (pattern->kind == NodeKind::Identifier) {
    scan.aliases[pattern->text] = prop;
  } else if (pattern->kind == NodeKind::AssignmentPattern) {
    bind_pattern_to_prop(pattern->kid(0), prop, scan);
  } else if (pattern->kind == NodeKind::ObjectPattern || pattern->kind == NodeKind::ArrayPattern) {
    // Nested destructuring: every binding below still comes from `prop`.
    for (const Node* k : pattern->kids) {
      if (k == nullptr) continue;
      if (k->kind == NodeKind::Property) {
        bind_pattern_to_prop(k->kid(1), prop, scan);
      } else {
        bind_pattern_to_prop(k->kind == NodeKind::RestElement ? k->kid(0) : k, prop, scan);
      }
    }
  }
}

void destructure_props(const Node* pattern, BindingScan& scan) {
  for (const Node* k : pattern->kids) {
    if (k->kind == NodeKind::RestElement) {
      const Node* target = k->kid(0);
      if (target != nullptr && target->kind == NodeKind::Identifier) scan.props_objects.insert(target->text);
      continue;
    }
    if (k->kind != NodeKind::Property) continue;
    const std::string key = property_key(k);
    if (key.empty()) continue;
    const Node* value = k->kid(1);
    const Node* def = nullptr;
    if (value != nullptr && value->kind == NodeKind::AssignmentPattern) def = value->kid(1);
    scan.destructured.emplace_back(key, def);
    bind_pattern_to_prop(value, key, scan);
  }
}

bool is_props_object(const Node* expr, const BindingScan& scan) {
  expr = ast::unwrap(expr);
  return expr != nullptr && expr->kind == NodeKind::Identifier && scan.props_objects.count(expr->text) != 0;
}

void scan_bindings(const ParsedComponent& pc, BindingScan& scan) {
  const Node* param = pc.props_param;
  if (param != nullptr) {
    if (param->kind == NodeKind::Identifier) {
      scan.props_objects.insert(param->text);
    } else if (param->kind == NodeKind::ObjectPattern) {
      destructure_props(param, scan);
    }
  }
  if (pc.function == nullptr) return;

  // Declarations in source order; nested functions are included since they
  // close over the same bindings.
  std::vector<const Node*> declarators;
  ast::walk(pc.function->body, [&](const Node* n) {
    if (n->kind == NodeKind::VariableDeclarator) declarators.push_back(n);
    return true;
  });
  std::set<std::string> direct;  // locals bound straight from props
  for (const auto& [local, prop] : scan.aliases) direct.insert(local);

  for (const Node* d : declarators) {
    const Node* target = d->kid(0);
    const Node* init = ast::unwrap(d->kid(1));
    if (target == nullptr || init == nullptr) continue;
    if (target->kind == NodeKind::ObjectPattern && is_props_object(init, scan)) {
      const auto before = scan.aliases;
      destructure_props(target, scan);
      for (const auto& [local, prop] : scan.aliases) {
        if (before.count(local) == 0) direct.insert(local);
      }
    } else if (target->kind == NodeKind::Identifier && init->kind == NodeKind::Member && !init->computed &&
               is_props_object(init->kid(0), scan)) {
      scan.aliases[target->text] = init->kid(1)->text;
      direct.insert(target->text);
    } else if (target->kind == NodeKind::Identifier && init->kind == NodeKind::Identifier &&
               direct.count(init->text) != 0) {
      scan.aliases[target->text] = scan.aliases[init->text];
    } else if (target->kind == NodeKind::Identifier && is_props_object(init, scan)) {
      scan.props_objects.insert(target->text);
    } else if (target->kind == NodeKind::ArrayPattern && init->kind == NodeKind::Call) {
      const std::string callee = last_segment(dotted_name(init->kid(0)));
      if (callee == "useState" || callee == "useReducer") {
        const Node* first = target->kid(0);
        if (first != nullptr && first->kind == NodeKind::Identifier) scan.state_vars.insert(first->text);
      }
    }
  }

  // Reassigned aliases no longer track the prop, except identity bindings.
  ast::walk(pc.function->body, [&](const Node* n) {
    const Node* target = nullptr;
    if (n->kind == NodeKind::Assignment) target = n->kid(0);
    if (n->kind == NodeKind::Update) target = n->kid(0);
    target = ast::unwrap(target);
    if (target != nullptr && target->kind == NodeKind::Identifier) {
      auto it = scan.aliases.find(target->text);
      if (it != scan.aliases.end() && it->first != it->second) scan.aliases.erase(it);
    }
    return true;
  });
}

std::string props_type_label(const TypeNode* t) {
  if (t == nullptr) return "(none)";
  if (t->kind == TypeKind::Reference) return t->name;
  return "inline type";
}

}  // namespace

// ---- public API --------------------------------------------------------------

std::optional<Json> literal_value(const Node* expr) {
  expr = ast::unwrap(expr);
  if (expr == nullptr) return std::nullopt;
  switch (expr->kind) {
    case NodeKind::StringLiteral:
      return Json(expr->text);
    case NodeKind::NumberLiteral:
      if (expr->is_integer && expr->number <= 9007199254740992.0) {
        return Json(static_cast<long long>(expr->number));
      }
      return Json(expr->number);
    case NodeKind::BooleanLiteral:
      return Json(expr->text == "true");
    case NodeKind::NullLiteral:
      return Json(nullptr);
    case NodeKind::TemplateLiteral:
      if (expr->kids.empty() && expr->quasis.size() == 1) return Json(expr->quasis[0]);
      return std::nullopt;
    case NodeKind::Unary: {
      if (expr->text != "-" && expr->text != "+") return std::nullopt;
      auto inner = literal_value(expr->kid(0));
      if (!inner || !inner->is_number()) return std::nullopt;
      if (expr->text == "+") return inner;
      if (inner->is_number_integer()) return Json(-inner->get<long long>());
      return Json(-inner->get<double>());
    }
    case NodeKind::ArrayExpression: {
      Json arr = Json::array();
      for (const Node* k : expr->kids) {
        auto v = literal_value(k);
        if (!v) return std::nullopt;
        arr.push_back(std::move(*v));
      }
      return arr;
    }
    case NodeKind::ObjectExpression: {
      Json obj = Json::object();
      for (const Node* p : expr->kids) {
        if (p->kind != NodeKind::Property || p->computed || p->shorthand || p->is_async) return std::nullopt;
        const Node* key = p->kid(0);
        auto v = literal_value(p->kid(1));
        if (key == nullptr || !v) return std::nullopt;
        obj[key->text] = std::move(*v);
      }
      return obj;
    }
    default:
      return std::nullopt;
  }
}

ParsedComponent parse_source(std::string_view source, std::string_view filename) {
  auto tree = std::make_shared<ast::Ast>(parse_program(source, options_for_filename(filename)));
  ParsedComponent pc;
  pc.source = std::string(source);
  pc.filename = std::string(filename);

  const Node* root = tree->root();
  TopLevel top;
  std::vector<const Node*> statements;
  for (const Node* s : root->kids) {
    const Node* decl = s;
    if ((s->kind == NodeKind::ExportNamed || s->kind == NodeKind::ExportDefault) && s->kid(0) != nullptr) {
      decl = s->kid(0);
    }
    statements.push_back(s);
    switch (decl->kind) {
      case NodeKind::InterfaceDeclaration:
      case NodeKind::TypeAlias:
      case NodeKind::EnumDeclaration:
        pc.type_decls.emplace(decl->text, decl);
        break;
      case NodeKind::VariableDeclaration:
        for (const Node* d : decl->kids) {
          const Node* t = d->kid(0);
          const Node* init = ast::unwrap(d->kid(1));
          if (t != nullptr && t->kind == NodeKind::Identifier && init != nullptr &&
              init->kind == NodeKind::ObjectExpression) {
            pc.type_decls.emplace("value:" + t->text, init);
          }
        }
        record_declaration(decl, top);
        break;
      default:
        record_declaration(decl, top);
        break;
    }
  }

  // Exported candidates in source order.
  std::vector<Candidate> exported;
  bool saw_class = false;
  auto consider = [&](Candidate c) {
    if (c.is_class) {
      saw_class = true;
      return;
    }
    if (is_component(c)) exported.push_back(std::move(c));
  };
  auto lookup = [&](const std::string& name) -> std::optional<Candidate> {
    auto it = top.bindings.find(name);
    if (it == top.bindings.end()) return std::nullopt;
    return it->second;
  };
  for (const Node* s : statements) {
    if (s->kind == NodeKind::ExportNamed) {
      const Node* decl = s->kid(0);
      if (decl != nullptr) {
        if (decl->kind == NodeKind::FunctionDeclaration || decl->kind == NodeKind::ClassDeclaration) {
          if (auto c = lookup(decl->text)) consider(*c);
        } else if (decl->kind == NodeKind::VariableDeclaration) {
          for (const Node* d : decl->kids) {
            const Node* t = d->kid(0);
            if (t != nullptr && t->kind == NodeKind::Identifier) {
              if (auto c = lookup(t->text)) consider(*c);
            }
          }
        }
      }
      for (const auto& [local, exported_as] : s->names) {
        if (auto c = lookup(local)) {
          c->name = exported_as == "default" ? c->name : exported_as;
          consider(*c);
        }
      }
    } else if (s->kind == NodeKind::ExportDefault) {
      const Node* target = s->kid(0);
      if (target == nullptr) continue;
      if (target->kind == NodeKind::ClassDeclaration) {
        saw_class = true;
        continue;
      }
      if (target->kind == NodeKind::FunctionDeclaration) {
        Candidate c;
        c.name = target->text.empty() ? stem_of(filename) : target->text;
        c.function = target;
        consider(c);
        continue;
      }
      const Node* expr = ast::unwrap(target);
      if (expr->kind == NodeKind::Identifier) {
        if (auto c = lookup(expr->text)) consider(*c);
        continue;
      }
      Candidate c;
      c.name = stem_of(filename);
      unwrap_component_init(expr, c);
      if (c.function == nullptr && expr->kind == NodeKind::Call) {
        // export default memo(Card)
        const Node* arg = ast::unwrap(expr->kid(1));
        if (arg != nullptr && arg->kind == NodeKind::Identifier) {
          if (auto inner = lookup(arg->text)) {
            if (c.wrapper_props != nullptr && inner->declared_type == nullptr) inner->wrapper_props = c.wrapper_props;
            consider(*inner);
            continue;
          }
        }
      }
      consider(c);
    }
  }

  std::optional<Candidate> chosen;
  if (!exported.empty()) {
    chosen = exported.front();
  } else {
    for (const auto& name : top.order) {
      const Candidate& c = top.bindings.at(name);
      if (!c.is_class && is_component(c)) {
        chosen = c;
        break;
      }
    }
  }
  if (!chosen) {
    throw NoComponentFound(saw_class ? "only class components found; function components are required"
                                     : "no function component found in " + std::string(filename));
  }

  pc.component_name = chosen->name;
  pc.function = chosen->function;
  pc.props_param = pc.function->params.empty() ? nullptr : unwrap_param(pc.function->params[0]);
  if (pc.props_param != nullptr && pc.props_param->type != nullptr) {
    pc.props_type = pc.props_param->type.get();
  } else if (const TypeNode* fc = fc_props_argument(chosen->declared_type)) {
    pc.props_type = fc;
  } else {
    pc.props_type = chosen->wrapper_props;
  }

  // Component.defaultProps = {...}
  for (const Node* s : root->kids) {
    if (s->kind != NodeKind::ExpressionStatement) continue;
    const Node* e = ast::unwrap(s->kid(0));
    if (e == nullptr || e->kind != NodeKind::Assignment || e->text != "=") continue;
    if (dotted_name(e->kid(0)) == pc.component_name + ".defaultProps") {
      const Node* value = ast::unwrap(e->kid(1));
      if (value != nullptr && value->kind == NodeKind::ObjectExpression) pc.default_props = value;
    }
  }

  pc.tree = std::move(tree);
  BindingScan scan;
  scan_bindings(pc, scan);
  pc.prop_bindings = std::move(scan.aliases);
  pc.props_objects = std::move(scan.props_objects);
  pc.state_vars = std::move(scan.state_vars);
  return pc;
}

AliasTable resolve_aliases(const ParsedComponent& pc) {
  BindingScan scan;
  scan_bindings(pc, scan);
  return scan.aliases;
}

ComponentSchema discover_schema(const ParsedComponent& pc, std::vector<std::string>* warnings) {
  std::vector<std::string> local_warnings = pc.warnings;
  TypeContext ctx{pc, local_warnings, {}};

  BindingScan scan;
  scan_bindings(pc, scan);

  // Defaults: destructuring first, then defaultProps for anything left.
  std::map<std::string, const Node*> default_exprs;
  for (const auto& [key, def] : scan.destructured) {
    if (def != nullptr) default_exprs.emplace(key, def);
  }
  if (pc.default_props != nullptr) {
    for (const Node* p : pc.default_props->kids) {
      if (p->kind != NodeKind::Property) continue;
      const std::string key = property_key(p);
      if (!key.empty()) default_exprs.emplace(key, p->kid(1));
    }
  }

  std::vector<Member> members;
  bool typed = false;
  if (pc.props_type != nullptr) {
    typed = collect_members(ctx, pc.props_type, members, 0);
    if (!typed) ctx.warn("props type " + props_type_label(pc.props_type) + " only partially resolved");
  }
  if (!typed) {
    // Untyped or partially typed: fall back to destructured keys.
    for (const auto& [key, def] : scan.destructured) {
      const bool known = std::any_of(members.begin(), members.end(), [&](const Member& m) { return m.name == key; });
      if (known) continue;
      Member m;
      m.name = key;
      m.optional = true;
      add_member(members, std::move(m));
    }
  }

  ComponentSchema schema;
  schema.component_name = pc.component_name;
  schema.source_digest = source_digest(pc.source);

  for (const Member& m : members) {
    PropertySpec spec;
    spec.name = m.name;
    spec.description = m.comment;
    auto def_it = default_exprs.find(m.name);
    const bool has_default = def_it != default_exprs.end();
    std::optional<Json> def_value = has_default ? literal_value(def_it->second) : std::nullopt;
    if (def_value && def_value->is_null()) def_value.reset();

    if (m.force_node) {
      spec.kind = PropertyKind::Node;
    } else if (m.is_method) {
      spec.kind = PropertyKind::Function;
    } else if (m.type == nullptr && def_value) {
      // Untyped destructured prop: infer from the default literal.
      if (def_value->is_boolean()) {
        spec.kind = PropertyKind::Boolean;
      } else if (def_value->is_number()) {
        spec.kind = PropertyKind::Number;
      } else if (def_value->is_string()) {
        spec.kind = PropertyKind::String;
      } else if (def_value->is_array()) {
        spec.kind = PropertyKind::Array;
        PropertySpec item;
        item.name = "item";
        item.kind = PropertyKind::String;
        spec.element_schema = std::vector<PropertySpec>{item};
      } else {
        spec.kind = PropertyKind::Object;
        spec.element_schema = std::vector<PropertySpec>{};
      }
    } else if (m.type == nullptr && has_default && is_function_node(ast::unwrap(def_it->second))) {
      spec.kind = PropertyKind::Function;
    } else {
      spec_from_type(ctx, m.type, spec, 0);
    }

    spec.required = !m.optional && !has_default;
    if (def_value && spec.kind != PropertyKind::Function && spec.kind != PropertyKind::Node) {
      if (!json_matches_kind(spec, *def_value)) {
        ctx.warn(spec.name + ": default value does not match kind " + std::string(to_string(spec.kind)) +
                 "; ignored");
      } else if (spec.kind == PropertyKind::Categorical &&
                 std::find(spec.allowed_values.begin(), spec.allowed_values.end(), *def_value) ==
                     spec.allowed_values.end()) {
        ctx.warn(spec.name + ": default value is not an allowed value; ignored");
      } else {
        spec.default_value = std::move(def_value);
      }
    }
    schema.properties.push_back(std::move(spec));
  }

  schema.has_children = schema.find("children") != nullptr || scan.aliases.count("children") != 0;
  if (!schema.has_children) {
    ast::walk(pc.function, [&](const Node* n) {
      if (n->kind == NodeKind::Member && !n->computed && n->kid(1) != nullptr &&
          n->kid(1)->text == "children" && is_props_object(n->kid(0), scan)) {
        schema.has_children = true;
      }
      return !schema.has_children;
    });
  }

  if (warnings != nullptr) {
    warnings->insert(warnings->end(), local_warnings.begin(), local_warnings.end());
  }
  return schema;
}

}  // namespace facet
