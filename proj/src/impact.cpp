#include "facet/impact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace facet {

using ast::Node;
using ast::NodeKind;

namespace {

constexpr std::size_t kSnippetBytes = 200;

using Props = std::set<std::string>;
using Shadow = std::set<std::string>;

void binding_names(const Node* pattern, std::vector<std::string>& out) {
  if (pattern == nullptr) return;
  switch (pattern->kind) {
    case NodeKind::Identifier:
      out.push_back(pattern->text);
      break;
    case NodeKind::AssignmentPattern:
    case NodeKind::RestElement:
      binding_names(pattern->kid(0), out);
      break;
    case NodeKind::Property:
      binding_names(pattern->kid(1) != nullptr ? pattern->kid(1) : pattern->kid(0), out);
      break;
    case NodeKind::ObjectPattern:
    case NodeKind::ArrayPattern:
      for (const Node* k : pattern->kids) binding_names(k, out);
      break;
    default:
      break;
  }
}

bool is_function(const Node* n) {
  return n != nullptr && (n->kind == NodeKind::ArrowFunction || n->kind == NodeKind::FunctionExpression ||
                          n->kind == NodeKind::FunctionDeclaration);
}

bool contains_jsx(const Node* root) {
  bool found = false;
  ast::walk(root, [&](const Node* n) {
    if (n->kind == NodeKind::JsxElement || n->kind == NodeKind::JsxFragment) found = true;
    return !found;
  });
  return found;
}

// A branch of an if/switch that renders: contains JSX or returns null.
bool branch_renders(const Node* branch) {
  if (branch == nullptr) return false;
  if (contains_jsx(branch)) return true;
  bool null_return = false;
  ast::walk(branch, [&](const Node* n) {
    if (is_function(n)) return false;
    if (n->kind == NodeKind::Return) {
      const Node* v = ast::unwrap(n->kid(0));
      if (v != nullptr && v->kind == NodeKind::NullLiteral) null_return = true;
    }
    return !null_return;
  });
  return null_return;
}

class FlowTracer {
 public:
  FlowTracer(const ParsedComponent& pc, const ComponentSchema& schema) : pc_(pc), schema_(schema) {
    collect_locals();
  }

  std::vector<ViContextOccurrence> run() {
    if (pc_.function != nullptr) visit(pc_.function->body, {});
    std::vector<ViContextOccurrence> out;
    for (const auto& spec : schema_.properties) {
      std::vector<ViContextOccurrence> mine;
      for (const auto& [key, kind] : found_) {
        if (key.first != spec.name) continue;
        const Node* node = key.second;
        ViContextOccurrence occ;
        occ.property = spec.name;
        occ.kind = kind;
        occ.span = node->span;
        occ.snippet = truncate_utf8(
            std::string_view(pc_.source).substr(node->span.start, node->span.end - node->span.start),
            kSnippetBytes);
        mine.push_back(std::move(occ));
      }
      std::stable_sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) {
        return a.span.start != b.span.start ? a.span.start < b.span.start : a.span.end < b.span.end;
      });
      out.insert(out.end(), mine.begin(), mine.end());
    }
    return out;
  }

 private:
  bool declared(const std::string& prop) const { return schema_.find(prop) != nullptr; }

  const PropertySpec* prop_of_identifier(const std::string& name) const {
    auto it = pc_.prop_bindings.find(name);
    return it == pc_.prop_bindings.end() ? nullptr : schema_.find(it->second);
  }

  // props.foo / props?.foo / props["foo"]
  std::optional<std::string> props_member(const Node* e, const Shadow& sh) const {
    e = ast::unwrap(e);
    if (e == nullptr || e->kind != NodeKind::Member) return std::nullopt;
    const Node* obj = ast::unwrap(e->kid(0));
    if (obj == nullptr || obj->kind != NodeKind::Identifier || sh.count(obj->text) != 0 ||
        pc_.props_objects.count(obj->text) == 0) {
      return std::nullopt;
    }
    const Node* key = e->kid(1);
    if (key == nullptr) return std::nullopt;
    if (e->computed && key->kind != NodeKind::StringLiteral) return std::nullopt;
    return key->text;
  }

  void resolve_identifier(const std::string& name, const Shadow& sh, Props& out) const {
    if (sh.count(name) != 0) return;
    auto alias = pc_.prop_bindings.find(name);
    if (alias != pc_.prop_bindings.end()) {
      if (declared(alias->second)) out.insert(alias->second);
      return;
    }
    auto d = derived_.find(name);
    if (d != derived_.end()) out.insert(d->second.begin(), d->second.end());
  }

  static Shadow extend(const Shadow& sh, const Node* fn) {
    Shadow out = sh;
    std::vector<std::string> names;
    for (const Node* p : fn->params) binding_names(p, names);
    if (fn->kind != NodeKind::ArrowFunction && !fn->text.empty()) names.push_back(fn->text);
    out.insert(names.begin(), names.end());
    return out;
  }

  bool produces_jsx(const Node* e, const Shadow& sh) const {
    e = ast::unwrap(e);
    if (e == nullptr) return false;
    switch (e->kind) {
      case NodeKind::JsxElement:
      case NodeKind::JsxFragment:
        return true;
      case NodeKind::Conditional:
        return produces_jsx(e->kid(1), sh) || produces_jsx(e->kid(2), sh);
      case NodeKind::Logical:
        return produces_jsx(e->kid(1), sh) || (e->text != "&&" && produces_jsx(e->kid(0), sh));
      case NodeKind::ArrayExpression:
        return std::any_of(e->kids.begin(), e->kids.end(), [&](const Node* k) { return produces_jsx(k, sh); });
      case NodeKind::Identifier: {
        if (sh.count(e->text) != 0) return false;
        if (jsx_locals_.count(e->text) != 0) return true;
        const PropertySpec* spec = prop_of_identifier(e->text);
        return spec != nullptr && (spec->kind == PropertyKind::Node || spec->name == "children");
      }
      case NodeKind::Member: {
        if (auto prop = props_member(e, sh)) {
          const PropertySpec* spec = schema_.find(*prop);
          return *prop == "children" || (spec != nullptr && spec->kind == PropertyKind::Node);
        }
        return false;
      }
      case NodeKind::Call: {
        const Node* callee = ast::unwrap(e->kid(0));
        if (callee == nullptr) return false;
        if (callee->kind == NodeKind::Identifier) {
          return sh.count(callee->text) == 0 &&
                 (render_helpers_.count(callee->text) != 0 || callee->text == "createElement" ||
                  callee->text == "cloneElement");
        }
        if (callee->kind == NodeKind::Member && !callee->computed) {
          const std::string method = callee->kid(1)->text;
          if (method == "createElement" || method == "cloneElement") return true;
          if (method == "map" || method == "flatMap") {
            const Node* fn = ast::unwrap(e->kid(1));
            if (is_function(fn)) return contains_jsx(fn->body);
            if (fn != nullptr && fn->kind == NodeKind::Identifier) return render_helpers_.count(fn->text) != 0;
          }
        }
        return false;
      }
      default:
        return false;
    }
  }

  // Props reaching the value of `e`. Unless `raw`, the tests of
  // JSX-selecting conditionals are left out: those are Structure contexts
  // of their own.
  void collect(const Node* e, const Shadow& sh, Props& out, bool raw) const {
    if (e == nullptr) return;
    switch (e->kind) {
      case NodeKind::JsxElement:
      case NodeKind::JsxFragment:
        return;
      case NodeKind::Identifier:
        resolve_identifier(e->text, sh, out);
        return;
      case NodeKind::Member:
        if (auto prop = props_member(e, sh)) {
          if (declared(*prop)) out.insert(*prop);
          return;
        }
        collect(e->kid(0), sh, out, raw);
        if (e->computed) collect(e->kid(1), sh, out, raw);
        return;
      case NodeKind::Property:
        if (e->computed) collect(e->kid(0), sh, out, raw);
        collect(e->kid(1) != nullptr ? e->kid(1) : e->kid(0), sh, out, raw);
        return;
      case NodeKind::Logical:
        if (!raw && produces_jsx(e, sh)) {
          if (e->text != "&&") collect(e->kid(0), sh, out, raw);
          collect(e->kid(1), sh, out, raw);
          return;
        }
        break;
      case NodeKind::Conditional:
        if (!raw && produces_jsx(e, sh)) {
          collect(e->kid(1), sh, out, raw);
          collect(e->kid(2), sh, out, raw);
          return;
        }
        break;
      case NodeKind::ArrowFunction:
      case NodeKind::FunctionExpression:
      case NodeKind::FunctionDeclaration:
        collect(e->body, extend(sh, e), out, raw);
        return;
      case NodeKind::VariableDeclarator:
        collect(e->kid(1), sh, out, raw);
        return;
      case NodeKind::Call: {
        // Render helpers contribute their own contexts when visited.
        const Node* callee = ast::unwrap(e->kid(0));
        if (callee != nullptr && callee->kind == NodeKind::Identifier &&
            render_helpers_.count(callee->text) != 0 && sh.count(callee->text) == 0) {
          for (std::size_t i = 1; i < e->kids.size(); ++i) collect(e->kids[i], sh, out, raw);
          return;
        }
        break;
      }
      default:
        break;
    }
    for (const Node* k : e->kids) collect(k, sh, out, raw);
    collect(e->body, sh, out, raw);
  }

  void collect_locals() {
    if (pc_.function == nullptr) return;
    std::vector<const Node*> declarators;
    std::vector<const Node*> functions;
    ast::walk(pc_.tree->root(), [&](const Node* n) {
      if (n == pc_.function) return true;
      if (n->kind == NodeKind::FunctionDeclaration && !n->text.empty()) functions.push_back(n);
      if (n->kind == NodeKind::VariableDeclarator) {
        const Node* t = n->kid(0);
        const Node* init = ast::unwrap(n->kid(1));
        if (t != nullptr && t->kind == NodeKind::Identifier && is_function(init) && contains_jsx(init)) {
          render_helpers_.insert(t->text);
        }
      }
      return true;
    });
    for (const Node* fn : functions) {
      if (contains_jsx(fn)) render_helpers_.insert(fn->text);
    }

    ast::walk(pc_.function->body, [&](const Node* n) {
      if (n->kind == NodeKind::VariableDeclarator) declarators.push_back(n);
      return true;
    });

    // Locals may reference later function declarations through closures, so
    // iterate to a fixpoint.
    for (int round = 0; round < 4; ++round) {
      bool changed = false;
      for (const Node* d : declarators) {
        const Node* init = d->kid(1);
        if (init == nullptr) continue;
        std::vector<std::string> names;
        binding_names(d->kid(0), names);
        const bool jsx = produces_jsx(init, {});
        for (const auto& name : names) {
          if (pc_.prop_bindings.count(name) != 0 || pc_.props_objects.count(name) != 0) continue;
          if (render_helpers_.count(name) != 0) continue;
          if (jsx) {
            changed = jsx_locals_.insert(name).second || changed;
            continue;
          }
          Props props;
          collect(init, {}, props, true);
          if (props.empty()) continue;
          auto& slot = derived_[name];
          const std::size_t before = slot.size();
          slot.insert(props.begin(), props.end());
          changed = changed || slot.size() != before;
        }
      }
      changed = track_mutations(pc_.function->body, {}, declarators) || changed;
      ast::walk(pc_.function->body, [&](const Node* n) {
        if (n->kind != NodeKind::FunctionDeclaration || n->text.empty() || render_helpers_.count(n->text) != 0) {
          return true;
        }
        Props props;
        collect(n, {}, props, true);
        if (!props.empty()) {
          auto& slot = derived_[n->text];
          const std::size_t before = slot.size();
          slot.insert(props.begin(), props.end());
          changed = changed || slot.size() != before;
        }
        return true;
      });
      if (!changed) break;
    }
  }

  // `x.push(..)` / `x = ..` on a local declared in the body, including the
  // props tested by enclosing `if` statements.
  bool track_mutations(const Node* n, const Props& guard, const std::vector<const Node*>& declarators) {
    if (n == nullptr || is_function(n)) return false;
    bool changed = false;
    auto feed = [&](const std::string& local, const Props& extra) {
      if (jsx_locals_.count(local) != 0 || pc_.prop_bindings.count(local) != 0) return;
      bool declared = false;
      for (const Node* d : declarators) {
        std::vector<std::string> names;
        binding_names(d->kid(0), names);
        declared = declared || std::find(names.begin(), names.end(), local) != names.end();
      }
      if (!declared) return;
      Props props = guard;
      props.insert(extra.begin(), extra.end());
      if (props.empty()) return;
      auto& slot = derived_[local];
      const std::size_t before = slot.size();
      slot.insert(props.begin(), props.end());
      changed = changed || slot.size() != before;
    };

    switch (n->kind) {
      case NodeKind::If: {
        Props inner = guard;
        collect(n->kid(0), {}, inner, true);
        changed = track_mutations(n->kid(1), inner, declarators) || changed;
        changed = track_mutations(n->kid(2), inner, declarators) || changed;
        return changed;
      }
      case NodeKind::ExpressionStatement: {
        const Node* e = ast::unwrap(n->kid(0));
        if (e == nullptr) return false;
        if (e->kind == NodeKind::Call) {
          const Node* callee = ast::unwrap(e->kid(0));
          const Node* object = callee != nullptr && callee->kind == NodeKind::Member ? ast::unwrap(callee->kid(0)) : nullptr;
          if (object != nullptr && object->kind == NodeKind::Identifier) {
            Props args;
            for (std::size_t i = 1; i < e->kids.size(); ++i) collect(e->kids[i], {}, args, true);
            feed(object->text, args);
          }
        } else if (e->kind == NodeKind::Assignment) {
          const Node* target = ast::unwrap(e->kid(0));
          if (target != nullptr && target->kind == NodeKind::Identifier) {
            Props value;
            collect(e->kid(1), {}, value, true);
            feed(target->text, value);
          }
        }
        return changed;
      }
      case NodeKind::Return:
      case NodeKind::VariableDeclaration:
        return false;
      default:
        break;
    }
    for (const Node* k : n->kids) changed = track_mutations(k, guard, declarators) || changed;
    return changed;
  }

  void add(const Props& props, const Node* node, ViContextKind kind) {
    for (const auto& p : props) {
      auto [it, inserted] = found_.emplace(std::make_pair(p, node), kind);
      if (!inserted && static_cast<int>(kind) > static_cast<int>(it->second)) it->second = kind;
    }
  }

  static bool skipped_attribute(const std::string& name) {
    if (name == "key" || name == "ref") return true;
    return name.size() > 2 && name[0] == 'o' && name[1] == 'n' && std::isupper(static_cast<unsigned char>(name[2]));
  }

  void dynamic_tag(const Node* element, const Shadow& sh) {
    const std::string& tag = element->text;
    if (tag.empty()) return;
    const auto dot = tag.find('.');
    const std::string head = tag.substr(0, dot);
    if (dot == std::string::npos && std::islower(static_cast<unsigned char>(head[0]))) return;
    Props props;
    if (sh.count(head) == 0 && pc_.props_objects.count(head) != 0 && dot != std::string::npos) {
      const std::string prop = tag.substr(dot + 1, tag.find('.', dot + 1) - dot - 1);
      if (declared(prop)) props.insert(prop);
    } else {
      resolve_identifier(head, sh, props);
    }
    add(props, element, ViContextKind::Structure);
  }

  void visit_children(const std::vector<Node*>& children, const Shadow& sh) {
    for (const Node* c : children) {
      if (c->kind == NodeKind::JsxExpressionContainer) {
        Props props;
        collect(c->kid(0), sh, props, false);
        add(props, c, ViContextKind::Content);
        visit(c->kid(0), sh);
      } else {
        visit(c, sh);
      }
    }
  }

  void visit(const Node* n, const Shadow& sh) {
    if (n == nullptr) return;
    switch (n->kind) {
      case NodeKind::ArrowFunction:
      case NodeKind::FunctionExpression:
      case NodeKind::FunctionDeclaration:
        visit(n->body, extend(sh, n));
        return;
      case NodeKind::Logical:
        if (produces_jsx(n, sh)) {
          Props props;
          collect(n->kid(0), sh, props, true);
          add(props, n, ViContextKind::Structure);
        }
        break;
      case NodeKind::Conditional:
        if (produces_jsx(n->kid(1), sh) || produces_jsx(n->kid(2), sh)) {
          Props props;
          collect(n->kid(0), sh, props, true);
          add(props, n, ViContextKind::Structure);
        }
        break;
      case NodeKind::If:
        if (branch_renders(n->kid(1)) || branch_renders(n->kid(2))) {
          Props props;
          collect(n->kid(0), sh, props, true);
          add(props, n, ViContextKind::Structure);
        }
        break;
      case NodeKind::Switch: {
        bool renders = false;
        for (std::size_t i = 1; i < n->kids.size(); ++i) renders = renders || branch_renders(n->kids[i]);
        if (renders) {
          Props props;
          collect(n->kid(0), sh, props, true);
          add(props, n, ViContextKind::Structure);
        }
        break;
      }
      case NodeKind::Member:
        visit(n->kid(0), sh);
        if (n->computed) visit(n->kid(1), sh);
        return;
      case NodeKind::JsxElement:
        dynamic_tag(n, sh);
        for (const Node* a : n->attributes) visit(a, sh);
        visit_children(n->children, sh);
        return;
      case NodeKind::JsxFragment:
        visit_children(n->children, sh);
        return;
      case NodeKind::JsxAttribute: {
        const Node* value = n->kid(0);
        if (value == nullptr) return;
        if (value->kind == NodeKind::JsxExpressionContainer) {
          if (!skipped_attribute(n->text)) {
            Props props;
            collect(value->kid(0), sh, props, false);
            add(props, n, ViContextKind::Styling);
          }
          visit(value->kid(0), sh);
        } else {
          visit(value, sh);
        }
        return;
      }
      default:
        break;
    }
    for (const Node* k : n->kids) visit(k, sh);
    visit(n->body, sh);
    for (const Node* a : n->attributes) visit(a, sh);
    if (!n->children.empty()) visit_children(n->children, sh);
  }

  const ParsedComponent& pc_;
  const ComponentSchema& schema_;
  std::map<std::string, Props> derived_;
  std::set<std::string> jsx_locals_;
  std::set<std::string> render_helpers_;
  std::map<std::pair<std::string, const Node*>, ViContextKind> found_;
};

}  // namespace

std::string truncate_utf8(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return std::string(text.substr(0, cut));
}

std::vector<ViContextOccurrence> find_vi_contexts(const ParsedComponent& pc, const ComponentSchema& schema) {
  return FlowTracer(pc, schema).run();
}

double frequency_coefficient(std::size_t n) {
  return 1.0 + (1.0 - std::exp(-static_cast<double>(n) / 10.0));
}

ImpactLevel impact_level(double impact) {
  if (impact >= kImpactfulThreshold) return ImpactLevel::High;
  if (impact >= kMediumThreshold) return ImpactLevel::Medium;
  return ImpactLevel::Low;
}

ImpactScore score_property(std::string property, std::vector<ViContextOccurrence> occurrences) {
  ImpactScore score;
  score.property = std::move(property);
  score.n = occurrences.size();
  if (score.n > 0) {
    for (const auto& o : occurrences) score.base = std::max(score.base, base_score(o.kind));
    score.coefficient = frequency_coefficient(score.n);
    score.impact = score.coefficient * score.base;
  }
  score.occurrences = std::move(occurrences);
  score.level = impact_level(score.impact);
  score.impactful = score.impact >= kImpactfulThreshold;
  return score;
}

const ImpactScore* ComponentAnalysis::impact_of(std::string_view property) const {
  for (const auto& s : impacts) {
    if (s.property == property) return &s;
  }
  return nullptr;
}

std::vector<std::string> ComponentAnalysis::impactful_properties() const {
  std::vector<std::string> out;
  for (const auto& s : impacts) {
    if (s.impactful) out.push_back(s.property);
  }
  return out;
}

ComponentAnalysis analyze_component(std::string_view source, std::string_view filename) {
  ComponentAnalysis result;
  result.parsed = parse_source(source, filename);
  result.schema = discover_schema(result.parsed, &result.warnings);
  const auto occurrences = find_vi_contexts(result.parsed, result.schema);
  for (const auto& spec : result.schema.properties) {
    if (!is_sampled_kind(spec.kind)) continue;
    std::vector<ViContextOccurrence> mine;
    for (const auto& o : occurrences) {
      if (o.property == spec.name) mine.push_back(o);
    }
    result.impacts.push_back(score_property(spec.name, std::move(mine)));
  }
  std::stable_sort(result.impacts.begin(), result.impacts.end(),
                   [](const ImpactScore& a, const ImpactScore& b) { return a.impact > b.impact; });
  return result;
}

}  // namespace facet
