// Copyright 2026 The Arbiter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arbiter/validator.h"

#include <set>

#include "arbiter/parser.h"

namespace arbiter {

std::string RequestEnv::to_string() const {
  return action.to_string() + " (" + principal_type + ", " + resource_type + ")";
}

std::vector<RequestEnv> environments(const Schema& schema) {
  std::vector<RequestEnv> out;
  for (const auto& [uid, decl] : schema.actions) {
    if (!decl.declared) continue;
    for (const auto& p : decl.principal_types) {
      for (const auto& r : decl.resource_types) out.push_back(RequestEnv{p, uid, r, decl.context});
    }
  }
  return out;
}

Capability Capability::single(ExprPtr e, std::string attr) {
  Capability c(false);
  c.items_.emplace_back(std::move(e), std::move(attr));
  return c;
}

bool Capability::contains(const ExprPtr& e, const std::string& attr) const {
  if (top_) return true;
  for (const auto& [x, a] : items_) {
    if (a == attr && expr_equal(x, e)) return true;
  }
  return false;
}

void Capability::insert(const ExprPtr& e, const std::string& attr) {
  if (!contains(e, attr)) items_.emplace_back(e, attr);
}

Capability Capability::unite(const Capability& other) const {
  if (top_ || other.top_) return top();
  Capability out = *this;
  for (const auto& [e, a] : other.items_) out.insert(e, a);
  return out;
}

Capability Capability::intersect(const Capability& other) const {
  if (top_) return other;
  if (other.top_) return *this;
  Capability out(false);
  for (const auto& [e, a] : items_) {
    if (other.contains(e, a)) out.items_.emplace_back(e, a);
  }
  return out;
}

const char* type_error_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::NotComparable: return "NotComparable";
    case TypeError::Kind::MissingAttribute: return "MissingAttribute";
    case TypeError::Kind::CapabilityRequired: return "CapabilityRequired";
    case TypeError::Kind::HeterogeneousSet: return "HeterogeneousSet";
    case TypeError::Kind::UnknownEntityType: return "UnknownEntityType";
    case TypeError::Kind::NonBooleanGuard: return "NonBooleanGuard";
    case TypeError::Kind::EmptySetLiteral: return "EmptySetLiteral";
    case TypeError::Kind::UnexpectedType: return "UnexpectedType";
  }
  return "?";
}

const char* warning_name(ValidationWarning w) {
  return w == ValidationWarning::AlwaysFalse ? "AlwaysFalse" : "AlwaysTrue";
}

bool is_subtype(const Type& sub, const Type& super) {
  using K = Type::Kind;
  if (sub == super) return true;
  if (super.kind() == K::Bool) return sub.is_boolean();
  if (sub.kind() != super.kind()) return false;
  switch (sub.kind()) {
    case K::Set: return is_subtype(sub.element(), super.element());
    case K::Record: {
      const auto& a = sub.attributes();
      const auto& b = super.attributes();
      if (a.size() != b.size()) return false;
      for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name) return false;
        if (!a[i].required && b[i].required) return false;
        if (!is_subtype(a[i].type, b[i].type)) return false;
      }
      return true;
    }
    default: return false;
  }
}

std::optional<Type> least_upper_bound(const Type& a, const Type& b) {
  // Only joins that differ in True/False. Widening a required attribute to
  // an optional one would change the value's symbolic encoding.
  if (a == b) return a;
  Type ea = a.erase_singletons();
  if (!(ea == b.erase_singletons())) return std::nullopt;
  return ea;
}

namespace {

using TypeResult = Result<Typing, TypeError>;

class Checker {
 public:
  Checker(const RequestEnv& env, const Schema& schema, TypeTable* table)
      : env_(env), schema_(schema), table_(table) {}

  TypeResult check(const ExprPtr& e, const Capability& cap) {
    TypeResult r = dispatch(e, cap);
    if (!r) return r;
    // An expression that can never be true may claim any capability.
    if (r->type.kind() == Type::Kind::False) r->effect = Capability::top();
    if (table_) (*table_)[e.get()] = r->type;
    return r;
  }

 private:
  TypeError fail(TypeError::Kind k, std::string detail, const ExprPtr& at) const {
    return TypeError{k, std::move(detail) + " in " + env_.to_string(), render_expr(at)};
  }

  Result<Type, TypeError> entity_type(const std::string& name, const ExprPtr& at) const {
    if (Schema::is_action_type(name) || schema_.entity_type(name)) return Type::entity(name);
    return unexpected(fail(TypeError::Kind::UnknownEntityType, "unknown entity type " + name, at));
  }

  Result<Type, TypeError> value_type(const Value& v, const ExprPtr& at) const {
    switch (v.kind()) {
      case Value::Kind::Bool: return Type::singleton(v.as_bool());
      case Value::Kind::Long: return Type::long_type();
      case Value::Kind::String: return Type::string_type();
      case Value::Kind::Entity: return entity_type(v.as_entity().type, at);
      case Value::Kind::Set: {
        if (v.as_set().empty()) return unexpected(fail(TypeError::Kind::EmptySetLiteral, "empty set", at));
        std::optional<Type> acc;
        for (const auto& x : v.as_set()) {
          auto t = value_type(x, at);
          if (!t) return t;
          acc = acc ? least_upper_bound(*acc, *t) : std::optional<Type>(*t);
          if (!acc) return unexpected(fail(TypeError::Kind::HeterogeneousSet, "mixed set elements", at));
        }
        return Type::set_of(*acc);
      }
      case Value::Kind::Record: {
        std::vector<AttributeType> attrs;
        for (const auto& [k, x] : v.as_record()) {
          auto t = value_type(x, at);
          if (!t) return t;
          attrs.push_back(AttributeType{k, true, *t});
        }
        return Type::record(std::move(attrs));
      }
    }
    return Type::boolean();
  }

  static TypeResult plain(Type t) { return Typing{std::move(t), Capability::empty()}; }

  TypeResult expect_bool(const ExprPtr& e, const Capability& cap, TypeError::Kind k) {
    auto r = check(e, cap);
    if (r && !r->type.is_boolean()) {
      return unexpected(fail(k, "expected a boolean, got " + r->type.to_string(), e));
    }
    return r;
  }

  TypeResult expect_long(const ExprPtr& e, const Capability& cap) {
    auto r = check(e, cap);
    if (r && r->type.kind() != Type::Kind::Long) {
      return unexpected(fail(TypeError::Kind::UnexpectedType, "expected Long, got " + r->type.to_string(), e));
    }
    return r;
  }

  // Attribute record of an entity or record type, or nullptr.
  const Type* attributes_of(const Type& t) const {
    if (t.is_record()) return &t;
    if (t.is_entity()) {
      if (auto* d = schema_.entity_type(t.entity_name())) return &d->attributes;
      static const Type kNone = Type::record({});
      return &kNone;  // actions
    }
    return nullptr;
  }

  TypeResult dispatch(const ExprPtr& e, const Capability& cap) {
    using K = Expr::Kind;
    switch (e->kind()) {
      case K::Lit: {
        auto t = value_type(e->literal(), e);
        if (!t) return unexpected(t.error());
        return plain(*t);
      }
      case K::Var:
        switch (e->var()) {
          case Var::Principal: return plain(Type::entity(env_.principal_type));
          case Var::Resource: return plain(Type::entity(env_.resource_type));
          case Var::Context: return plain(env_.context);
          case Var::Action: return plain(Type::entity(kActionType));
        }
        break;
      case K::Slot:
        return plain(Type::entity(e->slot() == SlotId::Principal ? env_.principal_type : env_.resource_type));
      case K::Set: {
        if (e->children().empty()) return unexpected(fail(TypeError::Kind::EmptySetLiteral, "empty set", e));
        std::optional<Type> acc;
        for (const auto& c : e->children()) {
          auto r = check(c, cap);
          if (!r) return r;
          acc = acc ? least_upper_bound(*acc, r->type) : std::optional<Type>(r->type);
          if (!acc) return unexpected(fail(TypeError::Kind::HeterogeneousSet, "set elements have no common type", e));
        }
        return plain(Type::set_of(*acc));
      }
      case K::Record: {
        std::vector<AttributeType> attrs;
        for (size_t i = 0; i < e->children().size(); ++i) {
          auto r = check(e->child(i), cap);
          if (!r) return r;
          attrs.push_back(AttributeType{e->keys()[i], true, r->type});
        }
        return plain(Type::record(std::move(attrs)));
      }
      case K::GetAttr: {
        auto r = check(e->child(0), cap);
        if (!r) return r;
        const Type* rec = attributes_of(r->type);
        if (!rec) {
          return unexpected(fail(TypeError::Kind::UnexpectedType,
                                 "attribute access on " + r->type.to_string(), e));
        }
        const AttributeType* a = rec->find_attribute(e->name());
        if (!a) {
          return unexpected(fail(TypeError::Kind::MissingAttribute,
                                 r->type.to_string() + " has no attribute " + e->name(), e));
        }
        if (!a->required && !cap.contains(e->child(0), e->name())) {
          return unexpected(fail(TypeError::Kind::CapabilityRequired,
                                 "optional attribute " + e->name() + " accessed without a `has` check", e));
        }
        return plain(a->type);
      }
      case K::HasAttr: {
        auto r = check(e->child(0), cap);
        if (!r) return r;
        const Type* rec = attributes_of(r->type);
        if (!rec) {
          return unexpected(fail(TypeError::Kind::UnexpectedType, "`has` on " + r->type.to_string(), e));
        }
        const AttributeType* a = rec->find_attribute(e->name());
        if (!a) return plain(Type::false_type());
        if (a->required) return plain(Type::true_type());
        return Typing{Type::boolean(), Capability::single(e->child(0), e->name())};
      }
      case K::And: {
        auto l = expect_bool(e->child(0), cap, TypeError::Kind::UnexpectedType);
        if (!l) return l;
        if (l->type.kind() == Type::Kind::False) return plain(Type::false_type());
        auto r = expect_bool(e->child(1), cap.unite(l->effect), TypeError::Kind::UnexpectedType);
        if (!r) return r;
        Capability eff = l->effect.unite(r->effect);
        if (l->type.kind() == Type::Kind::True) return Typing{r->type, eff};
        Type t = r->type.kind() == Type::Kind::False ? Type::false_type() : Type::boolean();
        return Typing{t, eff};
      }
      case K::Or: {
        auto l = expect_bool(e->child(0), cap, TypeError::Kind::UnexpectedType);
        if (!l) return l;
        if (l->type.kind() == Type::Kind::True) return Typing{Type::true_type(), l->effect};
        auto r = expect_bool(e->child(1), cap, TypeError::Kind::UnexpectedType);
        if (!r) return r;
        if (l->type.kind() == Type::Kind::False) return r;
        Type t = r->type.kind() == Type::Kind::True ? Type::true_type() : Type::boolean();
        return Typing{t, l->effect.intersect(r->effect)};
      }
      case K::If: {
        auto c = expect_bool(e->child(0), cap, TypeError::Kind::NonBooleanGuard);
        if (!c) return c;
        if (c->type.kind() == Type::Kind::False) return check(e->child(2), cap);
        auto t = check(e->child(1), cap.unite(c->effect));
        if (!t) return t;
        if (c->type.kind() == Type::Kind::True) return Typing{t->type, c->effect.unite(t->effect)};
        auto f = check(e->child(2), cap);
        if (!f) return f;
        auto joined = least_upper_bound(t->type, f->type);
        if (!joined) {
          return unexpected(fail(TypeError::Kind::NotComparable,
                                 "branches have types " + t->type.to_string() + " and " + f->type.to_string(), e));
        }
        return Typing{*joined, c->effect.unite(t->effect).intersect(f->effect)};
      }
      case K::Not: {
        auto r = expect_bool(e->child(0), cap, TypeError::Kind::UnexpectedType);
        if (!r) return r;
        switch (r->type.kind()) {
          case Type::Kind::True: return plain(Type::false_type());
          case Type::Kind::False: return plain(Type::true_type());
          default: return plain(Type::boolean());
        }
      }
      case K::Neg:
      case K::MulConst: {
        auto r = expect_long(e->child(0), cap);
        if (!r) return r;
        return plain(Type::long_type());
      }
      case K::Like: {
        auto r = check(e->child(0), cap);
        if (!r) return r;
        if (r->type.kind() != Type::Kind::String) {
          return unexpected(fail(TypeError::Kind::UnexpectedType, "`like` on " + r->type.to_string(), e));
        }
        return plain(Type::boolean());
      }
      case K::Is: {
        auto known = entity_type(e->name(), e);
        if (!known) return unexpected(known.error());
        auto r = check(e->child(0), cap);
        if (!r) return r;
        if (!r->type.is_entity()) {
          return unexpected(fail(TypeError::Kind::UnexpectedType, "`is` on " + r->type.to_string(), e));
        }
        return plain(Type::singleton(r->type.entity_name() == e->name()));
      }
      case K::Binary: return binary(e, cap);
    }
    return plain(Type::boolean());
  }

  TypeResult binary(const ExprPtr& e, const Capability& cap) {
    const ExprPtr& a = e->child(0);
    const ExprPtr& b = e->child(1);
    switch (e->op()) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Less:
      case BinaryOp::LessEq: {
        auto l = expect_long(a, cap);
        if (!l) return l;
        auto r = expect_long(b, cap);
        if (!r) return r;
        bool arith = e->op() == BinaryOp::Add || e->op() == BinaryOp::Sub;
        return plain(arith ? Type::long_type() : Type::boolean());
      }
      case BinaryOp::Eq: {
        auto l = check(a, cap);
        if (!l) return l;
        auto r = check(b, cap);
        if (!r) return r;
        if (expr_equal(a, b)) return plain(Type::true_type());
        if (l->type.is_entity() && r->type.is_entity()) {
          if (l->type.entity_name() != r->type.entity_name()) return plain(Type::false_type());
          if (a->kind() == Expr::Kind::Lit && b->kind() == Expr::Kind::Lit) {
            return plain(Type::singleton(a->literal() == b->literal()));
          }
          return plain(Type::boolean());
        }
        if (!least_upper_bound(l->type, r->type)) {
          return unexpected(fail(TypeError::Kind::NotComparable,
                                 "cannot compare " + l->type.to_string() + " with " + r->type.to_string(), e));
        }
        return plain(Type::boolean());
      }
      case BinaryOp::In: return in(e, cap);
      case BinaryOp::Contains: {
        auto l = check(a, cap);
        if (!l) return l;
        auto r = check(b, cap);
        if (!r) return r;
        if (!l->type.is_set()) {
          return unexpected(fail(TypeError::Kind::UnexpectedType, "contains on " + l->type.to_string(), e));
        }
        if (!least_upper_bound(l->type.element(), r->type)) {
          return unexpected(fail(TypeError::Kind::NotComparable,
                                 "cannot look for " + r->type.to_string() + " in " + l->type.to_string(), e));
        }
        return plain(Type::boolean());
      }
      case BinaryOp::ContainsAll:
      case BinaryOp::ContainsAny: {
        auto l = check(a, cap);
        if (!l) return l;
        auto r = check(b, cap);
        if (!r) return r;
        if (!l->type.is_set() || !r->type.is_set()) {
          return unexpected(fail(TypeError::Kind::UnexpectedType,
                                 std::string(binary_op_name(e->op())) + " needs two sets", e));
        }
        if (!least_upper_bound(l->type, r->type)) {
          return unexpected(fail(TypeError::Kind::NotComparable,
                                 "cannot compare " + l->type.to_string() + " with " + r->type.to_string(), e));
        }
        return plain(Type::boolean());
      }
    }
    return plain(Type::boolean());
  }

  // Literal action, or literal action set; nullopt otherwise.
  static std::optional<std::vector<EntityRef>> action_literals(const ExprPtr& e) {
    auto as_action = [](const ExprPtr& x) -> std::optional<EntityRef> {
      if (x->kind() == Expr::Kind::Lit && x->literal().is_entity() &&
          Schema::is_action_type(x->literal().as_entity().type)) {
        return x->literal().as_entity();
      }
      return std::nullopt;
    };
    if (auto r = as_action(e)) return std::vector<EntityRef>{*r};
    if (e->kind() == Expr::Kind::Set) {
      std::vector<EntityRef> out;
      for (const auto& c : e->children()) {
        auto r = as_action(c);
        if (!r) return std::nullopt;
        out.push_back(*r);
      }
      return out;
    }
    return std::nullopt;
  }

  TypeResult in(const ExprPtr& e, const Capability& cap) {
    const ExprPtr& a = e->child(0);
    const ExprPtr& b = e->child(1);
    auto l = check(a, cap);
    if (!l) return l;
    auto r = check(b, cap);
    if (!r) return r;
    if (!l->type.is_entity()) {
      return unexpected(fail(TypeError::Kind::UnexpectedType, "`in` on " + l->type.to_string(), e));
    }
    const Type* target = &r->type;
    if (target->is_set()) target = &target->element();
    if (!target->is_entity()) {
      return unexpected(fail(TypeError::Kind::UnexpectedType, "`in` needs an entity or set of entities on the right", e));
    }
    auto lhs = action_literals(a);
    auto rhs = action_literals(b);
    if (lhs && rhs) {
      for (const auto& g : *rhs) {
        if (schema_.action_in(lhs->front(), g)) return plain(Type::true_type());
      }
      return plain(Type::false_type());
    }
    const std::string& e1 = l->type.entity_name();
    const std::string& e2 = target->entity_name();
    if (e1 == e2) return plain(Type::boolean());
    const EntityTypeDecl* d = schema_.entity_type(e1);
    if (d && d->ancestor_types.count(e2)) return plain(Type::boolean());
    return plain(Type::false_type());
  }

  const RequestEnv& env_;
  const Schema& schema_;
  TypeTable* table_;
};

}  // namespace

Result<Typing, TypeError> typecheck(const ExprPtr& expr, const RequestEnv& env, const Schema& schema,
                                    const Capability& incap, TypeTable* table) {
  return Checker(env, schema, table).check(expr, incap);
}

std::vector<EntityRef> matching_actions(const ActionConstraint& c, const Schema& schema) {
  std::vector<EntityRef> out;
  for (const auto& [uid, decl] : schema.actions) {
    if (!decl.declared) continue;
    bool match = false;
    switch (c.kind) {
      case ActionConstraint::Kind::Any: match = true; break;
      case ActionConstraint::Kind::Eq: match = uid == c.refs.at(0); break;
      case ActionConstraint::Kind::In:
      case ActionConstraint::Kind::InSet:
        for (const auto& g : c.refs) match = match || schema.action_in(uid, g);
        break;
    }
    if (match) out.push_back(uid);
  }
  return out;
}

std::vector<RequestEnv> policy_environments(const Policy& p, const Schema& schema) {
  std::vector<RequestEnv> out;
  auto acts = matching_actions(p.action, schema);
  std::set<EntityRef> wanted(acts.begin(), acts.end());
  for (auto& env : environments(schema)) {
    if (wanted.count(env.action)) out.push_back(std::move(env));
  }
  return out;
}

ExprPtr specialize(const Policy& p, const RequestEnv& env) {
  return substitute_var(desugar(p), Var::Action, Expr::entity(env.action));
}

bool PolicyReport::valid() const {
  for (const auto& r : results) {
    if (r.error) return false;
  }
  return true;
}

bool ValidationReport::valid() const {
  for (const auto& p : policies) {
    if (!p.valid()) return false;
  }
  return true;
}

PolicyReport validate_policy(const Policy& p, const Schema& schema) {
  PolicyReport report;
  report.policy_id = p.id;
  report.is_template = p.is_template();
  bool all_false = true;
  bool all_true = true;
  for (const auto& env : policy_environments(p, schema)) {
    EnvResult er{env, std::nullopt, std::nullopt};
    auto r = typecheck(specialize(p, env), env, schema);
    if (!r) {
      er.error = r.error();
    } else if (!r->type.is_boolean()) {
      ExprPtr body = desugar(p);
      er.error = TypeError{TypeError::Kind::NonBooleanGuard,
                           "policy has type " + r->type.to_string() + " in " + env.to_string(), render_expr(body)};
    } else {
      er.type = r->type;
    }
    all_false = all_false && er.type && er.type->kind() == Type::Kind::False;
    all_true = all_true && er.type && er.type->kind() == Type::Kind::True;
    report.results.push_back(std::move(er));
  }
  // With no environments the policy can never apply.
  if (all_false) report.warnings.push_back(ValidationWarning::AlwaysFalse);
  else if (all_true) report.warnings.push_back(ValidationWarning::AlwaysTrue);
  return report;
}

ValidationReport validate(const PolicySet& set, const Schema& schema) {
  ValidationReport out;
  std::set<std::string> link_ids;
  for (const auto& l : set.links()) link_ids.insert(l.link_id);
  for (const auto& t : set.templates()) out.policies.push_back(validate_policy(t, schema));
  for (const auto& p : set.policies()) {
    if (!link_ids.count(p.id)) out.policies.push_back(validate_policy(p, schema));
  }
  return out;
}

}  // namespace arbiter
