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

#include "arbiter/policy.h"

namespace arbiter {

bool Policy::is_template() const { return principal.is_slot() || resource.is_slot(); }

std::vector<SlotId> Policy::slots() const {
  std::vector<SlotId> out;
  if (principal.is_slot()) out.push_back(std::get<SlotId>(principal.target));
  if (resource.is_slot()) out.push_back(std::get<SlotId>(resource.target));
  return out;
}

bool policy_equal(const Policy& a, const Policy& b) {
  if (a.effect != b.effect || !(a.principal == b.principal) || !(a.action == b.action) ||
      !(a.resource == b.resource) || a.annotations != b.annotations ||
      a.conditions.size() != b.conditions.size()) {
    return false;
  }
  for (size_t i = 0; i < a.conditions.size(); ++i) {
    if (a.conditions[i].is_when != b.conditions[i].is_when ||
        !expr_equal(a.conditions[i].body, b.conditions[i].body)) {
      return false;
    }
  }
  return true;
}

namespace {

ExprPtr scope_expr(const ScopeConstraint& c, Var v) {
  if (c.kind == ScopeConstraint::Kind::Any) return Expr::boolean(true);
  auto op = c.kind == ScopeConstraint::Kind::Eq ? BinaryOp::Eq : BinaryOp::In;
  ExprPtr target = c.is_slot() ? Expr::slot_ref(std::get<SlotId>(c.target)) : Expr::entity(*c.entity());
  return Expr::binary(op, Expr::variable(v), target);
}

ExprPtr action_expr(const ActionConstraint& c) {
  auto act = Expr::variable(Var::Action);
  switch (c.kind) {
    case ActionConstraint::Kind::Any: return Expr::boolean(true);
    case ActionConstraint::Kind::Eq: return Expr::binary(BinaryOp::Eq, act, Expr::entity(c.refs.at(0)));
    case ActionConstraint::Kind::In: return Expr::binary(BinaryOp::In, act, Expr::entity(c.refs.at(0)));
    case ActionConstraint::Kind::InSet: {
      std::vector<ExprPtr> elems;
      for (const auto& r : c.refs) elems.push_back(Expr::entity(r));
      return Expr::binary(BinaryOp::In, act, Expr::set(std::move(elems)));
    }
  }
  return Expr::boolean(true);
}

}  // namespace

ExprPtr desugar(const Policy& policy) {
  std::vector<ExprPtr> conjuncts = {scope_expr(policy.principal, Var::Principal), action_expr(policy.action),
                                    scope_expr(policy.resource, Var::Resource)};
  for (const auto& c : policy.conditions) conjuncts.push_back(c.is_when ? c.body : Expr::not_(c.body));
  ExprPtr acc = conjuncts.back();
  for (size_t i = conjuncts.size() - 1; i-- > 0;) acc = Expr::and_(conjuncts[i], acc);
  return acc;
}

Result<ExprPtr, PolicyError> toexp(const Policy& policy) {
  ExprPtr e = desugar(policy);
  if (e->has_slots()) {
    return unexpected(PolicyError{PolicyError::Kind::NotClosed, "policy \"" + policy.id + "\" has unlinked slots"});
  }
  return e;
}

Result<Policy, PolicyError> link(const Policy& tmpl, const SlotBindings& bindings,
                                 const std::string& link_id) {
  auto present = tmpl.slots();
  for (SlotId s : present) {
    if (!bindings.count(s)) {
      return unexpected(PolicyError{PolicyError::Kind::UnboundSlot,
                                    std::string("no binding for ") + slot_name(s)});
    }
  }
  for (const auto& [s, ref] : bindings) {
    bool used = false;
    for (SlotId t : present) used = used || s == t;
    if (!used) {
      return unexpected(PolicyError{PolicyError::Kind::UnknownSlot,
                                    std::string("template has no slot ") + slot_name(s)});
    }
  }
  Policy out = tmpl;
  auto fill = [&](ScopeConstraint& c) {
    if (c.is_slot()) c.target = bindings.at(std::get<SlotId>(c.target));
  };
  fill(out.principal);
  fill(out.resource);
  if (!link_id.empty()) {
    out.id = link_id;
    out.annotations["id"] = link_id;
  }
  return out;
}

}  // namespace arbiter
