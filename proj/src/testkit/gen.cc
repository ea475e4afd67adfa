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

#include "arbiter/testkit/gen.h"

#include <algorithm>
#include <climits>
#include <map>
#include <set>

namespace arbiter::testkit {

namespace {

const std::vector<std::string> kIds = {"a", "b", "c", "d", "e", "f", "g", "h"};
const std::vector<std::string> kOddIds = {"", "with space", "q\"uote", "back\\slash", "\xc3\xbcml\xc3\xa4ut", "0"};
const std::vector<std::string> kAttrs = {"age", "name", "flag", "owner", "tags", "info", "level"};
const std::vector<std::string> kStrings = {"", "a", "ab", "abc", "b", "Alice", "x*y", "\xc3\xbc", "todo", "done"};

std::string pick_id(Rng& rng, size_t n) {
  if (rng.chance(3)) return rng.pick(kOddIds);
  return kIds[rng.below(std::max<size_t>(1, std::min(n, kIds.size())))];
}

int64_t gen_long(Rng& rng) {
  switch (rng.below(10)) {
    case 0: return INT64_MAX - static_cast<int64_t>(rng.below(3));
    case 1: return INT64_MIN + static_cast<int64_t>(rng.below(3));
    case 2: return rng.range(-1000000, 1000000);
    default: return rng.range(-3, 20);
  }
}

Pattern gen_pattern(Rng& rng) {
  Pattern p;
  size_t n = rng.below(4);
  for (size_t i = 0; i < n; ++i) {
    if (rng.chance(40)) {
      p.push_wildcard();
    } else {
      std::string s = rng.pick(kStrings);
      if (rng.chance(10)) s += "*";  // a literal star
      if (!s.empty()) p.push_literal(s);
    }
  }
  return p;
}

EntityRef untyped_entity(Rng& rng, size_t n) {
  return EntityRef{rng.pick(untyped_entity_types()), pick_id(rng, n)};
}

EntityRef untyped_action(Rng& rng) { return EntityRef{kActionType, rng.pick(untyped_actions())}; }

Value untyped_value(Rng& rng, size_t depth, size_t n) {
  size_t k = depth == 0 ? rng.below(4) : rng.below(6);
  switch (k) {
    case 0: return Value::boolean(rng.chance(50));
    case 1: return Value::integer(gen_long(rng));
    case 2: return Value::string(rng.pick(kStrings));
    case 3: return Value::entity(untyped_entity(rng, n));
    case 4: {
      std::vector<Value> elems;
      size_t m = rng.below(4);
      for (size_t i = 0; i < m; ++i) elems.push_back(untyped_value(rng, depth - 1, n));
      return Value::set(std::move(elems));
    }
    default: {
      ValueRecord r;
      size_t m = rng.below(3);
      for (size_t i = 0; i < m; ++i) r[rng.pick(kAttrs)] = untyped_value(rng, depth - 1, n);
      return Value::record(std::move(r));
    }
  }
}

// Attribute values mostly of the intended type so that expressions get past
// the first projection; a few are off-type to exercise errors.
Value untyped_attr(Rng& rng, const std::string& name, size_t n) {
  if (rng.chance(5)) return untyped_value(rng, 2, n);
  // Small ranges so comparisons against literals often hit the boundary.
  if (name == "age" || name == "level") return Value::integer(rng.chance(90) ? rng.range(-2, 8) : gen_long(rng));
  if (name == "name") return Value::string(rng.pick(kStrings));
  if (name == "flag") return Value::boolean(rng.chance(50));
  if (name == "owner") return Value::entity(untyped_entity(rng, n));
  if (name == "tags") {
    std::vector<Value> elems;
    for (size_t i = rng.below(4); i > 0; --i) elems.push_back(Value::string(rng.pick(kStrings)));
    return Value::set(std::move(elems));
  }
  ValueRecord r;
  r["x"] = Value::integer(rng.range(-2, 5));
  if (rng.chance(50)) r["y"] = Value::string(rng.pick(kStrings));
  return Value::record(std::move(r));
}

Value untyped_record(Rng& rng, size_t n) {
  ValueRecord r;
  for (const auto& a : kAttrs) {
    bool common = a == "age" || a == "level" || a == "name" || a == "flag";
    if (rng.chance(common ? 80 : 55)) r[a] = untyped_attr(rng, a, n);
  }
  return Value::record(std::move(r));
}

}  // namespace

const std::vector<std::string>& untyped_entity_types() {
  static const std::vector<std::string> types = {"User", "Group", "Doc", "Folder"};
  return types;
}

const std::vector<std::string>& untyped_actions() {
  static const std::vector<std::string> actions = {"view", "edit", "delete", "admin", "read"};
  return actions;
}

EntityStore gen_store(Rng& rng, const GenConfig& cfg) {
  size_t n = std::max<size_t>(1, std::min(cfg.max_entities, kIds.size()));
  std::vector<EntityRef> uids;
  for (const auto& t : untyped_entity_types()) {
    size_t count = 1 + rng.below(n);
    for (size_t i = 0; i < count; ++i) uids.push_back(EntityRef{t, kIds[i]});
  }
  if (rng.chance(20)) uids.push_back(untyped_entity(rng, n));
  std::sort(uids.begin(), uids.end());
  uids.erase(std::unique(uids.begin(), uids.end()), uids.end());
  // Topological construction: parents only come from earlier positions.
  rng.shuffle(uids);
  std::vector<EntityInput> inputs;
  for (size_t i = 0; i < uids.size(); ++i) {
    EntityInput in;
    in.uid = uids[i];
    in.attrs = untyped_record(rng, n);
    for (size_t j = 0; j < i; ++j) {
      if (rng.chance(cfg.edge_percent)) in.parents.push_back(uids[j]);
    }
    if (rng.chance(5)) in.parents.push_back(EntityRef{rng.pick(untyped_entity_types()), "ghost"});  // dangling
    inputs.push_back(std::move(in));
  }
  // Action groups form a fixed chain so `action in` has something to find.
  const auto& acts = untyped_actions();
  for (size_t i = 0; i < acts.size(); ++i) {
    EntityInput in;
    in.uid = EntityRef{kActionType, acts[i]};
    if (acts[i] == "view") in.parents.push_back(EntityRef{kActionType, "read"});
    if (acts[i] == "edit" || acts[i] == "delete") in.parents.push_back(EntityRef{kActionType, "admin"});
    inputs.push_back(std::move(in));
  }
  auto built = EntityStore::build(std::move(inputs));
  return std::move(*built);
}

EntityStore gen_store(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  return gen_store(rng, cfg);
}

Request gen_request(Rng& rng, const EntityStore& store) {
  std::vector<EntityRef> present;
  for (const auto& [uid, d] : store.entries()) {
    if (uid.type != kActionType) present.push_back(uid);
  }
  auto choose = [&]() {
    if (present.empty() || rng.chance(8)) return untyped_entity(rng, kIds.size());
    return rng.pick(present);
  };
  Request r;
  r.principal = choose();
  r.action = untyped_action(rng);
  r.resource = choose();
  r.context = untyped_record(rng, 4);
  return r;
}

Request gen_request(const GenConfig& cfg, const EntityStore& store) {
  Rng rng(cfg.seed ^ 0x5bd1e995);
  return gen_request(rng, store);
}

namespace {

ExprPtr gen_leaf(Rng& rng) {
  switch (rng.below(8)) {
    case 0: return Expr::boolean(rng.chance(50));
    case 1: return Expr::integer(rng.chance(80) ? rng.range(-3, 8) : gen_long(rng));
    case 2: return Expr::string(rng.pick(kStrings));
    case 3: return Expr::entity(rng.chance(20) ? untyped_action(rng) : untyped_entity(rng, 4));
    case 4: return Expr::variable(Var::Context);
    case 5: return Expr::variable(Var::Principal);
    case 6: return Expr::variable(Var::Resource);
    default: return Expr::variable(Var::Action);
  }
}

ExprPtr gen_expr_impl(Rng& rng, size_t depth, bool want_bool);

ExprPtr gen_bool(Rng& rng, size_t depth) { return gen_expr_impl(rng, depth, true); }

ExprPtr gen_expr_impl(Rng& rng, size_t depth, bool want_bool) {
  if (depth <= 1) {
    if (want_bool && rng.chance(60)) return Expr::boolean(rng.chance(50));
    return gen_leaf(rng);
  }
  size_t d = depth - 1;
  auto any = [&]() { return gen_expr_impl(rng, d, false); };
  auto entityish = [&]() -> ExprPtr {
    switch (rng.below(5)) {
      case 0: return Expr::variable(Var::Principal);
      case 1: return Expr::variable(Var::Resource);
      case 2: return Expr::get_attr(rng.chance(50) ? Expr::variable(Var::Resource) : Expr::variable(Var::Principal),
                                    "owner");
      case 3: return Expr::entity(untyped_entity(rng, 4));
      default: return any();
    }
  };
  auto attr_of = [&]() -> ExprPtr {
    ExprPtr base = rng.chance(75) ? entityish() : Expr::variable(Var::Context);
    std::string a = rng.chance(90) ? rng.pick(kAttrs) : std::string("missing");
    return Expr::get_attr(base, a);
  };
  if (want_bool) {
    switch (rng.below(14)) {
      case 0: return Expr::and_(gen_bool(rng, d), gen_bool(rng, d));
      case 1: return Expr::or_(gen_bool(rng, d), gen_bool(rng, d));
      case 2: return Expr::not_(gen_bool(rng, d));
      case 3: return Expr::binary(BinaryOp::Eq, rng.chance(50) ? attr_of() : any(), any());
      case 4: {
        ExprPtr lhs = rng.chance(70) ? Expr::get_attr(entityish(), rng.chance(50) ? "age" : "level") : any();
        return Expr::binary(rng.chance(50) ? BinaryOp::Less : BinaryOp::LessEq, lhs, Expr::integer(rng.range(-2, 8)));
      }
      case 5:
      case 6: {
        ExprPtr rhs;
        if (rng.chance(25)) {
          std::vector<ExprPtr> elems;
          for (size_t i = rng.below(3) + 1; i > 0; --i) elems.push_back(entityish());
          rhs = Expr::set(std::move(elems));
        } else {
          rhs = entityish();
        }
        ExprPtr lhs = rng.chance(15) ? Expr::variable(Var::Action) : entityish();
        if (lhs->kind() == Expr::Kind::Var && lhs->var() == Var::Action) rhs = Expr::entity(untyped_action(rng));
        return Expr::binary(BinaryOp::In, lhs, rhs);
      }
      case 7: return Expr::has_attr(rng.chance(75) ? entityish() : Expr::variable(Var::Context),
                                    rng.chance(85) ? rng.pick(kAttrs) : std::string("missing"));
      case 8: return Expr::like(rng.chance(70) ? Expr::get_attr(entityish(), "name") : any(), gen_pattern(rng));
      case 9: return Expr::is(entityish(), rng.pick(untyped_entity_types()));
      case 10: {
        ExprPtr set = rng.chance(70) ? Expr::get_attr(entityish(), "tags") : any();
        switch (rng.below(3)) {
          case 0: return Expr::binary(BinaryOp::Contains, set, Expr::string(rng.pick(kStrings)));
          case 1: return Expr::binary(BinaryOp::ContainsAll, set, Expr::set({Expr::string(rng.pick(kStrings))}));
          default: return Expr::binary(BinaryOp::ContainsAny, set, any());
        }
      }
      case 11: return Expr::ite(gen_bool(rng, d), gen_bool(rng, d), gen_bool(rng, d));
      case 12: return attr_of();  // `flag`, or a type error
      default: return any();
    }
  }
  switch (rng.below(18)) {
    case 0: {
      std::vector<ExprPtr> elems;
      for (size_t i = rng.below(4); i > 0; --i) elems.push_back(any());
      return Expr::set(std::move(elems));
    }
    case 1: {
      std::vector<std::pair<std::string, ExprPtr>> fields;
      std::set<std::string> used;
      for (size_t i = rng.below(3); i > 0; --i) {
        std::string k = rng.pick(kAttrs);
        if (used.insert(k).second) fields.emplace_back(k, any());
      }
      return Expr::record(std::move(fields));
    }
    case 2:
    case 3: return attr_of();
    case 4: return Expr::get_attr(any(), rng.pick(kAttrs));
    case 5: return Expr::has_attr(any(), rng.pick(kAttrs));
    case 6: return Expr::and_(any(), any());
    case 7: return Expr::or_(any(), any());
    case 8: return Expr::not_(any());
    case 9: return Expr::neg(any());
    case 10: return Expr::binary(static_cast<BinaryOp>(rng.below(9)), any(), any());
    case 11: return Expr::like(any(), gen_pattern(rng));
    case 12: return Expr::is(any(), rng.pick(untyped_entity_types()));
    case 13: return Expr::mul_const(rng.chance(80) ? rng.range(-3, 3) : gen_long(rng), any());
    case 14: return Expr::ite(any(), any(), any());
    case 15: return Expr::binary(rng.chance(50) ? BinaryOp::Add : BinaryOp::Sub, attr_of(), any());
    default: return gen_bool(rng, depth);
  }
}

ScopeConstraint gen_scope(Rng& rng, bool principal) {
  switch (rng.below(4)) {
    case 0:
    case 3: return ScopeConstraint::any();
    case 1: {
      const char* t = principal ? (rng.chance(70) ? "User" : "Group") : (rng.chance(70) ? "Doc" : "Folder");
      return ScopeConstraint::eq(EntityRef{t, pick_id(rng, 4)});
    }
    default: {
      const char* t = principal ? (rng.chance(70) ? "Group" : "User") : (rng.chance(70) ? "Folder" : "Doc");
      return ScopeConstraint::in(EntityRef{t, pick_id(rng, 4)});
    }
  }
}

ActionConstraint gen_action_scope(Rng& rng) {
  ActionConstraint a;
  switch (rng.below(4)) {
    case 0: break;
    case 1:
      a.kind = ActionConstraint::Kind::Eq;
      a.refs = {untyped_action(rng)};
      break;
    case 2:
      a.kind = ActionConstraint::Kind::In;
      a.refs = {untyped_action(rng)};
      break;
    default:
      a.kind = ActionConstraint::Kind::InSet;
      for (size_t i = rng.below(3) + 1; i > 0; --i) a.refs.push_back(untyped_action(rng));
      break;
  }
  return a;
}

}  // namespace

ExprPtr gen_expr(Rng& rng, size_t depth) { return gen_expr_impl(rng, depth, rng.chance(70)); }

Policy gen_policy(Rng& rng, const GenConfig& cfg, std::string id) {
  Policy p;
  p.id = std::move(id);
  p.effect = rng.chance(60) ? Effect::Permit : Effect::Forbid;
  p.principal = gen_scope(rng, true);
  p.action = gen_action_scope(rng);
  p.resource = gen_scope(rng, false);
  for (size_t i = rng.chance(30) ? 0 : 1 + rng.below(2); i > 0; --i) {
    p.conditions.push_back(Condition{rng.chance(75), gen_expr_impl(rng, 1 + rng.below(cfg.max_depth), true)});
  }
  return p;
}

PolicySet gen_policies(Rng& rng, const GenConfig& cfg) {
  std::vector<Policy> ps;
  size_t n = rng.below(cfg.max_policies + 1);
  for (size_t i = 0; i < n; ++i) ps.push_back(gen_policy(rng, cfg, "p" + std::to_string(i)));
  return *PolicySet::create(std::move(ps));
}

PolicySet gen_policies(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  return gen_policies(rng, cfg);
}

PolicySet gen_linked_policies(Rng& rng, const GenConfig& cfg) {
  std::vector<Policy> ps;
  std::vector<TemplateLink> links;
  size_t statics = rng.below(cfg.max_policies / 2 + 1);
  for (size_t i = 0; i < statics; ++i) ps.push_back(gen_policy(rng, cfg, "p" + std::to_string(i)));
  size_t templates = 1 + rng.below(3);
  for (size_t t = 0; t < templates; ++t) {
    Policy tp = gen_policy(rng, cfg, "t" + std::to_string(t));
    bool ps_slot = rng.chance(70), rs_slot = rng.chance(60) || !ps_slot;
    if (ps_slot) {
      tp.principal = rng.chance(50) ? ScopeConstraint::eq(SlotId::Principal) : ScopeConstraint::in(SlotId::Principal);
    }
    if (rs_slot) {
      tp.resource = rng.chance(50) ? ScopeConstraint::eq(SlotId::Resource) : ScopeConstraint::in(SlotId::Resource);
    }
    for (size_t l = 1 + rng.below(3); l > 0; --l) {
      TemplateLink link;
      link.template_id = tp.id;
      link.link_id = tp.id + "-link" + std::to_string(links.size());
      if (ps_slot) link.bindings[SlotId::Principal] = EntityRef{rng.chance(60) ? "Group" : "User", pick_id(rng, 4)};
      if (rs_slot) link.bindings[SlotId::Resource] = EntityRef{rng.chance(60) ? "Folder" : "Doc", pick_id(rng, 4)};
      links.push_back(std::move(link));
    }
    ps.push_back(std::move(tp));
  }
  auto set = PolicySet::create(std::move(ps), std::move(links));
  return std::move(*set);
}

namespace {

const std::vector<std::string> kAnyStrings = {"",   "plain", "with \"quotes\"", "back\\slash", "tab\there",
                                              "nl\nx", "nul\x01", "\xc3\xbc\xe2\x82\xac", "*star*", "if"};
const std::vector<std::string> kAnyNames = {"a", "b_c", "if", "then", "has", "like", "true", "in", "x1",
                                            "with space", "", "\xc3\xa9t\xc3\xa9"};
const std::vector<std::string> kAnyTypes = {"User", "A::B", "ns::Deep::Type", "T_1", "Action"};

EntityRef any_entity(Rng& rng) { return EntityRef{rng.pick(kAnyTypes), rng.pick(kAnyStrings)}; }

ExprPtr any_expr(Rng& rng, size_t depth) {
  if (depth <= 1 || rng.chance(15)) {
    switch (rng.below(6)) {
      case 0: return Expr::boolean(rng.chance(50));
      case 1: return Expr::integer(gen_long(rng));
      case 2: return Expr::string(rng.pick(kAnyStrings));
      case 3: return Expr::entity(any_entity(rng));
      default: return Expr::variable(static_cast<Var>(rng.below(4)));
    }
  }
  size_t d = depth - 1;
  auto sub = [&]() { return any_expr(rng, d); };
  switch (rng.below(16)) {
    case 0: {
      std::vector<ExprPtr> elems;
      for (size_t i = rng.below(4); i > 0; --i) elems.push_back(sub());
      return Expr::set(std::move(elems));
    }
    case 1: {
      std::vector<std::pair<std::string, ExprPtr>> fields;
      std::set<std::string> used;
      for (size_t i = rng.below(4); i > 0; --i) {
        std::string k = rng.pick(kAnyNames);
        if (used.insert(k).second) fields.emplace_back(k, sub());
      }
      return Expr::record(std::move(fields));
    }
    case 2: return Expr::get_attr(sub(), rng.pick(kAnyNames));
    case 3: return Expr::has_attr(sub(), rng.pick(kAnyNames));
    case 4: return Expr::and_(sub(), sub());
    case 5: return Expr::or_(sub(), sub());
    case 6: return Expr::not_(sub());
    case 7: return Expr::neg(sub());
    case 8:
    case 9: return Expr::binary(static_cast<BinaryOp>(rng.below(9)), sub(), sub());
    case 10: return Expr::like(sub(), gen_pattern(rng));
    case 11: return Expr::is(sub(), rng.pick(kAnyTypes));
    case 12: return Expr::mul_const(gen_long(rng), sub());
    case 13: return Expr::ite(sub(), sub(), sub());
    default: return Expr::binary(BinaryOp::In, sub(), sub());
  }
}

ScopeConstraint any_scope(Rng& rng, SlotId slot) {
  switch (rng.below(8)) {
    case 0:
    case 1:
    case 2: return ScopeConstraint::any();
    case 3:
    case 4: return ScopeConstraint::eq(any_entity(rng));
    case 5: return ScopeConstraint::in(any_entity(rng));
    case 6: return ScopeConstraint::eq(slot);
    default: return ScopeConstraint::in(slot);
  }
}

}  // namespace

Policy gen_any_policy(Rng& rng, size_t depth) {
  Policy p;
  p.effect = rng.chance(50) ? Effect::Permit : Effect::Forbid;
  p.principal = any_scope(rng, SlotId::Principal);
  p.resource = any_scope(rng, SlotId::Resource);
  switch (rng.below(4)) {
    case 0: break;
    case 1:
      p.action.kind = ActionConstraint::Kind::Eq;
      p.action.refs = {EntityRef{kActionType, rng.pick(kAnyStrings)}};
      break;
    case 2:
      p.action.kind = ActionConstraint::Kind::In;
      p.action.refs = {EntityRef{kActionType, rng.pick(kAnyStrings)}};
      break;
    default:
      p.action.kind = ActionConstraint::Kind::InSet;
      for (size_t i = rng.below(3) + 1; i > 0; --i) p.action.refs.push_back(EntityRef{"Action", rng.pick(kAnyStrings)});
      break;
  }
  for (size_t i = rng.below(3); i > 0; --i) p.conditions.push_back(Condition{rng.chance(60), any_expr(rng, depth)});
  for (size_t i = rng.below(3); i > 0; --i) {
    static const std::vector<std::string> keys = {"id", "doc", "owner", "x_1"};
    p.annotations[rng.pick(keys)] = rng.pick(kAnyStrings);
  }
  return p;
}

// ---- schema-directed ----

namespace {

std::vector<EntityRef> of_type(const std::vector<EntityRef>& entities, const std::string& type) {
  std::vector<EntityRef> out;
  for (const auto& e : entities) {
    if (e.type == type) out.push_back(e);
  }
  return out;
}

}  // namespace

Value gen_value(Rng& rng, const Type& type, const std::vector<EntityRef>& entities) {
  switch (type.kind()) {
    case Type::Kind::Bool: return Value::boolean(rng.chance(50));
    case Type::Kind::True: return Value::boolean(true);
    case Type::Kind::False: return Value::boolean(false);
    case Type::Kind::Long: return Value::integer(rng.chance(95) ? rng.range(-3, 6) : gen_long(rng));
    case Type::Kind::String: return Value::string(rng.pick(kStrings));
    case Type::Kind::Entity: {
      auto candidates = of_type(entities, type.entity_name());
      if (candidates.empty()) return Value::entity(EntityRef{type.entity_name(), "0"});
      return Value::entity(rng.pick(candidates));
    }
    case Type::Kind::Set: {
      std::vector<Value> elems;
      for (size_t i = rng.below(4); i > 0; --i) elems.push_back(gen_value(rng, type.element(), entities));
      return Value::set(std::move(elems));
    }
    case Type::Kind::Record: {
      ValueRecord r;
      for (const auto& a : type.attributes()) {
        if (a.required || rng.chance(50)) r[a.name] = gen_value(rng, a.type, entities);
      }
      return Value::record(std::move(r));
    }
  }
  return Value::boolean(false);
}

Conforming gen_conforming(Rng& rng, const GenConfig& cfg, const Schema& schema,
                          const std::vector<EntityRef>& required) {
  Conforming out;
  auto envs = environments(schema);
  if (envs.empty()) {
    out.store = EntityStore{}.with_actions(schema);
    return out;
  }
  out.env = rng.pick(envs);

  std::vector<EntityRef> uids;
  size_t n = std::max<size_t>(1, cfg.max_entities);
  for (const auto& [name, decl] : schema.entity_types) {
    size_t count = 1 + rng.below(n);
    for (size_t i = 0; i < count; ++i) uids.push_back(EntityRef{name, "e" + std::to_string(i)});
  }
  for (const auto& r : required) {
    if (schema.entity_type(r.type)) uids.push_back(r);
  }
  std::sort(uids.begin(), uids.end());
  uids.erase(std::unique(uids.begin(), uids.end()), uids.end());

  rng.shuffle(uids);
  std::vector<EntityInput> inputs;
  for (size_t i = 0; i < uids.size(); ++i) {
    const EntityTypeDecl* decl = schema.entity_type(uids[i].type);
    EntityInput in;
    in.uid = uids[i];
    in.attrs = gen_value(rng, decl->attributes, uids);
    for (size_t j = 0; j < i; ++j) {
      if (decl->parent_types.count(uids[j].type) && rng.chance(cfg.edge_percent * 2)) in.parents.push_back(uids[j]);
    }
    inputs.push_back(std::move(in));
  }
  out.store = EntityStore::build(std::move(inputs))->with_actions(schema);

  auto principals = of_type(uids, out.env.principal_type);
  auto resources = of_type(uids, out.env.resource_type);
  out.request.principal = rng.pick(principals);
  out.request.action = out.env.action;
  out.request.resource = rng.pick(resources);
  out.request.context = gen_value(rng, out.env.context, uids);
  return out;
}

Conforming gen_conforming(const GenConfig& cfg, const Schema& schema, const std::vector<EntityRef>& required) {
  Rng rng(cfg.seed);
  return gen_conforming(rng, cfg, schema, required);
}

namespace {

// Expressions reachable from the request variables by attribute access,
// with the `has` tests that make optional steps safe.
struct Path {
  ExprPtr expr;
  Type type;
  std::vector<ExprPtr> guards;
};

class TypedGen {
 public:
  TypedGen(Rng& rng, const Schema& schema, const RequestEnv& env, const std::vector<EntityRef>& entities)
      : rng_(rng), schema_(schema), env_(env), entities_(entities) {
    add_paths(Expr::variable(Var::Principal), Type::entity(env.principal_type), {}, 2);
    add_paths(Expr::variable(Var::Resource), Type::entity(env.resource_type), {}, 2);
    add_paths(Expr::variable(Var::Context), env.context, {}, 2);
  }

  ExprPtr gen(const Type& t, size_t depth) {
    switch (t.kind()) {
      case Type::Kind::Bool:
      case Type::Kind::True:
      case Type::Kind::False: return gen_bool(depth);
      case Type::Kind::Long: return gen_long_expr(depth);
      case Type::Kind::String: {
        if (auto p = path_of(t); p && rng_.chance(60)) return p;
        if (depth > 1 && rng_.chance(15)) return Expr::ite(gen_bool(depth - 1), gen(t, depth - 1), gen(t, depth - 1));
        return Expr::string(rng_.pick(kStrings));
      }
      case Type::Kind::Entity: {
        if (auto p = path_of(t); p && rng_.chance(60)) return p;
        if (depth > 1 && rng_.chance(15)) return Expr::ite(gen_bool(depth - 1), gen(t, depth - 1), gen(t, depth - 1));
        auto candidates = of_type(entities_, t.entity_name());
        if (candidates.empty()) return path_of(t);
        return Expr::entity(rng_.pick(candidates));
      }
      case Type::Kind::Set: {
        if (auto p = path_of(t); p && rng_.chance(60)) return p;
        std::vector<ExprPtr> elems;
        for (size_t i = 1 + rng_.below(3); i > 0; --i) {
          ExprPtr e = gen(t.element(), depth > 1 ? depth - 1 : 1);
          if (!e) return nullptr;
          elems.push_back(e);
        }
        return Expr::set(std::move(elems));
      }
      case Type::Kind::Record: {
        if (auto p = path_of(t); p && rng_.chance(70)) return p;
        std::vector<std::pair<std::string, ExprPtr>> fields;
        for (const auto& a : t.attributes()) {
          if (!a.required && rng_.chance(50)) continue;
          ExprPtr e = gen(a.type, depth > 1 ? depth - 1 : 1);
          if (!e) return nullptr;
          fields.emplace_back(a.name, e);
        }
        return Expr::record(std::move(fields));
      }
    }
    return nullptr;
  }

 private:
  void add_paths(const ExprPtr& e, const Type& t, std::vector<ExprPtr> guards, size_t steps) {
    paths_.push_back(Path{e, t, guards});
    if (steps == 0) return;
    const Type* rec = &t;
    if (t.is_entity()) {
      const EntityTypeDecl* decl = schema_.entity_type(t.entity_name());
      if (!decl) return;
      rec = &decl->attributes;
    }
    if (!rec->is_record()) return;
    for (const auto& a : rec->attributes()) {
      auto g = guards;
      if (!a.required) g.push_back(Expr::has_attr(e, a.name));
      add_paths(Expr::get_attr(e, a.name), a.type, std::move(g), steps - 1);
    }
  }

  // An unguarded path of a type below `t`.
  ExprPtr path_of(const Type& t) {
    std::vector<const Path*> ok;
    for (const auto& p : paths_) {
      if (p.guards.empty() && is_subtype(p.type, t)) ok.push_back(&p);
    }
    if (ok.empty()) return nullptr;
    return rng_.pick(ok)->expr;
  }

  const Path& any_path() { return paths_[rng_.below(paths_.size())]; }

  Type random_type() {
    switch (rng_.below(5)) {
      case 0: return Type::long_type();
      case 1: return Type::string_type();
      case 2: return Type::boolean();
      default: {
        const Path& p = any_path();
        return p.type.erase_singletons();
      }
    }
  }

  // A boolean test that uses `p`, guarded by its `has` chain.
  ExprPtr use_path(const Path& p, size_t depth) {
    ExprPtr body;
    size_t d = depth > 1 ? depth - 1 : 1;
    switch (p.type.kind()) {
      case Type::Kind::Bool:
      case Type::Kind::True:
      case Type::Kind::False: body = p.expr; break;
      case Type::Kind::Long:
        body = Expr::binary(rng_.chance(50) ? BinaryOp::Less : BinaryOp::LessEq, p.expr, gen_long_expr(d));
        break;
      case Type::Kind::String:
        body = rng_.chance(50) ? Expr::like(p.expr, gen_pattern(rng_))
                               : Expr::binary(BinaryOp::Eq, p.expr, gen(p.type, d));
        break;
      case Type::Kind::Entity: {
        if (rng_.chance(50)) {
          body = Expr::binary(BinaryOp::Eq, p.expr, gen(p.type, d));
        } else {
          const EntityTypeDecl* decl = schema_.entity_type(p.type.entity_name());
          std::vector<std::string> targets = {p.type.entity_name()};
          if (decl) targets.insert(targets.end(), decl->ancestor_types.begin(), decl->ancestor_types.end());
          ExprPtr rhs = gen(Type::entity(rng_.pick(targets)), d);
          body = rhs ? Expr::binary(BinaryOp::In, p.expr, rhs) : Expr::is(p.expr, p.type.entity_name());
        }
        break;
      }
      case Type::Kind::Set: {
        ExprPtr x = gen(p.type.element(), d);
        if (!x) {
          body = Expr::binary(BinaryOp::ContainsAll, p.expr, p.expr);
        } else if (rng_.chance(50)) {
          body = Expr::binary(BinaryOp::Contains, p.expr, x);
        } else {
          body = Expr::binary(rng_.chance(50) ? BinaryOp::ContainsAll : BinaryOp::ContainsAny, p.expr,
                              Expr::set({x}));
        }
        break;
      }
      case Type::Kind::Record: {
        std::string name = p.type.attributes().empty() ? "nothing" : rng_.pick(p.type.attributes()).name;
        body = Expr::has_attr(p.expr, name);
        break;
      }
    }
    for (auto it = p.guards.rbegin(); it != p.guards.rend(); ++it) body = Expr::and_(*it, body);
    return body;
  }

  ExprPtr gen_bool(size_t depth) {
    if (depth <= 1) {
      if (rng_.chance(30)) return Expr::boolean(rng_.chance(50));
      return use_path(any_path(), 1);
    }
    size_t d = depth - 1;
    switch (rng_.below(11)) {
      case 0: return Expr::and_(gen_bool(d), gen_bool(d));
      case 1: return Expr::or_(gen_bool(d), gen_bool(d));
      case 2: return Expr::not_(gen_bool(d));
      case 3: return Expr::ite(gen_bool(d), gen_bool(d), gen_bool(d));
      case 4: {
        Type t = random_type();
        ExprPtr a = gen(t, d), b = gen(t, d);
        if (!a || !b) return use_path(any_path(), d);
        return Expr::binary(BinaryOp::Eq, a, b);
      }
      case 5: return Expr::binary(rng_.chance(50) ? BinaryOp::Less : BinaryOp::LessEq, gen_long_expr(d),
                                  gen_long_expr(d));
      case 6: {
        const Path& p = any_path();
        ExprPtr body = Expr::is(p.expr, rng_.pick(std::vector<std::string>{env_.principal_type, env_.resource_type}));
        if (!p.type.is_entity()) return use_path(p, d);
        for (auto it = p.guards.rbegin(); it != p.guards.rend(); ++it) body = Expr::and_(*it, body);
        return body;
      }
      case 7: {
        const Path& p = any_path();
        if (!(p.type.is_entity() || p.type.is_record())) return use_path(p, d);
        std::string name = rng_.chance(80) ? rng_.pick(kAttrs) : std::string("owner");
        if (p.type.is_record() && !p.type.attributes().empty() && rng_.chance(60)) {
          name = rng_.pick(p.type.attributes()).name;
        }
        if (p.type.is_entity()) {
          const EntityTypeDecl* decl = schema_.entity_type(p.type.entity_name());
          if (decl && !decl->attributes.attributes().empty() && rng_.chance(60)) {
            name = rng_.pick(decl->attributes.attributes()).name;
          }
        }
        ExprPtr body = Expr::has_attr(p.expr, name);
        for (auto it = p.guards.rbegin(); it != p.guards.rend(); ++it) body = Expr::and_(*it, body);
        return body;
      }
      default: return use_path(any_path(), depth);
    }
  }

  ExprPtr gen_long_expr(size_t depth) {
    if (depth <= 1 || rng_.chance(30)) {
      if (auto p = path_of(Type::long_type()); p && rng_.chance(50)) return p;
      return Expr::integer(rng_.chance(90) ? rng_.range(-3, 6) : gen_long(rng_));
    }
    size_t d = depth - 1;
    switch (rng_.below(5)) {
      case 0: return Expr::binary(BinaryOp::Add, gen_long_expr(d), gen_long_expr(d));
      case 1: return Expr::binary(BinaryOp::Sub, gen_long_expr(d), gen_long_expr(d));
      case 2: return Expr::neg(gen_long_expr(d));
      case 3: return Expr::mul_const(rng_.chance(80) ? rng_.range(-3, 3) : gen_long(rng_), gen_long_expr(d));
      default: return Expr::ite(gen_bool(d), gen_long_expr(d), gen_long_expr(d));
    }
  }

  Rng& rng_;
  const Schema& schema_;
  const RequestEnv& env_;
  const std::vector<EntityRef>& entities_;
  std::vector<Path> paths_;
};

}  // namespace

ExprPtr gen_typed_expr(Rng& rng, const Schema& schema, const RequestEnv& env, const Type& type, size_t depth,
                       const std::vector<EntityRef>& entities) {
  TypedGen g(rng, schema, env, entities);
  for (int attempt = 0; attempt < 20; ++attempt) {
    ExprPtr e = g.gen(type, depth);
    if (!e) continue;
    auto t = typecheck(e, env, schema);
    if (t && is_subtype(t->type, type)) return e;
  }
  return nullptr;
}

namespace {

void collect_literals(const ExprPtr& e, std::set<EntityRef>& out) {
  if (e->kind() == Expr::Kind::Lit && e->literal().is_entity()) out.insert(e->literal().as_entity());
  for (const auto& c : e->children()) collect_literals(c, out);
}

}  // namespace

std::vector<EntityRef> entity_literals(const PolicySet& set) {
  std::set<EntityRef> out;
  for (const auto& p : set.policies()) {
    for (const auto* s : {&p.principal, &p.resource}) {
      if (const EntityRef* r = s->entity()) out.insert(*r);
    }
    for (const auto& r : p.action.refs) out.insert(r);
    for (const auto& c : p.conditions) collect_literals(c.body, out);
  }
  return {out.begin(), out.end()};
}

}  // namespace arbiter::testkit
