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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arbiter/expr.h"
#include "arbiter/result.h"
#include "arbiter/value.h"

namespace arbiter {

enum class Effect { Permit, Forbid };

// Principal or resource constraint in a policy scope.
struct ScopeConstraint {
  enum class Kind { Any, Eq, In };
  Kind kind = Kind::Any;
  // Entity or slot; meaningless when kind == Any.
  std::variant<EntityRef, SlotId> target;

  static ScopeConstraint any() { return {}; }
  static ScopeConstraint eq(EntityRef r) { return {Kind::Eq, std::move(r)}; }
  static ScopeConstraint in(EntityRef r) { return {Kind::In, std::move(r)}; }
  static ScopeConstraint eq(SlotId s) { return {Kind::Eq, s}; }
  static ScopeConstraint in(SlotId s) { return {Kind::In, s}; }

  bool is_slot() const { return kind != Kind::Any && std::holds_alternative<SlotId>(target); }
  const EntityRef* entity() const {
    return kind == Kind::Any ? nullptr : std::get_if<EntityRef>(&target);
  }
  bool operator==(const ScopeConstraint&) const = default;
};

struct ActionConstraint {
  enum class Kind { Any, Eq, In, InSet };
  Kind kind = Kind::Any;
  std::vector<EntityRef> refs;  // one entry for Eq/In, any number for InSet

  bool operator==(const ActionConstraint&) const = default;
};

struct Condition {
  bool is_when = true;  // false: `unless`
  ExprPtr body;
};

struct Policy {
  std::string id;
  Effect effect = Effect::Permit;
  ScopeConstraint principal;
  ActionConstraint action;
  ScopeConstraint resource;
  std::vector<Condition> conditions;
  std::map<std::string, std::string> annotations;

  bool is_template() const;
  std::vector<SlotId> slots() const;
};

// Structural equality ignoring ids; used by round-trip tests.
bool policy_equal(const Policy& a, const Policy& b);

struct PolicyError {
  enum class Kind { NotClosed, UnboundSlot, UnknownSlot };
  Kind kind;
  std::string message;
};

// Desugaring that keeps template slots in place; used to typecheck templates.
ExprPtr desugar(const Policy& policy);

// Desugars a closed policy to `p && (a && (r && c1 && ... && cn))`,
// right-nested throughout.
Result<ExprPtr, PolicyError> toexp(const Policy& policy);

using SlotBindings = std::map<SlotId, EntityRef>;

// Fills the template's slots. A nonempty `link_id` becomes the result's id
// and is recorded as its `@id` annotation.
Result<Policy, PolicyError> link(const Policy& tmpl, const SlotBindings& bindings,
                                 const std::string& link_id = "");

}  // namespace arbiter
