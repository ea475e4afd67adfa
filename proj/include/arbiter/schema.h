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
#include <set>
#include <string>
#include <vector>

#include "arbiter/types.h"
#include "arbiter/value.h"

namespace arbiter {

inline constexpr const char* kActionType = "Action";

struct EntityTypeDecl {
  std::string name;
  Type attributes = Type::record({});
  std::set<std::string> parent_types;    // as declared
  std::set<std::string> ancestor_types;  // transitive closure of parent_types
};

struct ActionDecl {
  EntityRef uid;
  // False for actions that only appear as a parent of another action; such
  // groups have no request environments.
  bool declared = true;
  std::vector<std::string> principal_types;
  std::vector<std::string> resource_types;
  Type context = Type::record({});
  std::set<EntityRef> parents;
  std::set<EntityRef> ancestors;  // transitive closure of parents
};

// Entity schema (attribute types and allowed ancestor types per entity type)
// plus action schema (applies-to sets, context type, action groups).
class Schema {
 public:
  std::map<std::string, EntityTypeDecl> entity_types;
  std::map<EntityRef, ActionDecl> actions;

  const EntityTypeDecl* entity_type(const std::string& name) const;
  const ActionDecl* action(const EntityRef& uid) const;
  static bool is_action_type(const std::string& type) { return type == kActionType; }

  // Reflexive action-group membership.
  bool action_in(const EntityRef& action, const EntityRef& group) const;

  // Fills ancestor_types and ActionDecl::ancestors. Returns the uid of an
  // action on a cycle, or nullopt.
  std::optional<EntityRef> compute_closures();
};

}  // namespace arbiter
