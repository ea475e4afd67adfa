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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arbiter/result.h"
#include "arbiter/schema.h"
#include "arbiter/value.h"

namespace arbiter {

struct EntityData {
  Value attrs = Value::empty_record();
  std::set<EntityRef> ancestors;  // transitively closed
};

struct Request {
  EntityRef principal;
  EntityRef action;
  EntityRef resource;
  Value context = Value::empty_record();
};

struct StoreError {
  enum class Kind { HierarchyCycle, DuplicateEntity, BadEntityRef, Malformed };
  Kind kind;
  std::string message;
};

const char* store_error_name(StoreError::Kind k);

// One entity as supplied by the application: direct parents only.
struct EntityInput {
  EntityRef uid;
  Value attrs = Value::empty_record();
  std::vector<EntityRef> parents;
};

class EntityStore {
 public:
  using Map = std::map<EntityRef, EntityData>;

  EntityStore() = default;

  // Closes the parent relation transitively. Parents need not be present in
  // the input. Fails with HierarchyCycle or DuplicateEntity.
  static Result<EntityStore, StoreError> build(std::vector<EntityInput> entities);
  // Takes already-closed data as is; callers must uphold the invariants.
  static EntityStore from_closed(Map entries);

  const EntityData* find(const EntityRef& r) const {
    auto it = entries_.find(r);
    return it == entries_.end() ? nullptr : &it->second;
  }
  // Empty for absent entities.
  const std::set<EntityRef>& ancestors_of(const EntityRef& r) const;
  const Map& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  // Copy with every schema action present and its group ancestry merged in.
  EntityStore with_actions(const Schema& schema) const;

  // Invariant checks used by tests and the loader's self-check.
  bool is_acyclic() const;
  bool is_transitive() const;

 private:
  Map entries_;
};

Result<EntityStore, StoreError> load_entities(std::string_view json_text);
Result<Request, StoreError> load_request(std::string_view json_text);

// Entities are written with their (closed) ancestor sets as `parents`.
std::string entities_to_json(const EntityStore& store);
std::string request_to_json(const Request& r);

}  // namespace arbiter
