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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arbiter/entities.h"
#include "arbiter/result.h"
#include "arbiter/schema.h"
#include "arbiter/validator.h"

namespace arbiter::testkit {

struct EnumConfig {
  size_t bound = 1;  // ids per entity type: "0" .. bound-1
  uint64_t ceiling = 5'000'000;
  // Hierarchies are subsets of the candidate (entity, ancestor) pairs.
  size_t max_hierarchy_pairs = 20;
  // Finite menus for the unbounded primitive types.
  std::vector<int64_t> longs = {0, 1};
  std::vector<std::string> strings = {"", "a"};
};

struct BoundTooLarge {
  uint64_t states;  // saturates at UINT64_MAX
  uint64_t ceiling;
  std::string detail;
};

// Return false to stop early.
using EnumVisitor = std::function<bool(const RequestEnv&, const EntityStore&, const Request&)>;

// Every conforming store (transitively closed, acyclic hierarchy; every
// attribute assignment from the menus) and, per store, every request of
// every environment. Stores include the schema's actions. Returns the
// number of (store, request) pairs visited.
Result<uint64_t, BoundTooLarge> enumerate_conforming(const Schema& schema, const EnumConfig& cfg,
                                                     const EnumVisitor& visit);

// Upper bound on the pairs enumerate_conforming visits, before filtering
// hierarchies for transitivity.
Result<uint64_t, BoundTooLarge> state_bound(const Schema& schema, const EnumConfig& cfg);

// All values of `type` over the menus and the given entities.
std::vector<Value> value_domain(const Type& type, const std::vector<EntityRef>& entities, const EnumConfig& cfg);

}  // namespace arbiter::testkit
