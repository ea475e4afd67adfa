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
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "arbiter/authorizer.h"
#include "arbiter/entities.h"
#include "arbiter/expr.h"
#include "arbiter/policy.h"
#include "arbiter/schema.h"
#include "arbiter/validator.h"

namespace arbiter::testkit {

// Portable across standard libraries, unlike the <random> distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  uint64_t next() { return engine_(); }
  size_t below(size_t n) { return n == 0 ? 0 : static_cast<size_t>(engine_() % n); }
  bool chance(unsigned percent) { return below(100) < percent; }
  int64_t range(int64_t lo, int64_t hi) { return lo + static_cast<int64_t>(below(static_cast<size_t>(hi - lo + 1))); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct GenConfig {
  uint64_t seed = 0;
  size_t max_entities = 6;  // per entity type
  size_t max_depth = 4;     // expression height
  size_t max_policies = 6;
  // Per-pair edge probability, so edge count grows with the square of the
  // entity count.
  unsigned edge_percent = 20;
};

// ---- untyped generation (any shape, ill-typed included) ----

// Entity types and ids the untyped generators draw from.
const std::vector<std::string>& untyped_entity_types();
const std::vector<std::string>& untyped_actions();

EntityStore gen_store(const GenConfig& cfg);
EntityStore gen_store(Rng& rng, const GenConfig& cfg);
// Mostly entities from `store`; sometimes absent ones.
Request gen_request(Rng& rng, const EntityStore& store);
Request gen_request(const GenConfig& cfg, const EntityStore& store);
ExprPtr gen_expr(Rng& rng, size_t depth);
Policy gen_policy(Rng& rng, const GenConfig& cfg, std::string id);
PolicySet gen_policies(const GenConfig& cfg);
PolicySet gen_policies(Rng& rng, const GenConfig& cfg);
// Static policies plus templates with one to three links each.
PolicySet gen_linked_policies(Rng& rng, const GenConfig& cfg);
// Arbitrary policies for round-trip testing: every construct the printer
// handles, annotations and templates included.
Policy gen_any_policy(Rng& rng, size_t depth);

// ---- schema-directed generation ----

// Store and request conforming to `schema` for one of its request
// environments. Every entity the store or request mentions is present, as
// is every entity in `required` whose type the schema declares.
struct Conforming {
  RequestEnv env;
  EntityStore store;  // includes the schema's actions
  Request request;
};
Conforming gen_conforming(Rng& rng, const GenConfig& cfg, const Schema& schema,
                          const std::vector<EntityRef>& required = {});
Conforming gen_conforming(const GenConfig& cfg, const Schema& schema, const std::vector<EntityRef>& required = {});

Value gen_value(Rng& rng, const Type& type, const std::vector<EntityRef>& entities);

// Expression that typechecks under `env` with a type below `type`, or
// nullptr after a bounded number of attempts. Entity literals come from
// `entities`.
ExprPtr gen_typed_expr(Rng& rng, const Schema& schema, const RequestEnv& env, const Type& type, size_t depth,
                       const std::vector<EntityRef>& entities);

// Entity literals appearing anywhere in the set's policies.
std::vector<EntityRef> entity_literals(const PolicySet& set);

}  // namespace arbiter::testkit
