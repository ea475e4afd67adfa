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

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arbiter/authorizer.h"
#include "arbiter/expr.h"
#include "arbiter/policy.h"
#include "arbiter/result.h"
#include "arbiter/schema.h"
#include "arbiter/types.h"

namespace arbiter {

struct RequestEnv {
  std::string principal_type;
  EntityRef action;
  std::string resource_type;
  Type context = Type::record({});

  // `Action::"view" (User, Document)`
  std::string to_string() const;
};

// One env per (principal type, resource type) pair of each declared action,
// in schema order.
std::vector<RequestEnv> environments(const Schema& schema);

// Optional attribute accesses known to be safe. `top()` stands for the
// arbitrary set granted to False-typed expressions; it absorbs under union
// and is the identity of intersection.
class Capability {
 public:
  static Capability empty() { return Capability(false); }
  static Capability top() { return Capability(true); }
  static Capability single(ExprPtr e, std::string attr);

  bool is_top() const { return top_; }
  bool contains(const ExprPtr& e, const std::string& attr) const;
  Capability unite(const Capability& other) const;
  Capability intersect(const Capability& other) const;
  size_t size() const { return items_.size(); }
  const std::vector<std::pair<ExprPtr, std::string>>& items() const { return items_; }

 private:
  explicit Capability(bool top) : top_(top) {}
  void insert(const ExprPtr& e, const std::string& attr);
  bool top_;
  std::vector<std::pair<ExprPtr, std::string>> items_;
};

struct TypeError {
  enum class Kind {
    NotComparable,
    MissingAttribute,
    CapabilityRequired,
    HeterogeneousSet,
    UnknownEntityType,
    NonBooleanGuard,
    EmptySetLiteral,
    UnexpectedType,
  };
  Kind kind;
  std::string detail;
  std::string location;  // rendered offending subexpression
};

const char* type_error_name(TypeError::Kind k);

struct Typing {
  Type type;
  Capability effect = Capability::empty();
};

// Type of every node the checker visited, keyed by node address. Nodes in
// pruned branches are absent.
using TypeTable = std::unordered_map<const Expr*, Type>;

// `action` must already be replaced by the env's action literal. Slots are
// typed as the env's principal and resource types.
Result<Typing, TypeError> typecheck(const ExprPtr& expr, const RequestEnv& env, const Schema& schema,
                                    const Capability& incap = Capability::empty(),
                                    TypeTable* table = nullptr);

bool is_subtype(const Type& sub, const Type& super);
// Defined only for types that agree once True/False are erased to Bool.
std::optional<Type> least_upper_bound(const Type& a, const Type& b);

// Declared actions a policy's action constraint can match.
std::vector<EntityRef> matching_actions(const ActionConstraint& c, const Schema& schema);

// Environments a policy is checked in.
std::vector<RequestEnv> policy_environments(const Policy& p, const Schema& schema);

// The desugared policy with `action` replaced by the env's action.
ExprPtr specialize(const Policy& p, const RequestEnv& env);

struct EnvResult {
  RequestEnv env;
  std::optional<Type> type;
  std::optional<TypeError> error;
};

enum class ValidationWarning { AlwaysFalse, AlwaysTrue };
const char* warning_name(ValidationWarning w);

struct PolicyReport {
  std::string policy_id;
  bool is_template = false;
  std::vector<EnvResult> results;
  std::vector<ValidationWarning> warnings;
  bool valid() const;
};

struct ValidationReport {
  std::vector<PolicyReport> policies;
  bool valid() const;
};

PolicyReport validate_policy(const Policy& p, const Schema& schema);

// Checks templates (not their links) and static policies.
ValidationReport validate(const PolicySet& set, const Schema& schema);

}  // namespace arbiter
