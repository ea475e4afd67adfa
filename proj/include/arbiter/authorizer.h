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
#include <string_view>
#include <utility>
#include <vector>

#include "arbiter/entities.h"
#include "arbiter/evaluator.h"
#include "arbiter/policy.h"
#include "arbiter/result.h"

namespace arbiter {

struct TemplateLink {
  std::string template_id;
  SlotBindings bindings;
  std::string link_id;
};

// Index key component: an entity, or nullopt for the `Any` bucket.
using IndexKey = std::pair<std::optional<EntityRef>, std::optional<EntityRef>>;

class PolicyIndex {
 public:
  // Keyed by <pof, rof>; values are positions in PolicySet::policies().
  std::map<IndexKey, std::vector<size_t>> buckets;

  static IndexKey key_of(const Policy& p);
};

// Closed policies plus templates and their links. Links are materialized as
// closed policies at construction, so policies() is what gets evaluated.
class PolicySet {
 public:
  PolicySet() = default;

  // Fails on duplicate ids, links naming unknown templates, or bad bindings.
  static Result<PolicySet, std::string> create(std::vector<Policy> policies,
                                               std::vector<TemplateLink> links = {});

  const std::vector<Policy>& policies() const { return policies_; }
  const std::vector<ExprPtr>& conditions() const { return conditions_; }
  const std::vector<Policy>& templates() const { return templates_; }
  const std::vector<TemplateLink>& links() const { return links_; }
  const PolicyIndex& index() const { return index_; }
  const Policy* find(const std::string& id) const;

 private:
  std::vector<Policy> policies_;
  std::vector<ExprPtr> conditions_;  // toexp of each policy
  std::vector<Policy> templates_;
  std::vector<TemplateLink> links_;
  PolicyIndex index_;
};

// Link file: `[{"template": id, "id": link id, "principal": uid, "resource": uid}]`,
// with `principal`/`resource` present only for the slots the template has.
Result<std::vector<TemplateLink>, std::string> parse_links(std::string_view json_text);

PolicyIndex build_index(const PolicySet& set);

// Positions of the policies whose key is in
// (anc(P) ∪ {P, Any}) × (anc(R) ∪ {R, Any}), ascending.
std::vector<size_t> slice(const PolicyIndex& index, const EntityStore& store, const Request& request);

struct Decision {
  enum class Verdict { Allow, Deny };
  Verdict verdict = Verdict::Deny;
  std::set<std::string> determining;
  std::vector<std::pair<std::string, EvalError>> errors;  // sorted by policy id
};

// Forbid overrides permit; no satisfied permit means deny. Policies that
// error count as unsatisfied and are reported in `errors`.
Decision authorize(const PolicySet& set, const EntityStore& store, const Request& request,
                   bool use_slicing = true);

}  // namespace arbiter
