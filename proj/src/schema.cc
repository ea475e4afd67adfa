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

#include "arbiter/schema.h"

#include <functional>
#include <optional>

namespace arbiter {

const EntityTypeDecl* Schema::entity_type(const std::string& name) const {
  auto it = entity_types.find(name);
  return it == entity_types.end() ? nullptr : &it->second;
}

const ActionDecl* Schema::action(const EntityRef& uid) const {
  auto it = actions.find(uid);
  return it == actions.end() ? nullptr : &it->second;
}

bool Schema::action_in(const EntityRef& action, const EntityRef& group) const {
  if (action == group) return true;
  const ActionDecl* a = this->action(action);
  return a && a->ancestors.count(group);
}

std::optional<EntityRef> Schema::compute_closures() {
  for (auto& [name, decl] : entity_types) {
    std::set<std::string> seen;
    std::vector<std::string> work(decl.parent_types.begin(), decl.parent_types.end());
    while (!work.empty()) {
      std::string t = work.back();
      work.pop_back();
      if (!seen.insert(t).second) continue;
      if (auto* d = entity_type(t)) work.insert(work.end(), d->parent_types.begin(), d->parent_types.end());
    }
    decl.ancestor_types = std::move(seen);
  }

  enum class Mark { None, Active, Done };
  std::map<EntityRef, Mark> mark;
  std::optional<EntityRef> cycle;
  std::function<void(const EntityRef&)> visit = [&](const EntityRef& uid) {
    auto& m = mark[uid];
    if (m == Mark::Done || cycle) return;
    if (m == Mark::Active) {
      cycle = uid;
      return;
    }
    m = Mark::Active;
    ActionDecl& decl = actions.at(uid);
    std::set<EntityRef> anc;
    for (const auto& p : decl.parents) {
      visit(p);
      if (cycle) return;
      anc.insert(p);
      const auto& pa = actions.at(p).ancestors;
      anc.insert(pa.begin(), pa.end());
    }
    decl.ancestors = std::move(anc);
    mark[uid] = Mark::Done;
  };
  for (const auto& [uid, decl] : actions) visit(uid);
  return cycle;
}

}  // namespace arbiter
