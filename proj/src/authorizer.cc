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

#include "arbiter/authorizer.h"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace arbiter {

IndexKey PolicyIndex::key_of(const Policy& p) {
  auto part = [](const ScopeConstraint& c) -> std::optional<EntityRef> {
    if (const EntityRef* r = c.entity()) return *r;
    return std::nullopt;
  };
  return {part(p.principal), part(p.resource)};
}

Result<PolicySet, std::string> PolicySet::create(std::vector<Policy> policies, std::vector<TemplateLink> links) {
  PolicySet s;
  std::set<std::string> ids;
  for (auto& p : policies) {
    if (!ids.insert(p.id).second) return unexpected("duplicate policy id \"" + p.id + "\"");
    if (p.is_template()) s.templates_.push_back(std::move(p));
    else s.policies_.push_back(std::move(p));
  }
  for (const auto& l : links) {
    auto t = std::find_if(s.templates_.begin(), s.templates_.end(),
                          [&](const Policy& p) { return p.id == l.template_id; });
    if (t == s.templates_.end()) return unexpected("link \"" + l.link_id + "\" names unknown template \"" + l.template_id + "\"");
    if (l.link_id.empty()) return unexpected("link of template \"" + l.template_id + "\" has no id");
    if (!ids.insert(l.link_id).second) return unexpected("duplicate policy id \"" + l.link_id + "\"");
    auto linked = link(*t, l.bindings, l.link_id);
    if (!linked) return unexpected("link \"" + l.link_id + "\": " + linked.error().message);
    s.policies_.push_back(std::move(*linked));
  }
  s.links_ = std::move(links);
  for (const auto& p : s.policies_) s.conditions_.push_back(*toexp(p));
  s.index_ = build_index(s);
  return s;
}

const Policy* PolicySet::find(const std::string& id) const {
  for (const auto* group : {&policies_, &templates_}) {
    for (const auto& p : *group) {
      if (p.id == id) return &p;
    }
  }
  return nullptr;
}

PolicyIndex build_index(const PolicySet& set) {
  PolicyIndex idx;
  for (size_t i = 0; i < set.policies().size(); ++i) {
    idx.buckets[PolicyIndex::key_of(set.policies()[i])].push_back(i);
  }
  return idx;
}

std::vector<size_t> slice(const PolicyIndex& index, const EntityStore& store, const Request& request) {
  std::vector<size_t> out;
  if (index.buckets.empty()) return out;
  auto keys = [&](const EntityRef& r) {
    std::vector<std::optional<EntityRef>> ks = {std::nullopt, r};
    for (const auto& a : store.ancestors_of(r)) ks.push_back(a);
    return ks;
  };
  auto ps = keys(request.principal);
  auto rs = keys(request.resource);
  for (const auto& p : ps) {
    for (const auto& r : rs) {
      auto it = index.buckets.find({p, r});
      if (it != index.buckets.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Decision authorize(const PolicySet& set, const EntityStore& store, const Request& request, bool use_slicing) {
  std::vector<size_t> candidates;
  if (use_slicing) {
    candidates = slice(set.index(), store, request);
  } else {
    candidates.resize(set.policies().size());
    for (size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  }
  std::set<std::string> permits, forbids;
  Decision d;
  for (size_t i : candidates) {
    const Policy& p = set.policies()[i];
    PolicyOutcome o = evaluate_condition(set.conditions()[i], store, request);
    if (o.kind == PolicyOutcome::Kind::Errored) {
      d.errors.emplace_back(p.id, o.error);
    } else if (o.kind == PolicyOutcome::Kind::Satisfied) {
      (p.effect == Effect::Permit ? permits : forbids).insert(p.id);
    }
  }
  std::sort(d.errors.begin(), d.errors.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (forbids.empty() && !permits.empty()) {
    d.verdict = Decision::Verdict::Allow;
    d.determining = std::move(permits);
  } else {
    d.verdict = Decision::Verdict::Deny;
    d.determining = std::move(forbids);
  }
  return d;
}

Result<std::vector<TemplateLink>, std::string> parse_links(std::string_view json_text) {
  using nlohmann::json;
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) return unexpected(std::string("links file must be a JSON array"));
  auto ref = [](const json& j) -> std::optional<EntityRef> {
    if (!j.is_object() || !j.contains("type") || !j.contains("id") || !j["type"].is_string() ||
        !j["id"].is_string() || j["type"].get<std::string>().empty()) {
      return std::nullopt;
    }
    return EntityRef{j["type"].get<std::string>(), j["id"].get<std::string>()};
  };
  std::vector<TemplateLink> out;
  for (const auto& e : doc) {
    if (!e.is_object() || !e.contains("template") || !e["template"].is_string() || !e.contains("id") ||
        !e["id"].is_string()) {
      return unexpected("malformed link: " + e.dump());
    }
    TemplateLink l{e["template"].get<std::string>(), {}, e["id"].get<std::string>()};
    for (auto [key, slot] : {std::pair{"principal", SlotId::Principal}, std::pair{"resource", SlotId::Resource}}) {
      if (!e.contains(key)) continue;
      auto r = ref(e[key]);
      if (!r) return unexpected("malformed " + std::string(key) + " in link \"" + l.link_id + "\"");
      l.bindings[slot] = *r;
    }
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace arbiter
