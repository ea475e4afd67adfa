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

#include "arbiter/entities.h"

#include <functional>

#include <nlohmann/json.hpp>

namespace arbiter {

using nlohmann::json;

const char* store_error_name(StoreError::Kind k) {
  switch (k) {
    case StoreError::Kind::HierarchyCycle: return "HierarchyCycle";
    case StoreError::Kind::DuplicateEntity: return "DuplicateEntity";
    case StoreError::Kind::BadEntityRef: return "BadEntityRef";
    case StoreError::Kind::Malformed: return "Malformed";
  }
  return "?";
}

Result<EntityStore, StoreError> EntityStore::build(std::vector<EntityInput> entities) {
  std::map<EntityRef, std::vector<EntityRef>> parents;
  EntityStore store;
  for (auto& e : entities) {
    if (store.entries_.count(e.uid)) {
      return unexpected(StoreError{StoreError::Kind::DuplicateEntity, "duplicate entity " + e.uid.to_string()});
    }
    parents[e.uid] = std::move(e.parents);
    store.entries_[e.uid].attrs = std::move(e.attrs);
  }

  enum class Mark { Active, Done };
  std::map<EntityRef, Mark> mark;
  std::optional<EntityRef> cycle;
  std::function<void(const EntityRef&)> close = [&](const EntityRef& uid) {
    auto [it, fresh] = mark.emplace(uid, Mark::Active);
    if (!fresh) {
      if (it->second == Mark::Active && !cycle) cycle = uid;
      return;
    }
    auto& anc = store.entries_.at(uid).ancestors;
    for (const auto& p : parents.at(uid)) {
      anc.insert(p);
      if (!store.entries_.count(p)) continue;
      close(p);
      if (cycle) return;
      const auto& pa = store.entries_.at(p).ancestors;
      anc.insert(pa.begin(), pa.end());
    }
    it->second = Mark::Done;
  };
  for (const auto& [uid, _] : store.entries_) {
    close(uid);
    if (cycle) {
      return unexpected(StoreError{StoreError::Kind::HierarchyCycle,
                                   "entity hierarchy has a cycle through " + cycle->to_string()});
    }
  }
  return store;
}

EntityStore EntityStore::from_closed(Map entries) {
  EntityStore s;
  s.entries_ = std::move(entries);
  return s;
}

const std::set<EntityRef>& EntityStore::ancestors_of(const EntityRef& r) const {
  static const std::set<EntityRef> empty;
  const EntityData* d = find(r);
  return d ? d->ancestors : empty;
}

EntityStore EntityStore::with_actions(const Schema& schema) const {
  EntityStore out = *this;
  for (const auto& [uid, decl] : schema.actions) {
    auto& d = out.entries_[uid];
    d.ancestors.insert(decl.ancestors.begin(), decl.ancestors.end());
  }
  return out;
}

bool EntityStore::is_acyclic() const {
  for (const auto& [uid, d] : entries_) {
    if (d.ancestors.count(uid)) return false;
  }
  return true;
}

bool EntityStore::is_transitive() const {
  for (const auto& [uid, d] : entries_) {
    for (const auto& a : d.ancestors) {
      for (const auto& b : ancestors_of(a)) {
        if (!d.ancestors.count(b)) return false;
      }
    }
  }
  return true;
}

namespace {

struct JsonError {
  StoreError err;
};

[[noreturn]] void bad(StoreError::Kind k, std::string msg) { throw JsonError{{k, std::move(msg)}}; }

EntityRef uid_from_json(const json& j) {
  const json* u = &j;
  if (j.is_object() && j.contains("__entity")) u = &j.at("__entity");
  if (!u->is_object() || !u->contains("type") || !u->contains("id") || !(*u)["type"].is_string() ||
      !(*u)["id"].is_string() || (*u)["type"].get<std::string>().empty()) {
    bad(StoreError::Kind::BadEntityRef, "malformed entity reference: " + j.dump());
  }
  return {(*u)["type"].get<std::string>(), (*u)["id"].get<std::string>()};
}

Value value_from_json(const json& j) {
  switch (j.type()) {
    case json::value_t::boolean: return Value::boolean(j.get<bool>());
    case json::value_t::number_integer: return Value::integer(j.get<int64_t>());
    case json::value_t::number_unsigned: {
      auto u = j.get<uint64_t>();
      if (u > static_cast<uint64_t>(INT64_MAX)) bad(StoreError::Kind::Malformed, "integer out of range: " + j.dump());
      return Value::integer(static_cast<int64_t>(u));
    }
    case json::value_t::string: return Value::string(j.get<std::string>());
    case json::value_t::array: {
      std::vector<Value> elems;
      for (const auto& e : j) elems.push_back(value_from_json(e));
      return Value::set(std::move(elems));
    }
    case json::value_t::object: {
      if (j.contains("__entity")) {
        if (j.size() != 1) bad(StoreError::Kind::BadEntityRef, "entity reference with extra keys: " + j.dump());
        return Value::entity(uid_from_json(j));
      }
      ValueRecord r;
      for (const auto& [k, v] : j.items()) r.emplace(k, value_from_json(v));
      return Value::record(std::move(r));
    }
    default: bad(StoreError::Kind::Malformed, "unsupported JSON value: " + j.dump());
  }
}

json uid_to_json(const EntityRef& r) { return {{"type", r.type}, {"id", r.id}}; }

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Long: return v.as_long();
    case Value::Kind::String: return v.as_string();
    case Value::Kind::Entity: return {{"__entity", uid_to_json(v.as_entity())}};
    case Value::Kind::Set: {
      json a = json::array();
      for (const auto& e : v.as_set()) a.push_back(value_to_json(e));
      return a;
    }
    case Value::Kind::Record: {
      json o = json::object();
      for (const auto& [k, e] : v.as_record()) o[k] = value_to_json(e);
      return o;
    }
  }
  return nullptr;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(StoreError::Kind::Malformed, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Result<EntityStore, StoreError> load_entities(std::string_view json_text) {
  try {
    json doc = parse_json(json_text);
    if (!doc.is_array()) bad(StoreError::Kind::Malformed, "entities file must be a JSON array");
    std::vector<EntityInput> inputs;
    for (const auto& e : doc) {
      if (!e.is_object() || !e.contains("uid")) bad(StoreError::Kind::Malformed, "entity without uid: " + e.dump());
      EntityInput in;
      in.uid = uid_from_json(e.at("uid"));
      if (e.contains("attrs")) {
        if (!e["attrs"].is_object()) bad(StoreError::Kind::Malformed, "attrs must be an object");
        in.attrs = value_from_json(e["attrs"]);
        if (in.attrs.is_entity()) bad(StoreError::Kind::Malformed, "attrs must be a record");
      }
      if (e.contains("parents")) {
        if (!e["parents"].is_array()) bad(StoreError::Kind::Malformed, "parents must be an array");
        for (const auto& p : e["parents"]) in.parents.push_back(uid_from_json(p));
      }
      inputs.push_back(std::move(in));
    }
    return EntityStore::build(std::move(inputs));
  } catch (const JsonError& e) {
    return unexpected(e.err);
  }
}

Result<Request, StoreError> load_request(std::string_view json_text) {
  try {
    json doc = parse_json(json_text);
    if (!doc.is_object()) bad(StoreError::Kind::Malformed, "request must be a JSON object");
    for (const char* k : {"principal", "action", "resource"}) {
      if (!doc.contains(k)) bad(StoreError::Kind::Malformed, std::string("request is missing \"") + k + "\"");
    }
    Request r;
    r.principal = uid_from_json(doc["principal"]);
    r.action = uid_from_json(doc["action"]);
    r.resource = uid_from_json(doc["resource"]);
    std::string_view at = r.action.type;
    if (!(at == kActionType || (at.size() > 8 && at.substr(at.size() - 8) == "::Action"))) {
      bad(StoreError::Kind::BadEntityRef, "request action must have type Action: " + r.action.to_string());
    }
    if (doc.contains("context")) {
      if (!doc["context"].is_object()) bad(StoreError::Kind::Malformed, "context must be an object");
      r.context = value_from_json(doc["context"]);
      if (!r.context.is_record()) bad(StoreError::Kind::Malformed, "context must be a record");
    }
    return r;
  } catch (const JsonError& e) {
    return unexpected(e.err);
  }
}

std::string entities_to_json(const EntityStore& store) {
  json out = json::array();
  for (const auto& [uid, d] : store.entries()) {
    json parents = json::array();
    for (const auto& a : d.ancestors) parents.push_back(uid_to_json(a));
    out.push_back({{"uid", uid_to_json(uid)}, {"attrs", value_to_json(d.attrs)}, {"parents", parents}});
  }
  return out.dump(2);
}

std::string request_to_json(const Request& r) {
  json out = {{"principal", uid_to_json(r.principal)},
              {"action", uid_to_json(r.action)},
              {"resource", uid_to_json(r.resource)},
              {"context", value_to_json(r.context)}};
  return out.dump(2);
}

}  // namespace arbiter
