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

#include "arbiter/testkit/enumerate.h"

#include <map>

namespace arbiter::testkit {

namespace {

uint64_t sat_mul(uint64_t a, uint64_t b) {
  uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? UINT64_MAX : r;
}

uint64_t sat_add(uint64_t a, uint64_t b) {
  uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? UINT64_MAX : r;
}

uint64_t domain_size(const Type& t, const Schema& schema, const EnumConfig& cfg) {
  switch (t.kind()) {
    case Type::Kind::Bool: return 2;
    case Type::Kind::True:
    case Type::Kind::False: return 1;
    case Type::Kind::Long: return cfg.longs.size();
    case Type::Kind::String: return cfg.strings.size();
    case Type::Kind::Entity: return schema.entity_type(t.entity_name()) ? cfg.bound : 0;
    case Type::Kind::Set: {
      uint64_t n = domain_size(t.element(), schema, cfg);
      return n >= 63 ? UINT64_MAX : uint64_t{1} << n;
    }
    case Type::Kind::Record: {
      uint64_t r = 1;
      for (const auto& a : t.attributes()) r = sat_mul(r, domain_size(a.type, schema, cfg) + (a.required ? 0 : 1));
      return r;
    }
  }
  return 0;
}

std::vector<EntityRef> ids_of(const std::string& type, const EnumConfig& cfg) {
  std::vector<EntityRef> out;
  for (size_t i = 0; i < cfg.bound; ++i) out.push_back(EntityRef{type, std::to_string(i)});
  return out;
}

struct Universe {
  std::vector<EntityRef> entities;                  // all non-action entities
  std::vector<std::pair<size_t, size_t>> pairs;     // candidate (entity, ancestor) indices
  std::vector<std::vector<Value>> attr_domains;     // per entity
};

Universe universe(const Schema& schema, const EnumConfig& cfg) {
  Universe u;
  for (const auto& [name, decl] : schema.entity_types) {
    for (auto& e : ids_of(name, cfg)) u.entities.push_back(std::move(e));
  }
  for (size_t i = 0; i < u.entities.size(); ++i) {
    const EntityTypeDecl* decl = schema.entity_type(u.entities[i].type);
    for (size_t j = 0; j < u.entities.size(); ++j) {
      if (i != j && decl->ancestor_types.count(u.entities[j].type)) u.pairs.emplace_back(i, j);
    }
  }
  return u;
}

}  // namespace

std::vector<Value> value_domain(const Type& type, const std::vector<EntityRef>& entities, const EnumConfig& cfg) {
  std::vector<Value> out;
  switch (type.kind()) {
    case Type::Kind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Type::Kind::True: out = {Value::boolean(true)}; break;
    case Type::Kind::False: out = {Value::boolean(false)}; break;
    case Type::Kind::Long:
      for (int64_t i : cfg.longs) out.push_back(Value::integer(i));
      break;
    case Type::Kind::String:
      for (const auto& s : cfg.strings) out.push_back(Value::string(s));
      break;
    case Type::Kind::Entity:
      for (const auto& e : entities) {
        if (e.type == type.entity_name()) out.push_back(Value::entity(e));
      }
      break;
    case Type::Kind::Set: {
      auto elems = value_domain(type.element(), entities, cfg);
      for (uint64_t mask = 0; mask < (uint64_t{1} << elems.size()); ++mask) {
        std::vector<Value> s;
        for (size_t i = 0; i < elems.size(); ++i) {
          if (mask >> i & 1) s.push_back(elems[i]);
        }
        out.push_back(Value::set(std::move(s)));
      }
      break;
    }
    case Type::Kind::Record: {
      std::vector<ValueRecord> partial = {ValueRecord{}};
      for (const auto& a : type.attributes()) {
        auto dom = value_domain(a.type, entities, cfg);
        std::vector<ValueRecord> next;
        for (const auto& r : partial) {
          if (!a.required) next.push_back(r);
          for (const auto& v : dom) {
            ValueRecord copy = r;
            copy[a.name] = v;
            next.push_back(std::move(copy));
          }
        }
        partial = std::move(next);
      }
      for (auto& r : partial) out.push_back(Value::record(std::move(r)));
      break;
    }
  }
  return out;
}

Result<uint64_t, BoundTooLarge> state_bound(const Schema& schema, const EnumConfig& cfg) {
  Universe u = universe(schema, cfg);
  if (u.pairs.size() > cfg.max_hierarchy_pairs) {
    return unexpected(BoundTooLarge{UINT64_MAX, cfg.ceiling,
                                    std::to_string(u.pairs.size()) + " candidate hierarchy edges"});
  }
  uint64_t stores = uint64_t{1} << u.pairs.size();
  for (const auto& e : u.entities) {
    stores = sat_mul(stores, domain_size(schema.entity_type(e.type)->attributes, schema, cfg));
  }
  uint64_t requests = 0;
  for (const auto& env : environments(schema)) {
    uint64_t n = sat_mul(cfg.bound, cfg.bound);
    requests = sat_add(requests, sat_mul(n, domain_size(env.context, schema, cfg)));
  }
  uint64_t states = sat_mul(stores, requests);
  if (states > cfg.ceiling) return unexpected(BoundTooLarge{states, cfg.ceiling, "state count above ceiling"});
  return states;
}

Result<uint64_t, BoundTooLarge> enumerate_conforming(const Schema& schema, const EnumConfig& cfg,
                                                     const EnumVisitor& visit) {
  auto bound = state_bound(schema, cfg);
  if (!bound) return unexpected(bound.error());
  if (cfg.bound == 0) return uint64_t{0};

  Universe u = universe(schema, cfg);
  const size_t n = u.entities.size();
  for (const auto& e : u.entities) {
    u.attr_domains.push_back(value_domain(schema.entity_type(e.type)->attributes, u.entities, cfg));
  }

  struct EnvRequests {
    RequestEnv env;
    std::vector<Request> requests;
  };
  std::vector<EnvRequests> envs;
  for (const auto& env : environments(schema)) {
    EnvRequests er{env, {}};
    auto contexts = value_domain(env.context, u.entities, cfg);
    for (const auto& p : ids_of(env.principal_type, cfg)) {
      for (const auto& r : ids_of(env.resource_type, cfg)) {
        for (const auto& c : contexts) er.requests.push_back(Request{p, env.action, r, c});
      }
    }
    envs.push_back(std::move(er));
  }

  // Transitively closed hierarchies over the candidate pairs. Self pairs are
  // never candidates, so closure also rules out cycles.
  std::vector<std::vector<std::vector<bool>>> hierarchies;
  for (uint64_t mask = 0; mask < (uint64_t{1} << u.pairs.size()); ++mask) {
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (size_t k = 0; k < u.pairs.size(); ++k) {
      if (mask >> k & 1) rel[u.pairs[k].first][u.pairs[k].second] = true;
    }
    bool closed = true;
    for (size_t a = 0; a < n && closed; ++a) {
      for (size_t b = 0; b < n && closed; ++b) {
        if (!rel[a][b]) continue;
        for (size_t c = 0; c < n; ++c) {
          if (rel[b][c] && !rel[a][c]) {
            closed = false;
            break;
          }
        }
      }
    }
    if (closed) hierarchies.push_back(std::move(rel));
  }

  uint64_t visited = 0;
  std::vector<size_t> choice(n, 0);
  for (const auto& rel : hierarchies) {
    std::fill(choice.begin(), choice.end(), 0);
    bool any_empty = false;
    for (const auto& d : u.attr_domains) any_empty |= d.empty();
    if (any_empty) break;
    while (true) {
      EntityStore::Map entries;
      for (size_t i = 0; i < n; ++i) {
        EntityData d;
        d.attrs = u.attr_domains[i][choice[i]];
        for (size_t j = 0; j < n; ++j) {
          if (rel[i][j]) d.ancestors.insert(u.entities[j]);
        }
        entries.emplace(u.entities[i], std::move(d));
      }
      EntityStore store = EntityStore::from_closed(std::move(entries)).with_actions(schema);
      for (const auto& er : envs) {
        for (const auto& req : er.requests) {
          ++visited;
          if (!visit(er.env, store, req)) return visited;
        }
      }
      // Mixed-radix increment over attribute assignments.
      size_t i = 0;
      while (i < n && ++choice[i] == u.attr_domains[i].size()) choice[i++] = 0;
      if (i == n) break;
    }
  }
  return visited;
}

}  // namespace arbiter::testkit
