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

#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "arbiter/entities.h"
#include "support.h"

namespace arbiter {
namespace {

using test::store_fixture;
using test::uid;

TEST(LoadEntities, TodoStoreClosesShares) {
  auto store = store_fixture("tinytodo/entities.json");
  const auto& anc = store.ancestors_of(uid("User", "aaron"));
  EXPECT_EQ(anc, (std::set<EntityRef>{uid("Team", "interns"), uid("Application", "TinyTodo"), uid("Team", "1")}));
  EXPECT_TRUE(store.is_acyclic());
  EXPECT_TRUE(store.is_transitive());
}

TEST(LoadEntities, EmptyArray) {
  auto r = load_entities("[]");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->size(), 0u);
}

TEST(LoadEntities, ChainClosure) {
  auto r = load_entities(R"([
    {"uid": {"type": "N", "id": "a"}, "attrs": {}, "parents": [{"type": "N", "id": "b"}]},
    {"uid": {"type": "N", "id": "b"}, "attrs": {}, "parents": [{"type": "N", "id": "c"}]},
    {"uid": {"type": "N", "id": "c"}, "attrs": {}, "parents": []}])");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->ancestors_of(uid("N", "a")), (std::set<EntityRef>{uid("N", "b"), uid("N", "c")}));
  EXPECT_EQ(r->ancestors_of(uid("N", "c")), std::set<EntityRef>{});
}

TEST(LoadEntities, Errors) {
  auto cycle = load_entities(R"([
    {"uid": {"type": "N", "id": "a"}, "attrs": {}, "parents": [{"type": "N", "id": "b"}]},
    {"uid": {"type": "N", "id": "b"}, "attrs": {}, "parents": [{"type": "N", "id": "a"}]}])");
  ASSERT_FALSE(cycle.ok());
  EXPECT_EQ(cycle.error().kind, StoreError::Kind::HierarchyCycle);
  EXPECT_NE(cycle.error().message.find("N::"), std::string::npos);

  auto self = load_entities(R"([{"uid": {"type": "N", "id": "a"}, "parents": [{"type": "N", "id": "a"}]}])");
  ASSERT_FALSE(self.ok());
  EXPECT_EQ(self.error().kind, StoreError::Kind::HierarchyCycle);

  auto dup = load_entities(R"([{"uid": {"type": "N", "id": "a"}}, {"uid": {"type": "N", "id": "a"}}])");
  ASSERT_FALSE(dup.ok());
  EXPECT_EQ(dup.error().kind, StoreError::Kind::DuplicateEntity);

  auto bad = load_entities(R"([{"uid": {"type": "", "id": "a"}}])");
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.error().kind, StoreError::Kind::BadEntityRef);

  auto bad_parent = load_entities(R"([{"uid": {"type": "N", "id": "a"}, "parents": [{"id": "b"}]}])");
  ASSERT_FALSE(bad_parent.ok());
  EXPECT_EQ(bad_parent.error().kind, StoreError::Kind::BadEntityRef);

  EXPECT_FALSE(load_entities("{").ok());
  EXPECT_FALSE(load_entities("{}").ok());
}

TEST(LoadEntities, AttributeValues) {
  auto r = load_entities(R"([{"uid": {"type": "N", "id": "a"}, "attrs": {
      "n": -3, "s": "x", "b": true, "set": [2, 1, 2],
      "r": {"inner": {"__entity": {"type": "N", "id": "b"}}}}}])");
  ASSERT_TRUE(r.ok());
  const auto* d = r->find(uid("N", "a"));
  ASSERT_NE(d, nullptr);
  const auto& attrs = d->attrs.as_record();
  EXPECT_EQ(attrs.at("n"), Value::integer(-3));
  EXPECT_EQ(attrs.at("set"), Value::set({Value::integer(1), Value::integer(2)}));
  EXPECT_EQ(attrs.at("r").as_record().at("inner"), Value::entity(uid("N", "b")));
}

TEST(AncestorsOf, UnknownIsEmpty) {
  auto store = store_fixture("tinytodo/entities.json");
  EXPECT_TRUE(store.ancestors_of(uid("User", "nobody")).empty());
}

// Independent oracle: BFS over direct parent edges.
std::set<EntityRef> bfs(const std::vector<EntityInput>& in, const EntityRef& from) {
  std::map<EntityRef, std::vector<EntityRef>> edges;
  for (const auto& e : in) edges[e.uid] = e.parents;
  std::set<EntityRef> seen;
  std::queue<EntityRef> q;
  q.push(from);
  while (!q.empty()) {
    auto cur = q.front();
    q.pop();
    for (const auto& p : edges[cur]) {
      if (seen.insert(p).second) q.push(p);
    }
  }
  seen.erase(from);
  return seen;
}

TEST(EntityStoreProperty, ClosureMatchesBfsOnRandomDags) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    size_t n = 1 + rng() % 12;
    std::vector<EntityInput> in;
    for (size_t i = 0; i < n; ++i) {
      EntityInput e{uid("N", std::to_string(i)), Value::empty_record(), {}};
      // Edges only to higher indices keep the graph acyclic.
      for (size_t j = i + 1; j < n; ++j) {
        if (rng() % 3 == 0) e.parents.push_back(uid("N", std::to_string(j)));
      }
      in.push_back(e);
    }
    std::shuffle(in.begin(), in.end(), rng);
    auto store = EntityStore::build(in);
    ASSERT_TRUE(store.ok());
    EXPECT_TRUE(store->is_acyclic());
    EXPECT_TRUE(store->is_transitive());
    for (const auto& e : in) EXPECT_EQ(store->ancestors_of(e.uid), bfs(in, e.uid));

    // Closing an already closed store changes nothing.
    std::vector<EntityInput> closed;
    for (const auto& [u, d] : store->entries()) {
      closed.push_back(EntityInput{u, d.attrs, std::vector<EntityRef>(d.ancestors.begin(), d.ancestors.end())});
    }
    auto again = EntityStore::build(closed);
    ASSERT_TRUE(again.ok());
    for (const auto& [u, d] : store->entries()) EXPECT_EQ(again->ancestors_of(u), d.ancestors);
  }
}

TEST(EntityStore, JsonRoundTrip) {
  auto store = store_fixture("tinytodo/entities.json");
  auto again = load_entities(entities_to_json(store));
  ASSERT_TRUE(again.ok());
  ASSERT_EQ(again->size(), store.size());
  for (const auto& [u, d] : store.entries()) {
    const auto* other = again->find(u);
    ASSERT_NE(other, nullptr);
    EXPECT_EQ(other->attrs, d.attrs);
    EXPECT_EQ(other->ancestors, d.ancestors);
  }
}

TEST(LoadRequest, Basics) {
  auto r = test::request_fixture("tinytodo/requests/aaron-get-list.json");
  EXPECT_EQ(r.principal, uid("User", "aaron"));
  EXPECT_EQ(r.action, uid("Action", "GetList"));
  auto bad = load_request(R"({"principal": {"type": "User", "id": "a"}, "action": {"type": "Verb", "id": "x"},
                              "resource": {"type": "User", "id": "a"}, "context": {}})");
  EXPECT_FALSE(bad.ok());
  auto again = load_request(request_to_json(r));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->resource, r.resource);
}

TEST(EntityStore, AllFixturesHoldInvariants) {
  for (const char* f : {"tinytodo/entities.json", "tinytodo/entities-50.json"}) {
    auto s = store_fixture(f);
    EXPECT_TRUE(s.is_acyclic()) << f;
    EXPECT_TRUE(s.is_transitive()) << f;
  }
}

TEST(EntityStore, WithActionsMergesGroups) {
  auto schema = test::schema_fixture("github/schema.cedarschema");
  EntityStore empty;
  auto s = empty.with_actions(schema);
  EXPECT_TRUE(s.ancestors_of(uid("Action", "readRepository")).count(uid("Action", "administrateRepository")));
  EXPECT_TRUE(s.is_transitive());
}

}  // namespace
}  // namespace arbiter
