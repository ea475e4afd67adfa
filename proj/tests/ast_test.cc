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

#include "arbiter/policy.h"
#include "support.h"

namespace arbiter {
namespace {

using test::expr;
using test::policies_from;
using test::policy_fixture;
using test::uid;

TEST(Toexp, ListReadPolicyMatchesWorkedConversion) {
  auto ps = policy_fixture("tinytodo/policies-demo.cedar");
  ASSERT_EQ(ps.size(), 5u);
  auto e = toexp(ps[3]);
  ASSERT_TRUE(e.ok());
  EXPECT_EQ(render_expr(*e),
            "true && (action == Action::\"GetList\" && (true && (principal in resource.readers || "
            "principal in resource.editors)))");
}

TEST(Toexp, UnconstrainedScope) {
  auto ps = policies_from("permit(principal, action, resource);");
  auto e = toexp(ps.at(0));
  ASSERT_TRUE(e.ok());
  EXPECT_TRUE(expr_equal(*e, Expr::and_(Expr::boolean(true), Expr::and_(Expr::boolean(true), Expr::boolean(true)))));
}

TEST(Toexp, UnlessIsNegatedAtTheEnd) {
  auto ps = policy_fixture("tinytodo/revised.cedar");
  const Policy* p = nullptr;
  for (const auto& q : ps) {
    if (q.id == "policy0.1") p = &q;
  }
  ASSERT_NE(p, nullptr);
  auto e = toexp(*p);
  ASSERT_TRUE(e.ok());
  // Hand-desugared: scope conjuncts, then the negated unless body.
  auto want = Expr::and_(
      Expr::boolean(true),
      Expr::and_(Expr::binary(BinaryOp::In, Expr::variable(Var::Action),
                              Expr::set({Expr::entity(uid("Action", "CreateList")),
                                         Expr::entity(uid("Action", "GetOwnedLists"))})),
                 Expr::and_(Expr::binary(BinaryOp::Eq, Expr::variable(Var::Resource),
                                         Expr::entity(uid("Application", "TinyTodo"))),
                            Expr::not_(Expr::binary(BinaryOp::In, Expr::variable(Var::Principal),
                                                    Expr::entity(uid("Team", "interns")))))));
  EXPECT_TRUE(expr_equal(*e, want)) << render_expr(*e);
}

TEST(Toexp, TemplateIsNotClosed) {
  auto ps = policies_from("permit(principal == ?principal, action, resource);");
  auto e = toexp(ps.at(0));
  ASSERT_FALSE(e.ok());
  EXPECT_EQ(e.error().kind, PolicyError::Kind::NotClosed);
}

TEST(Toexp, CorpusOutputHasNoSlots) {
  for (const char* f : {"tinytodo/policies.cedar", "gdrive/policies.cedar", "github/policies.cedar",
                        "tinytodo/policies-demo.cedar"}) {
    for (const auto& p : policy_fixture(f)) {
      auto e = toexp(p);
      ASSERT_TRUE(e.ok()) << f << " " << p.id;
      EXPECT_FALSE((*e)->has_slots());
      // Deterministic: desugaring twice gives equal trees.
      EXPECT_TRUE(expr_equal(*e, *toexp(p)));
    }
  }
}

TEST(Link, GdriveReadTemplate) {
  auto ps = policy_fixture("gdrive-templates/policies.cedar");
  const Policy* tmpl = nullptr;
  for (const auto& p : ps) {
    if (p.id == "readTemplate") tmpl = &p;
  }
  ASSERT_NE(tmpl, nullptr);
  ASSERT_TRUE(tmpl->is_template());
  auto linked = link(*tmpl, {{SlotId::Principal, uid("User", "u")}, {SlotId::Resource, uid("Document", "d")}},
                     "read-u-d");
  ASSERT_TRUE(linked.ok());
  EXPECT_FALSE(linked->is_template());
  EXPECT_EQ(linked->principal.kind, ScopeConstraint::Kind::In);
  EXPECT_EQ(*linked->principal.entity(), uid("User", "u"));
  EXPECT_EQ(linked->resource.kind, ScopeConstraint::Kind::In);
  EXPECT_EQ(*linked->resource.entity(), uid("Document", "d"));
  EXPECT_EQ(linked->annotations.at("id"), "read-u-d");
}

TEST(Link, ZeroSlotTemplateIsIdentity) {
  auto ps = policy_fixture("tinytodo/policies-demo.cedar");
  auto linked = link(ps[1], {});
  ASSERT_TRUE(linked.ok());
  EXPECT_TRUE(policy_equal(*linked, ps[1]));
  EXPECT_EQ(render_policy(*linked), render_policy(ps[1]));
}

TEST(Link, BindingErrors) {
  auto ps = policies_from("permit(principal in ?principal, action, resource);");
  auto missing = link(ps.at(0), {});
  ASSERT_FALSE(missing.ok());
  EXPECT_EQ(missing.error().kind, PolicyError::Kind::UnboundSlot);
  auto extra = link(ps.at(0), {{SlotId::Principal, uid("User", "a")}, {SlotId::Resource, uid("Doc", "d")}});
  ASSERT_FALSE(extra.ok());
  EXPECT_EQ(extra.error().kind, PolicyError::Kind::UnknownSlot);
}

TEST(Link, CommutesWithDesugaring) {
  auto ps = policy_fixture("github-templates/policies.cedar");
  for (const auto& t : ps) {
    if (!t.is_template()) continue;
    SlotBindings b;
    for (SlotId s : t.slots()) b[s] = s == SlotId::Principal ? uid("Team", "t") : uid("Repository", "r");
    auto linked = link(t, b);
    ASSERT_TRUE(linked.ok());
    auto direct = substitute_slots(desugar(t), [&](SlotId s) { return Expr::entity(b.at(s)); });
    EXPECT_TRUE(expr_equal(*toexp(*linked), direct)) << t.id;
  }
}

TEST(Expr, StructuralEqualityIgnoresSharing) {
  auto a = expr("principal.name like \"a*b\" && [1, 2].contains(3)");
  auto b = expr("principal.name like \"a*b\" && [1, 2].contains(3)");
  EXPECT_NE(a.get(), b.get());
  EXPECT_TRUE(expr_equal(a, b));
  EXPECT_EQ(a->hash(), b->hash());
  EXPECT_FALSE(expr_equal(a, expr("principal.name like \"a*c\" && [1, 2].contains(3)")));
}

TEST(Value, SetsAreCanonical) {
  auto a = Value::set({Value::integer(3), Value::integer(1), Value::integer(3)});
  auto b = Value::set({Value::integer(1), Value::integer(3)});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.as_set().size(), 2u);
  EXPECT_TRUE(a.set_contains(Value::integer(3)));
  EXPECT_FALSE(a.set_contains(Value::integer(2)));
}

}  // namespace
}  // namespace arbiter
