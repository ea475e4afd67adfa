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

#include "arbiter/validator.h"
#include "support.h"

namespace arbiter {
namespace {

using test::expr;
using test::policies_from;
using test::policy_fixture;
using test::schema_fixture;
using test::schema_from;
using test::uid;

RequestEnv env_for(const Schema& s, const std::string& action) {
  for (const auto& e : environments(s)) {
    if (e.action.id == action) return e;
  }
  ADD_FAILURE() << "no env for " << action;
  return {};
}

TEST(Environments, GetListHasOneEnv) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  int n = 0;
  for (const auto& e : environments(s)) {
    if (e.action != uid("Action", "GetList")) continue;
    ++n;
    EXPECT_EQ(e.principal_type, "User");
    EXPECT_EQ(e.resource_type, "List");
    EXPECT_EQ(e.context, Type::record({}));
  }
  EXPECT_EQ(n, 1);
}

TEST(Environments, EmptyAppliesToGivesNone) {
  auto s = schema_from("entity A; action a appliesTo { principal: [], resource: [A] };");
  EXPECT_TRUE(environments(s).empty());
}

TEST(Environments, GithubHasFive) {
  EXPECT_EQ(environments(schema_fixture("github/schema.cedarschema")).size(), 5u);
}

TEST(Typecheck, ImpossibleGuardPrunesDeadBranch) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  auto ps = policy_fixture("tinytodo/policies-demo.cedar");
  auto env = env_for(s, "CreateList");
  TypeTable table;
  auto r = typecheck(specialize(ps[3], env), env, s, Capability::empty(), &table);
  ASSERT_TRUE(r.ok()) << r.error().detail;
  EXPECT_EQ(r->type, Type::false_type());
  // `resource.readers` would not typecheck on Application; it was never visited.
  auto readers = typecheck(expr("resource.readers"), env, s);
  ASSERT_FALSE(readers.ok());
  EXPECT_EQ(readers.error().kind, TypeError::Kind::MissingAttribute);
}

Schema optional_schema() {
  return schema_from(R"(entity E { f?: Long, g: String, r?: { x?: Bool } };
                        action act appliesTo { principal: [E], resource: [E] };)");
}

TEST(Typecheck, CapabilityFlowsIntoThenBranch) {
  auto s = optional_schema();
  auto env = env_for(s, "act");
  auto longs = typecheck(expr("if principal has f then principal.f else 0"), env, s);
  ASSERT_TRUE(longs.ok()) << longs.error().detail;
  EXPECT_EQ(longs->type, Type::long_type());

  auto mixed = typecheck(expr("if principal has f then principal.f else false"), env, s);
  ASSERT_FALSE(mixed.ok());
  EXPECT_EQ(mixed.error().kind, TypeError::Kind::NotComparable);

  auto unguarded = typecheck(expr("principal.f == 1"), env, s);
  ASSERT_FALSE(unguarded.ok());
  EXPECT_EQ(unguarded.error().kind, TypeError::Kind::CapabilityRequired);

  auto conj = typecheck(expr("principal has f && principal.f > 1"), env, s);
  ASSERT_TRUE(conj.ok());
  EXPECT_EQ(conj->type, Type::boolean());
  EXPECT_TRUE(conj->effect.contains(Expr::variable(Var::Principal), "f"));

  // The capability is for `principal`, not `resource`.
  auto wrong = typecheck(expr("principal has f && resource.f > 1"), env, s);
  ASSERT_FALSE(wrong.ok());
  EXPECT_EQ(wrong.error().kind, TypeError::Kind::CapabilityRequired);

  // Disjunction only keeps what both sides prove.
  auto disj = typecheck(expr("(principal has f || resource has f) && principal.f > 1"), env, s);
  ASSERT_FALSE(disj.ok());
  auto both = typecheck(expr("(principal has f && principal.f > 0 || principal has f) && principal.f > 1"), env, s);
  ASSERT_TRUE(both.ok()) << both.error().detail;

  auto nested = typecheck(expr("principal has r && principal.r has x && principal.r.x"), env, s);
  ASSERT_TRUE(nested.ok()) << nested.error().detail;
}

TEST(Typecheck, SingletonBooleans) {
  auto s = optional_schema();
  auto env = env_for(s, "act");
  auto tt = typecheck(expr("true && true"), env, s);
  ASSERT_TRUE(tt.ok());
  EXPECT_EQ(tt->type, Type::true_type());
  EXPECT_EQ(tt->effect.size(), 0u);
  EXPECT_FALSE(tt->effect.is_top());

  auto f = typecheck(expr("false"), env, s);
  EXPECT_TRUE(f->effect.is_top());

  EXPECT_EQ(typecheck(expr("principal has g"), env, s)->type, Type::true_type());
  EXPECT_EQ(typecheck(expr("principal has zzz"), env, s)->type, Type::false_type());
  EXPECT_EQ(typecheck(expr("principal is E"), env, s)->type, Type::true_type());
  EXPECT_EQ(typecheck(expr("principal == principal"), env, s)->type, Type::true_type());
  EXPECT_EQ(typecheck(expr("E::\"a\" == E::\"b\""), env, s)->type, Type::false_type());
  EXPECT_EQ(typecheck(expr("principal == E::\"b\""), env, s)->type, Type::boolean());
  EXPECT_EQ(typecheck(expr("!(principal has zzz)"), env, s)->type, Type::true_type());
  // A false guard leaves only the else branch, typed in isolation.
  EXPECT_EQ(typecheck(expr("if principal has zzz then principal.zzz else 3"), env, s)->type, Type::long_type());
}

TEST(Typecheck, EntityMembership) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  auto env = env_for(s, "GetList");
  auto r = typecheck(expr("principal in resource.readers"), env, s);
  ASSERT_TRUE(r.ok()) << r.error().detail;
  EXPECT_EQ(r->type, Type::boolean());
  // List is not an allowed ancestor of User.
  EXPECT_EQ(typecheck(expr("principal in resource"), env, s)->type, Type::false_type());
  EXPECT_EQ(typecheck(expr("principal in principal"), env, s)->type, Type::boolean());
  EXPECT_EQ(typecheck(expr("principal in [Team::\"a\", Team::\"b\"]"), env, s)->type, Type::boolean());
  EXPECT_EQ(typecheck(expr("action in [Action::\"GetList\"]"), env, s)->type, Type::boolean());
  auto sub = substitute_var(expr("action in [Action::\"CreateList\", Action::\"GetList\"]"), Var::Action,
                            Expr::entity(env.action));
  EXPECT_EQ(typecheck(sub, env, s)->type, Type::true_type());
  EXPECT_EQ(typecheck(expr("1 in principal"), env, s).error().kind, TypeError::Kind::UnexpectedType);
}

TEST(Typecheck, ActionGroupsResolveThroughTheSchema) {
  auto s = schema_fixture("github/schema.cedarschema");
  auto env = env_for(s, "readRepository");
  auto in_admin = Expr::binary(BinaryOp::In, Expr::entity(env.action),
                               Expr::entity(uid("Action", "administrateRepository")));
  EXPECT_EQ(typecheck(in_admin, env, s)->type, Type::true_type());
  auto in_admin_action = Expr::binary(BinaryOp::In, Expr::entity(env.action), Expr::entity(uid("Action", "admin")));
  EXPECT_EQ(typecheck(in_admin_action, env, s)->type, Type::false_type());
}

TEST(Typecheck, Errors) {
  auto s = optional_schema();
  auto env = env_for(s, "act");
  auto kind = [&](const char* text) {
    auto r = typecheck(expr(text), env, s);
    EXPECT_FALSE(r.ok()) << text;
    return r.ok() ? TypeError::Kind::UnexpectedType : r.error().kind;
  };
  EXPECT_EQ(kind("1 == \"a\""), TypeError::Kind::NotComparable);
  EXPECT_EQ(kind("principal.nope"), TypeError::Kind::MissingAttribute);
  EXPECT_EQ(kind("[1, \"a\"].contains(1)"), TypeError::Kind::HeterogeneousSet);
  EXPECT_EQ(kind("principal is Nope"), TypeError::Kind::UnknownEntityType);
  EXPECT_EQ(kind("Nope::\"x\" == principal"), TypeError::Kind::UnknownEntityType);
  EXPECT_EQ(kind("if 1 then true else false"), TypeError::Kind::NonBooleanGuard);
  EXPECT_EQ(kind("[].contains(1)"), TypeError::Kind::EmptySetLiteral);
  EXPECT_EQ(kind("1 + true"), TypeError::Kind::UnexpectedType);
  EXPECT_EQ(kind("(principal.g like \"a\") == 2"), TypeError::Kind::NotComparable);
  auto r = typecheck(expr("true && principal.nope"), env, s);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().location, "principal.nope");
  EXPECT_NE(r.error().detail.find("act"), std::string::npos);
}

TEST(Subtyping, PartialOrder) {
  std::vector<Type> ts = {
      Type::boolean(), Type::true_type(), Type::false_type(), Type::long_type(), Type::string_type(),
      Type::entity("A"), Type::entity("B"), Type::set_of(Type::true_type()), Type::set_of(Type::boolean()),
      Type::record({{"a", true, Type::long_type()}}), Type::record({{"a", false, Type::long_type()}}),
      Type::record({{"a", true, Type::true_type()}}), Type::record({{"a", false, Type::boolean()}}),
      Type::record({{"a", true, Type::long_type()}, {"b", true, Type::long_type()}}), Type::record({}),
  };
  for (const auto& a : ts) {
    EXPECT_TRUE(is_subtype(a, a)) << a.to_string();
    for (const auto& b : ts) {
      if (is_subtype(a, b) && is_subtype(b, a)) { EXPECT_EQ(a, b); }
      for (const auto& c : ts) {
        if (is_subtype(a, b) && is_subtype(b, c)) { EXPECT_TRUE(is_subtype(a, c)); }
      }
      auto lub = least_upper_bound(a, b);
      if (lub) {
        EXPECT_TRUE(is_subtype(a, *lub));
        EXPECT_TRUE(is_subtype(b, *lub));
        // Least: below every other common supertype in the sample.
        for (const auto& c : ts) {
          if (is_subtype(a, c) && is_subtype(b, c)) { EXPECT_TRUE(is_subtype(*lub, c)); }
        }
      }
    }
  }
  EXPECT_TRUE(is_subtype(Type::true_type(), Type::boolean()));
  EXPECT_FALSE(is_subtype(Type::boolean(), Type::true_type()));
  // Depth, not width.
  EXPECT_TRUE(is_subtype(ts[11], ts[12]));
  EXPECT_FALSE(is_subtype(ts[13], ts[9]));
  EXPECT_FALSE(is_subtype(ts[5], ts[6]));
}

TEST(Validate, DemoPoliciesAgainstReducedSchema) {
  auto report = validate(test::policy_set(policy_fixture("tinytodo/policies-demo.cedar")),
                         schema_fixture("tinytodo/schema-small.cedarschema"));
  for (const auto& p : report.policies) {
    for (const auto& r : p.results) EXPECT_FALSE(r.error) << p.policy_id << ": " << r.error->detail;
  }
  EXPECT_TRUE(report.valid());
}

TEST(Validate, NonBooleanCondition) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  auto report = validate_policy(policies_from("permit(principal, action, resource) when { 1 };").at(0), s);
  EXPECT_FALSE(report.valid());
}

TEST(Validate, Fixtures) {
  struct Case {
    const char* policies;
    const char* schema;
    const char* links;
  };
  for (auto c : {Case{"tinytodo/policies.cedar", "tinytodo/schema.cedarschema", nullptr},
                 Case{"gdrive/policies.cedar", "gdrive/schema.cedarschema", nullptr},
                 Case{"github/policies.cedar", "github/schema.cedarschema", nullptr},
                 Case{"gdrive-templates/policies.cedar", "gdrive-templates/schema.cedarschema",
                      "gdrive-templates/links.json"},
                 Case{"github-templates/policies.cedar", "github-templates/schema.cedarschema",
                      "github-templates/links.json"}}) {
    std::vector<TemplateLink> links;
    if (c.links) links = *parse_links(test::read_fixture(c.links));
    auto report = validate(test::policy_set(policy_fixture(c.policies), links), schema_fixture(c.schema));
    for (const auto& p : report.policies) {
      for (const auto& r : p.results) {
        EXPECT_FALSE(r.error) << c.policies << " " << p.policy_id << ": " << r.error->detail;
      }
    }
    EXPECT_TRUE(report.valid()) << c.policies;
  }
}

TEST(Validate, UnmatchedActionWarnsAlwaysFalse) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  auto p = policies_from("permit(principal, action == Action::\"Nope\", resource);").at(0);
  auto report = validate_policy(p, s);
  EXPECT_TRUE(report.valid());
  EXPECT_EQ(report.warnings, std::vector<ValidationWarning>{ValidationWarning::AlwaysFalse});
}

TEST(Validate, ImpossiblePolicyWarns) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  auto p = policies_from("permit(principal, action == Action::\"GetList\", resource) "
                         "when { resource is Application };").at(0);
  auto report = validate_policy(p, s);
  EXPECT_TRUE(report.valid());
  EXPECT_EQ(report.warnings, std::vector<ValidationWarning>{ValidationWarning::AlwaysFalse});
  auto always = policies_from("permit(principal, action == Action::\"GetList\", resource);").at(0);
  EXPECT_EQ(validate_policy(always, s).warnings, std::vector<ValidationWarning>{ValidationWarning::AlwaysTrue});
}

TEST(Validate, TemplatesUseSlotTypes) {
  auto s = schema_fixture("gdrive-templates/schema.cedarschema");
  auto ps = policy_fixture("gdrive-templates/policies.cedar");
  for (const auto& p : ps) {
    if (!p.is_template()) continue;
    auto report = validate_policy(p, s);
    EXPECT_TRUE(report.is_template);
    EXPECT_TRUE(report.valid());
    EXPECT_FALSE(report.results.empty());
  }
}

}  // namespace
}  // namespace arbiter
