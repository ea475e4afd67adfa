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

#include <random>

#include "arbiter/parser.h"
#include "support.h"

namespace arbiter {
namespace {

using test::expr;
using test::policies_from;
using test::policy_fixture;
using test::read_fixture;
using test::schema_fixture;
using test::uid;

TEST(ParsePolicies, DemoPolicies) {
  auto ps = policy_fixture("tinytodo/policies-demo.cedar");
  ASSERT_EQ(ps.size(), 5u);
  std::vector<Effect> effects;
  for (const auto& p : ps) effects.push_back(p.effect);
  EXPECT_EQ(effects, (std::vector<Effect>{Effect::Permit, Effect::Permit, Effect::Permit, Effect::Permit,
                                          Effect::Forbid}));
  for (size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(ps[i].id, "policy" + std::to_string(i));
}

TEST(ParsePolicies, EmptyDocument) {
  auto r = parse_policies("");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->empty());
  auto only_comments = parse_policies("// nothing here\n");
  ASSERT_TRUE(only_comments.ok());
  EXPECT_TRUE(only_comments->empty());
}

TEST(ParsePolicies, GithubActionConstraints) {
  auto ps = policy_fixture("github/policies.cedar");
  ASSERT_EQ(ps.size(), 8u);
  // Counted by hand from the listing: the two read policies use `==`.
  int eq = 0, in = 0;
  for (const auto& p : ps) {
    if (p.action.kind == ActionConstraint::Kind::Eq) ++eq;
    if (p.action.kind == ActionConstraint::Kind::In) ++in;
  }
  EXPECT_EQ(eq, 2);
  EXPECT_EQ(in, 6);
}

TEST(ParsePolicies, AnnotationsAndIds) {
  auto ps = policy_fixture("github-templates/policies.cedar");
  ASSERT_FALSE(ps.empty());
  int templates = 0;
  for (const auto& p : ps) {
    if (p.is_template()) {
      ++templates;
      EXPECT_EQ(p.annotations.at("id"), p.id);
    }
  }
  EXPECT_EQ(templates, 5);
}

TEST(ParseExpression, Precedence) {
  // Frozen: `||` < `&&` < relations < `+ -` < `*` < unary < member access.
  struct Case {
    const char* in;
    const char* out;
  };
  const Case cases[] = {
      {"context.a || context.b && context.c", "context.a || context.b && context.c"},
      {"(context.a || context.b) && context.c", "(context.a || context.b) && context.c"},
      {"1 + 2 < 3", "1 + 2 < 3"},
      {"1 + 2 * context.x", "1 + 2 * context.x"},
      {"(1 + 2) * 3", "3 * (1 + 2)"},
      {"!principal.ok && true", "!principal.ok && true"},
      {"!(principal.ok && true)", "!(principal.ok && true)"},
      {"-context.x - 1", "-context.x - 1"},
      {"1 - (2 - 3)", "1 - (2 - 3)"},
      {"1 - 2 - 3", "1 - 2 - 3"},
      {"if context.a then context.b else context.c || context.d", "if context.a then context.b else context.c || context.d"},
      {"(if context.a then context.b else context.c) || context.d", "(if context.a then context.b else context.c) || context.d"},
      {"principal in resource.readers || principal in resource.editors",
       "principal in resource.readers || principal in resource.editors"},
      {"resource has owner && resource.owner == principal", "resource has owner && resource.owner == principal"},
      {"context.y.z like \"a*\"", "context.y.z like \"a*\""},
      {"[1, 2].containsAll([1])", "[1, 2].containsAll([1])"},
      {"{a: 1, \"b c\": 2}.a", "{a: 1, \"b c\": 2}.a"},
      {"principal is User && principal in Team::\"x\"", "principal is User && principal in Team::\"x\""},
      {"context.a != context.b", "!(context.a == context.b)"},
      {"context.a > context.b", "!(context.a <= context.b)"},
      {"context.a >= context.b", "!(context.a < context.b)"},
  };
  for (const auto& c : cases) {
    auto r = parse_expression(c.in);
    ASSERT_TRUE(r.ok()) << c.in;
    EXPECT_EQ(render_expr(*r), c.out) << c.in;
  }
}

TEST(ParseExpression, OnlyRequestVariablesAreNames) {
  EXPECT_TRUE(parse_expression("principal").ok());
  EXPECT_FALSE(parse_expression("foo").ok());
}

TEST(ParseExpression, NegativeLiterals) {
  auto e = expr("-9223372036854775808");
  ASSERT_EQ(e->kind(), Expr::Kind::Lit);
  EXPECT_EQ(e->literal().as_long(), INT64_MIN);
  EXPECT_FALSE(parse_expression("9223372036854775808").ok());
  EXPECT_EQ(render_expr(expr("-(5)")), "-(5)");
  EXPECT_EQ(expr("-(5)")->kind(), Expr::Kind::Neg);
}

TEST(ParseExpression, MultiplicationNeedsALiteral) {
  EXPECT_TRUE(parse_expression("context.x * 3").ok());
  EXPECT_TRUE(parse_expression("3 * context.x").ok());
  EXPECT_FALSE(parse_expression("context.x * context.y").ok());
}

TEST(ParseExpression, StringEscapes) {
  auto e = expr(R"("a\"b\\c\n\t\u{e9}")");
  EXPECT_EQ(e->literal().as_string(), "a\"b\\c\n\t\xc3\xa9");
  auto like = expr(R"(context.s like "a\*b*")");
  ASSERT_EQ(like->kind(), Expr::Kind::Like);
  EXPECT_TRUE(like->pattern().matches("a*bzzz"));
  EXPECT_FALSE(like->pattern().matches("axbzzz"));
}

TEST(ParseExpression, RejectsExtensionsAndMethods) {
  auto r = parse_expression("ip(\"10.0.0.1\")");
  ASSERT_FALSE(r.ok());
  EXPECT_FALSE(r.error().empty());
  EXPECT_FALSE(parse_expression("context.x.isIpv4()").ok());
  EXPECT_FALSE(parse_expression("decimal(\"1.0\")").ok());
}

TEST(ParsePolicies, ReservedWordMisuse) {
  // Reserved attribute names need the bracket form.
  EXPECT_TRUE(parse_policies("permit(principal, action, resource) when { context[\"if\"] };").ok());
  EXPECT_FALSE(parse_policies("permit(principal, action, resource) when { context.if };").ok());
  EXPECT_FALSE(parse_policies("permit(principal, action, resource) when { if == 1 };").ok());
  EXPECT_EQ(render_expr(expr("context[\"if\"][\"then\"].x")), "context[\"if\"][\"then\"].x");
}

TEST(ParsePolicies, DiagnosticsRenderTheSourceLine) {
  std::string src = "permit(principal, action, resource)\nwhen { principal.x == };\n";
  auto r = parse_policies(src);
  ASSERT_FALSE(r.ok());
  ASSERT_FALSE(r.error().empty());
  const auto& d = r.error().front();
  EXPECT_EQ(d.span.line, 2);
  std::string text = render_diagnostic(d, src, "p.cedar");
  EXPECT_NE(text.find("p.cedar:2:"), std::string::npos) << text;
  EXPECT_NE(text.find("when { principal.x == };"), std::string::npos) << text;
  EXPECT_NE(text.find("^"), std::string::npos) << text;
}

TEST(ParsePolicies, RecoversAndReportsSeveralErrors) {
  auto r = parse_policies("permit(principal, action) ; forbid(principal, action, resource) when { 1 + };");
  ASSERT_FALSE(r.ok());
  EXPECT_GE(r.error().size(), 2u);
}

TEST(ParsePolicies, SlotsOnlyInScope) {
  EXPECT_TRUE(parse_policies("permit(principal in ?principal, action, resource == ?resource);").ok());
  EXPECT_FALSE(parse_policies("permit(principal, action == ?principal, resource);").ok());
  EXPECT_FALSE(parse_policies("permit(principal, action, resource) when { ?principal == principal };").ok());
}

TEST(ParsePolicies, DeepNestingIsAnErrorNotACrash) {
  std::string deep(5000, '(');
  deep = "permit(principal, action, resource) when { " + deep + "true" + std::string(5000, ')') + " };";
  auto r = parse_policies(deep);
  EXPECT_FALSE(r.ok());
}

TEST(ParsePolicies, ArbitraryBytesNeverCrash) {
  std::mt19937_64 rng(7);
  std::string alphabet = "permitforbidwhenunless(){}[];,.=!<>&|+-*\"\\:?@ \n\t0123456789abcxyz";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    size_t n = rng() % 80;
    for (size_t j = 0; j < n; ++j) {
      s.push_back(rng() % 8 == 0 ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()]);
    }
    auto r = parse_policies(s);
    if (!r.ok()) {
      for (const auto& d : r.error()) {
        EXPECT_LE(d.span.byte_start, d.span.byte_end);
        EXPECT_LE(d.span.byte_end, s.size());
        render_diagnostic(d, s, "fuzz");
      }
    }
    parse_expression(s);
    parse_schema(s);
  }
}

TEST(Render, PolicyTextRoundTripsOnFixtures) {
  for (const char* f : {"tinytodo/policies.cedar", "tinytodo/policies-demo.cedar", "gdrive/policies.cedar",
                        "github/policies.cedar", "github-templates/policies.cedar",
                        "gdrive-templates/policies.cedar", "refactor/tinytodo/old.cedar"}) {
    auto ps = policy_fixture(f);
    std::string text = render_policies(ps);
    auto again = parse_policies(text);
    ASSERT_TRUE(again.ok()) << f << "\n" << text;
    ASSERT_EQ(again->size(), ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
      // Positional ids are not written back, so compare content only.
      EXPECT_TRUE(policy_equal((*again)[i], ps[i])) << f << " #" << i;
    }
  }
}

TEST(Render, OwnerPolicyKeepsIsAndConjunction) {
  auto ps = policy_fixture("tinytodo/policies-demo.cedar");
  std::string text = render_policy(ps[1]);
  EXPECT_NE(text.find("resource is List &&"), std::string::npos) << text;
}

TEST(Render, EntityRefsRoundTrip) {
  for (auto r : {uid("User", "alice"), uid("A::B", "with \"quotes\" and \\"), uid("T", ""),
                 uid("T", "\xe2\x98\x83\n")}) {
    auto e = parse_expression(render_value(Value::entity(r)));
    ASSERT_TRUE(e.ok()) << r.to_string();
    EXPECT_EQ((*e)->literal().as_entity(), r);
  }
}

TEST(ParseSchema, ReducedTodoSchema) {
  auto s = schema_fixture("tinytodo/schema-small.cedarschema");
  EXPECT_EQ(s.entity_types.size(), 4u);
  EXPECT_EQ(s.entity_type("List")->parent_types, std::set<std::string>{"Application"});
  const ActionDecl* get = s.action(uid("Action", "GetList"));
  ASSERT_NE(get, nullptr);
  EXPECT_EQ(get->principal_types, std::vector<std::string>{"User"});
  EXPECT_EQ(get->resource_types, std::vector<std::string>{"List"});
  EXPECT_EQ(get->context, Type::record({}));
}

TEST(ParseSchema, MinimalEntity) {
  auto s = test::schema_from("entity A;");
  ASSERT_EQ(s.entity_types.size(), 1u);
  const auto* a = s.entity_type("A");
  EXPECT_EQ(a->attributes, Type::record({}));
  EXPECT_TRUE(a->parent_types.empty());
}

TEST(ParseSchema, GithubActionClosure) {
  auto s = schema_fixture("github/schema.cedarschema");
  const ActionDecl* read = s.action(uid("Action", "readRepository"));
  ASSERT_NE(read, nullptr);
  EXPECT_EQ(read->parents, std::set<EntityRef>{uid("Action", "triageRepository")});
  // readRepository -> triage -> write -> maintain -> administrate, by hand.
  EXPECT_EQ(read->ancestors, (std::set<EntityRef>{uid("Action", "triageRepository"), uid("Action", "writeRepository"),
                                                  uid("Action", "maintainRepository"),
                                                  uid("Action", "administrateRepository")}));
  EXPECT_TRUE(s.action_in(uid("Action", "readRepository"), uid("Action", "administrateRepository")));
  EXPECT_FALSE(s.action_in(uid("Action", "admin"), uid("Action", "readRepository")));
}

TEST(ParseSchema, Errors) {
  EXPECT_FALSE(parse_schema("entity A in [B];").ok());
  EXPECT_FALSE(parse_schema("entity A; entity A;").ok());
  EXPECT_FALSE(parse_schema("entity A { x: Foo };").ok());
  EXPECT_FALSE(parse_schema("action a in [b]; action b in [a];").ok());
  EXPECT_FALSE(parse_schema("entity A; action a appliesTo { principal: [B], resource: [A] };").ok());
}

TEST(ParseSchema, AllFixtures) {
  for (const char* f : {"tinytodo/schema.cedarschema", "gdrive/schema.cedarschema", "github/schema.cedarschema",
                        "github-templates/schema.cedarschema", "gdrive-templates/schema.cedarschema",
                        "refactor/github/schema.cedarschema", "refactor/github/schema-buggy.cedarschema",
                        "refactor/gdrive/schema.cedarschema", "refactor/gdrive/schema-buggy.cedarschema",
                        "refactor/tinytodo/schema.cedarschema", "refactor/tinytodo/schema-buggy.cedarschema"}) {
    auto r = parse_schema(read_fixture(f));
    EXPECT_TRUE(r.ok()) << f << (r.ok() ? "" : render_diagnostics(r.error(), read_fixture(f), f));
  }
}

}  // namespace
}  // namespace arbiter
