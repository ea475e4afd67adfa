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

#include "checks.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "arbiter/authorizer.h"
#include "arbiter/evaluator.h"
#include "arbiter/parser.h"
#include "arbiter/smt/model.h"
#include "arbiter/smt/script.h"
#include "arbiter/symcc/compiler.h"
#include "arbiter/symcc/equivalence.h"
#include "arbiter/symcc/interpret.h"
#include "arbiter/testkit/enumerate.h"
#include "arbiter/testkit/gen.h"
#include "arbiter/testkit/reference.h"
#include "arbiter/utf8.h"
#include "arbiter/validator.h"

namespace arbiter::checks {

using nlohmann::json;
using testkit::GenConfig;
using testkit::Rng;

uint64_t Context::count(uint64_t full) const {
  return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(static_cast<double>(full) * scale)));
}

void Report::fail(json c) {
  passed = false;
  ++failures;
  if (failing.size() < 5) failing.push_back(std::move(c));
}

uint64_t case_seed(uint64_t seed, uint64_t i) {
  // splitmix64 over the pair
  uint64_t z = seed * 0x9e3779b97f4a7c15ULL + i + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

using Clock = std::chrono::steady_clock;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Schema load_schema(const std::string& path) {
  std::string text = read_file(path);
  auto s = parse_schema(text);
  if (!s) throw std::runtime_error(render_diagnostics(s.error(), text, path));
  return std::move(*s);
}

PolicySet load_set(const std::string& policies, const std::string& links = {}) {
  std::string text = read_file(policies);
  auto ps = parse_policies(text);
  if (!ps) throw std::runtime_error(render_diagnostics(ps.error(), text, policies));
  std::vector<TemplateLink> ls;
  if (!links.empty()) {
    auto l = parse_links(read_file(links));
    if (!l) throw std::runtime_error(links + ": " + l.error());
    ls = std::move(*l);
  }
  auto set = PolicySet::create(std::move(*ps), std::move(ls));
  if (!set) throw std::runtime_error(policies + ": " + set.error());
  return std::move(*set);
}

struct App {
  std::string name;
  Schema schema;
  PolicySet set;
};

App load_app(const Context& ctx, const std::string& name) {
  std::string dir = ctx.fixtures + "/" + name + "/";
  bool linked = name.find("templates") != std::string::npos;
  return App{name, load_schema(dir + "schema.cedarschema"),
             load_set(dir + "policies.cedar", linked ? dir + "links.json" : "")};
}

const std::vector<std::string> kApps = {"tinytodo", "gdrive", "github"};
const std::vector<std::string> kAllSets = {"tinytodo", "gdrive", "github", "gdrive-templates", "github-templates"};

json ref_json(const EntityRef& r) { return json{{"type", r.type}, {"id", r.id}}; }

// Static policies and templates: the inputs PolicySet::create was given.
std::vector<Policy> source_policies(const PolicySet& set) {
  std::set<std::string> link_ids;
  for (const auto& l : set.links()) link_ids.insert(l.link_id);
  std::vector<Policy> out;
  for (const auto& p : set.policies()) {
    if (!link_ids.count(p.id)) out.push_back(p);
  }
  for (const auto& t : set.templates()) out.push_back(t);
  return out;
}

json set_json(const PolicySet& set) {
  json links = json::array();
  for (const auto& l : set.links()) {
    json j{{"template", l.template_id}, {"id", l.link_id}};
    for (const auto& [slot, e] : l.bindings) j[slot == SlotId::Principal ? "principal" : "resource"] = ref_json(e);
    links.push_back(j);
  }
  return json{{"policies", render_policies(source_policies(set))}, {"links", links}};
}

json case_json(uint64_t seed, const std::string& detail, const PolicySet* set = nullptr,
               const EntityStore* store = nullptr, const Request* req = nullptr) {
  json j{{"case_seed", seed}, {"detail", detail}};
  if (set) j["policy_set"] = set_json(*set);
  if (store) j["entities"] = json::parse(entities_to_json(*store));
  if (req) j["request"] = json::parse(request_to_json(*req));
  return j;
}

json decision_json(const Decision& d) {
  json errs = json::array();
  for (const auto& [id, e] : d.errors) errs.push_back({id, eval_error_name(e.kind)});
  return json{{"decision", d.verdict == Decision::Verdict::Allow ? "ALLOW" : "DENY"},
              {"determining", d.determining},
              {"errors", errs}};
}

bool same_decision(const Decision& a, const Decision& b) {
  if (a.verdict != b.verdict || a.determining != b.determining || a.errors.size() != b.errors.size()) return false;
  for (size_t i = 0; i < a.errors.size(); ++i) {
    if (a.errors[i].first != b.errors[i].first || a.errors[i].second.kind != b.errors[i].second.kind) return false;
  }
  return true;
}

PolicySet random_set(Rng& rng, const GenConfig& cfg, bool linked) {
  return linked ? testkit::gen_linked_policies(rng, cfg) : testkit::gen_policies(rng, cfg);
}

PolicySet permuted(Rng& rng, const PolicySet& set) {
  auto ps = source_policies(set);
  auto links = set.links();
  rng.shuffle(ps);
  rng.shuffle(links);
  return *PolicySet::create(std::move(ps), std::move(links));
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << x;
  return ss.str();
}

template <typename Fn>
void parallel_for(uint64_t n, unsigned threads, Fn fn) {
  std::atomic<uint64_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (uint64_t i; (i = next++) < n;) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Report semantics(const Context& ctx) {
  Report r;
  uint64_t n = ctx.count(100000);
  uint64_t allows = 0, forbidden = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t s = case_seed(ctx.seed, i);
    Rng rng(s);
    GenConfig cfg;
    cfg.max_entities = 1 + rng.below(6);
    EntityStore store = testkit::gen_store(rng, cfg);
    PolicySet set = random_set(rng, cfg, rng.chance(30));
    Request req = testkit::gen_request(rng, store);
    Decision d = authorize(set, store, req);
    ++r.cases;

    std::set<std::string> permits, forbids;
    for (const auto& p : set.policies()) {
      auto o = evaluate_policy(p, store, req);
      if (o.kind == PolicyOutcome::Kind::Satisfied) (p.effect == Effect::Permit ? permits : forbids).insert(p.id);
    }
    std::string broken;
    if (!forbids.empty() && (d.verdict != Decision::Verdict::Deny || d.determining != forbids)) {
      broken = "forbid-trumps-permit";
    } else if (permits.empty() && d.verdict != Decision::Verdict::Deny) {
      broken = "default-deny";
    } else if (d.verdict == Decision::Verdict::Allow && (d.determining.empty() || d.determining != permits)) {
      broken = "explicit-allow";
    } else if (!same_decision(d, authorize(permuted(rng, set), store, req))) {
      broken = "order-independence";
    } else if (!same_decision(d, testkit::reference_authorize(set, store, req))) {
      broken = "reference-disagreement";
    }
    allows += d.verdict == Decision::Verdict::Allow;
    forbidden += !forbids.empty();
    if (!broken.empty()) {
      auto c = case_json(s, broken, &set, &store, &req);
      c["decision"] = decision_json(d);
      r.fail(std::move(c));
    }
  }
  r.summary = std::to_string(r.cases) + " triples, " + std::to_string(r.failures) + " violations (" +
              std::to_string(allows) + " allow, " + std::to_string(forbidden) + " with a satisfied forbid)";
  return r;
}

Report slicing(const Context& ctx) {
  Report r;
  uint64_t n = ctx.count(100000);
  std::vector<App> fixtures;
  for (const char* name : {"gdrive-templates", "github-templates"}) fixtures.push_back(load_app(ctx, name));
  uint64_t linked = 0, fixture_cases = 0, nonempty_slices = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t s = case_seed(ctx.seed ^ 0x51ce, i);
    Rng rng(s);
    GenConfig cfg;
    cfg.max_entities = 1 + rng.below(6);
    PolicySet set;
    EntityStore store;
    Request req;
    if (rng.chance(10)) {
      // Conforming inputs for the template fixtures.
      const App& app = fixtures[rng.below(fixtures.size())];
      auto c = testkit::gen_conforming(rng, cfg, app.schema, testkit::entity_literals(app.set));
      set = app.set;
      store = std::move(c.store);
      req = c.request;
      ++fixture_cases;
    } else {
      store = testkit::gen_store(rng, cfg);
      bool with_links = rng.chance(50);
      linked += with_links;
      set = random_set(rng, cfg, with_links);
      req = testkit::gen_request(rng, store);
    }
    ++r.cases;
    Decision sliced = authorize(set, store, req, true);
    Decision full = authorize(set, store, req, false);
    nonempty_slices += !slice(set.index(), store, req).empty();
    if (!same_decision(sliced, full)) {
      auto c = case_json(s, "sliced and unsliced decisions differ", &set, &store, &req);
      c["sliced"] = decision_json(sliced);
      c["unsliced"] = decision_json(full);
      r.fail(std::move(c));
    }
  }
  r.summary = std::to_string(r.cases) + " inputs (" + std::to_string(linked) + " generated with links, " +
              std::to_string(fixture_cases) + " on template fixtures, " + std::to_string(nonempty_slices) +
              " nonempty slices), " + std::to_string(r.failures) + " mismatches";
  return r;
}

Report validation_soundness(const Context& ctx) {
  Report r;
  uint64_t per_set = ctx.count(10000);
  std::ostringstream summary;
  for (const auto& name : kAllSets) {
    App app = load_app(ctx, name);
    if (!validate(app.set, app.schema).valid()) {
      r.fail(json{{"detail", name + " does not validate"}});
      continue;
    }
    auto literals = testkit::entity_literals(app.set);
    uint64_t satisfied = 0;
    for (uint64_t i = 0; i < per_set; ++i) {
      uint64_t s = case_seed(ctx.seed ^ std::hash<std::string>{}(name), i);
      Rng rng(s);
      GenConfig cfg;
      cfg.max_entities = 1 + rng.below(5);
      cfg.edge_percent = static_cast<unsigned>(rng.range(5, 40));
      auto c = testkit::gen_conforming(rng, cfg, app.schema, literals);
      ++r.cases;
      for (const auto& p : app.set.policies()) {
        auto o = evaluate_policy(p, c.store, c.request);
        satisfied += o.kind == PolicyOutcome::Kind::Satisfied;
        if (o.kind == PolicyOutcome::Kind::Errored) {
          auto j = case_json(s, name + ": policy " + p.id + " errored: " + eval_error_name(o.error.kind) + " " +
                                    o.error.detail + " at " + o.error.trace,
                             nullptr, &c.store, &c.request);
          r.fail(std::move(j));
        }
      }
    }
    summary << name << " " << per_set << " (" << satisfied << " satisfied), ";
  }
  r.summary = summary.str() + std::to_string(r.failures) + " errored evaluations";
  return r;
}

namespace {

Type without_attribute(const Type& t, const std::string& name) {
  if (t.is_set()) return Type::set_of(without_attribute(t.element(), name));
  if (!t.is_record()) return t;
  std::vector<AttributeType> attrs;
  for (const auto& a : t.attributes()) {
    if (a.name != name) attrs.push_back(AttributeType{a.name, a.required, without_attribute(a.type, name)});
  }
  return Type::record(std::move(attrs));
}

void collect_accessed(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind() == Expr::Kind::GetAttr) out.insert(e->name());
  for (const auto& c : e->children()) collect_accessed(c, out);
}

}  // namespace

Report validator_parity(const Context& ctx) {
  Report r;
  std::ostringstream summary;
  for (const auto& name : kAllSets) {
    App app = load_app(ctx, name);
    ++r.cases;
    if (!validate(app.set, app.schema).valid()) {
      r.fail(json{{"detail", name + " does not validate against its schema"}});
      continue;
    }
    std::set<std::string> accessed;
    for (const auto& p : source_policies(app.set)) {
      for (const auto& c : p.conditions) collect_accessed(c.body, accessed);
    }
    // Mutation 1: delete an accessed attribute everywhere it is declared.
    size_t deletions = 0, flipped = 0;
    for (const auto& attr : accessed) {
      Schema mutant = app.schema;
      for (auto& [tn, decl] : mutant.entity_types) decl.attributes = without_attribute(decl.attributes, attr);
      for (auto& [an, decl] : mutant.actions) decl.context = without_attribute(decl.context, attr);
      ++deletions;
      flipped += !validate(app.set, mutant).valid();
    }
    if (flipped == 0) r.fail(json{{"detail", name + ": no attribute deletion made the set invalid"}});
    // Mutation 2: swap the principal and resource types of every action.
    Schema swapped = app.schema;
    for (auto& [an, decl] : swapped.actions) std::swap(decl.principal_types, decl.resource_types);
    bool swap_flips = !validate(app.set, swapped).valid();
    if (!swap_flips) r.fail(json{{"detail", name + ": swapping principal and resource types kept it valid"}});
    summary << name << ": valid, " << flipped << "/" << deletions << " deletions and "
            << (swap_flips ? "the" : "no") << " type swap invalidate; ";
  }
  r.summary = summary.str();
  return r;
}

Report symbolic_fidelity(const Context& ctx) {
  Report r;
  uint64_t n = ctx.count(10000);
  std::vector<App> apps;
  for (const auto& a : kApps) apps.push_back(load_app(ctx, a));
  uint64_t skipped = 0, errors = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t s = case_seed(ctx.seed ^ 0xf1de, i);
    Rng rng(s);
    const App& app = apps[i % apps.size()];
    GenConfig cfg;
    cfg.max_entities = 1 + rng.below(4);
    auto c = testkit::gen_conforming(rng, cfg, app.schema);
    std::vector<EntityRef> ids;
    for (const auto& [uid, d] : c.store.entries()) {
      if (uid.type != kActionType) ids.push_back(uid);
    }
    Type want_type = Type::boolean();
    switch (rng.below(10)) {
      case 0: want_type = Type::long_type(); break;
      case 1: want_type = Type::string_type(); break;
      case 2: want_type = Type::entity(c.env.principal_type); break;
      default: break;
    }
    ExprPtr e = testkit::gen_typed_expr(rng, app.schema, c.env, want_type, 1 + rng.below(5), ids);
    if (!e) {
      ++skipped;
      continue;
    }
    ++r.cases;
    auto fail = [&](const std::string& why) {
      auto j = case_json(s, app.name + ": " + why, nullptr, &c.store, &c.request);
      j["expr"] = render_expr(e);
      j["env"] = c.env.to_string();
      r.fail(std::move(j));
    };
    symcc::SymbolicEnv senv(app.schema, c.env);
    auto compiled = symcc::compile(e, senv);
    if (!compiled) {
      fail("compile failed: " + compiled.error().message);
      continue;
    }
    if (auto ok = smt::sort_check(compiled->term, senv); !ok) {
      fail("sort check failed: " + ok.error().message);
      continue;
    }
    symcc::StoreInterpretation interp(senv, c.store, c.request);
    auto sv = symcc::eval_term(compiled->term, interp);
    if (!sv) {
      fail("term evaluation failed: " + sv.error().message);
      continue;
    }
    auto got = symcc::decode_result(*sv, compiled->term->sort(), senv);
    auto want = evaluate(e, c.store, c.request);
    errors += !want.ok();
    if (!got) {
      fail("decode failed: " + got.error().message);
    } else if (got->has_value() != want.ok()) {
      fail(want.ok() ? "term is none but evaluation succeeded" : "term is some but evaluation errored");
    } else if (want.ok() && **got != *want) {
      fail("values differ: term " + render_value(**got) + ", evaluator " + render_value(*want));
    }
  }
  if (skipped * 10 > n) r.fail(json{{"detail", "generator gave up on " + std::to_string(skipped) + " cases"}});
  r.summary = std::to_string(r.cases) + " well-typed triples (" + std::to_string(errors) + " erroring), " +
              std::to_string(r.failures) + " disagreements";
  return r;
}

namespace {

Result<std::vector<symcc::EnvVerdict>, symcc::AnalysisError> analyze(const PolicySet& a, const PolicySet& b,
                                                                     const Schema& schema, const Context& ctx,
                                                                     unsigned jobs = 0) {
  symcc::AnalysisOptions opts;
  opts.solver = ctx.solver;
  opts.jobs = jobs;
  return symcc::analyze_equivalence(a, b, schema, opts);
}

}  // namespace

Report scenarios(const Context& ctx) {
  Report r;
  std::ostringstream summary;
  {
    // Folding a forbid into an `unless` changes GetOwnedLists for interns.
    std::string dir = ctx.fixtures + "/tinytodo/";
    Schema schema = load_schema(dir + "schema.cedarschema");
    PolicySet original = load_set(dir + "original.cedar");
    PolicySet revised = load_set(dir + "revised.cedar");
    ++r.cases;
    auto v = analyze(original, revised, schema, ctx);
    if (!v) {
      r.fail(json{{"detail", std::string("tinytodo rewrite: ") + analysis_error_name(v.error().kind) + ": " +
                                 v.error().message}});
    } else {
      std::vector<std::string> differing;
      bool witness_ok = false;
      for (const auto& env : *v) {
        if (env.kind == symcc::EnvVerdict::Kind::Equivalent) continue;
        differing.push_back(env.env.action.id + ":" + verdict_name(env.kind));
        if (env.kind != symcc::EnvVerdict::Kind::Differs) continue;
        const auto& cex = *env.counterexample;
        Decision o = authorize(original, cex.store, cex.request);
        Decision n = authorize(revised, cex.store, cex.request);
        witness_ok = o.verdict == Decision::Verdict::Allow && n.verdict == Decision::Verdict::Deny;
      }
      if (differing != std::vector<std::string>{"GetOwnedLists:Differs"} || !witness_ok) {
        r.fail(json{{"detail", "tinytodo rewrite: expected only GetOwnedLists to differ with an allow/deny witness"},
                     {"non_equivalent", differing}});
      } else {
        summary << "tinytodo rewrite differs on GetOwnedLists only, witness re-verified allow vs deny; ";
      }
    }
  }
  for (const auto& app : kApps) {
    std::string dir = ctx.fixtures + "/refactor/" + app + "/";
    PolicySet old_set = load_set(dir + "old.cedar");
    PolicySet new_set = load_set(dir + "new.cedar");
    for (const char* schema_file : {"schema.cedarschema", "schema-buggy.cedarschema"}) {
      bool buggy = std::string(schema_file) == "schema-buggy.cedarschema";
      ++r.cases;
      auto v = analyze(old_set, new_set, load_schema(dir + schema_file), ctx);
      if (!v) {
        r.fail(json{{"detail", app + "/" + schema_file + ": " + v.error().message}});
        continue;
      }
      std::set<std::string> differing;
      bool other = false;
      for (const auto& env : *v) {
        if (env.kind == symcc::EnvVerdict::Kind::Differs) differing.insert(env.env.action.id);
        other |= env.kind == symcc::EnvVerdict::Kind::Unknown || env.kind == symcc::EnvVerdict::Kind::Timeout;
      }
      std::set<std::string> expected;
      if (buggy) expected.insert("bug_inducing");
      if (differing != expected || other) {
        r.fail(json{{"detail", app + "/" + schema_file + ": unexpected verdicts"},
                    {"differing", std::vector<std::string>(differing.begin(), differing.end())}});
      }
    }
    summary << app << " refactor equivalent, differs only on bug_inducing; ";
  }
  r.summary = summary.str();
  return r;
}

namespace {

// Three entity types; literals limited to Group::"0", Group::"1" and
// Doc::"0". Every counterexample then fits in two ids per type: users are
// only reachable as principal and resource.owner, docs as resource and the
// one literal, groups only as literals.
const char* kSmallSchema = R"(
entity Group in [Group];
entity User in [Group] { admin: Bool };
entity Doc { owner: User, public: Bool };
action view appliesTo { principal: [User], resource: [Doc] };
action edit appliesTo { principal: [User], resource: [Doc] };
)";

struct SmallGen {
  const Schema& schema;
  RequestEnv env;
  std::vector<EntityRef> literals = {{"Group", "0"}, {"Group", "1"}, {"Doc", "0"}};

  ExprPtr condition(Rng& rng) {
    for (int i = 0; i < 10; ++i) {
      if (auto e = testkit::gen_typed_expr(rng, schema, env, Type::boolean(), 1 + rng.below(4), literals)) return e;
    }
    return Expr::boolean(true);
  }

  Policy policy(Rng& rng, std::string id) {
    Policy p;
    p.id = std::move(id);
    p.effect = rng.chance(65) ? Effect::Permit : Effect::Forbid;
    if (rng.chance(50)) p.principal = ScopeConstraint::in(EntityRef{"Group", rng.chance(50) ? "0" : "1"});
    switch (rng.below(4)) {
      case 0: break;
      case 1:
      case 2:
        p.action.kind = ActionConstraint::Kind::Eq;
        p.action.refs = {EntityRef{kActionType, rng.chance(50) ? "view" : "edit"}};
        break;
      default:
        p.action.kind = ActionConstraint::Kind::InSet;
        p.action.refs = {EntityRef{kActionType, "view"}, EntityRef{kActionType, "edit"}};
        break;
    }
    if (rng.chance(25)) p.resource = ScopeConstraint::eq(EntityRef{"Doc", "0"});
    for (size_t i = rng.below(3); i > 0; --i) p.conditions.push_back(Condition{rng.chance(75), condition(rng)});
    return p;
  }

  std::vector<Policy> policies(Rng& rng) {
    std::vector<Policy> ps;
    for (size_t i = 1 + rng.below(4); i > 0; --i) ps.push_back(policy(rng, "p" + std::to_string(ps.size())));
    return ps;
  }

  // A second set: half the time a rewrite that keeps the meaning, otherwise
  // a small change that may or may not.
  std::pair<std::vector<Policy>, std::string> mutate(Rng& rng, std::vector<Policy> ps) {
    size_t k = rng.below(ps.size());
    Policy& p = ps[k];
    switch (rng.below(10)) {
      case 0: rng.shuffle(ps); return {ps, "reorder"};
      case 1: {
        Policy dup = p;
        dup.id += "-dup";
        ps.push_back(dup);
        return {ps, "duplicate"};
      }
      case 2:
        if (p.conditions.empty()) p.conditions.push_back(Condition{true, Expr::boolean(true)});
        p.conditions[0].body = Expr::not_(Expr::not_(p.conditions[0].body));
        return {ps, "double negation"};
      case 3:
        if (p.conditions.empty()) return {ps, "identity"};
        p.conditions[0].is_when = !p.conditions[0].is_when;
        p.conditions[0].body = Expr::not_(p.conditions[0].body);
        return {ps, "when/unless swap"};
      case 4:
        if (ps.size() > 1) {
          ps.erase(ps.begin() + static_cast<long>(k));
          return {ps, "drop"};
        }
        [[fallthrough]];
      case 5:
        p.effect = p.effect == Effect::Permit ? Effect::Forbid : Effect::Permit;
        return {ps, "flip effect"};
      case 6:
        if (p.conditions.empty()) p.conditions.push_back(Condition{true, condition(rng)});
        p.conditions[rng.below(p.conditions.size())].body = condition(rng);
        return {ps, "new condition"};
      case 7: ps.push_back(policy(rng, "extra")); return {ps, "add"};
      case 8:
        p.principal = p.principal.kind == ScopeConstraint::Kind::Any
                          ? ScopeConstraint::in(EntityRef{"Group", "0"})
                          : ScopeConstraint::any();
        return {ps, "principal scope"};
      default: return {ps, "identity"};
    }
  }
};

struct PairResult {
  bool mismatch = false;
  bool inconclusive = false;
  bool differs = false;
  json failure;
};

}  // namespace

Report brute_force_equivalence(const Context& ctx) {
  Report r;
  auto parsed = parse_schema(kSmallSchema);
  if (!parsed) throw std::runtime_error("small schema does not parse");
  const Schema schema = std::move(*parsed);
  const auto envs = environments(schema);
  uint64_t n = ctx.count(200);
  testkit::EnumConfig ecfg;
  ecfg.bound = 2;

  std::vector<PairResult> results(n);
  unsigned threads = std::clamp(std::thread::hardware_concurrency(), 1u, 4u);
  parallel_for(n, threads, [&](uint64_t i) {
    uint64_t s = case_seed(ctx.seed ^ 0xb00f, i);
    Rng rng(s);
    SmallGen gen{schema, envs[0]};
    auto a_src = gen.policies(rng);
    auto [b_src, how] = gen.mutate(rng, a_src);
    PolicySet a = *PolicySet::create(a_src);
    PolicySet b = *PolicySet::create(b_src);
    PairResult& out = results[i];
    auto fail_json = [&](const std::string& why) {
      json j{{"case_seed", s}, {"detail", why}, {"mutation", how}};
      j["old"] = set_json(a);
      j["new"] = set_json(b);
      return j;
    };

    auto verdicts = analyze(a, b, schema, ctx, 1);
    if (!verdicts) {
      out.mismatch = true;
      out.failure = fail_json(std::string(analysis_error_name(verdicts.error().kind)) + ": " +
                              verdicts.error().message);
      return;
    }
    std::map<std::string, bool> brute;
    for (const auto& env : envs) brute[env.action.id] = false;
    auto count = testkit::enumerate_conforming(schema, ecfg, [&](const RequestEnv& env, const EntityStore& store,
                                                                 const Request& req) {
      bool& d = brute[env.action.id];
      if (!d) d = authorize(a, store, req).verdict != authorize(b, store, req).verdict;
      return true;
    });
    if (!count) {
      out.mismatch = true;
      out.failure = fail_json("enumeration bound too large: " + count.error().detail);
      return;
    }
    for (const auto& v : *verdicts) {
      if (v.kind == symcc::EnvVerdict::Kind::Unknown || v.kind == symcc::EnvVerdict::Kind::Timeout) {
        out.inconclusive = true;
        continue;
      }
      bool solver_differs = v.kind == symcc::EnvVerdict::Kind::Differs;
      out.differs |= solver_differs;
      if (solver_differs != brute[v.env.action.id]) {
        out.mismatch = true;
        out.failure = fail_json(v.env.to_string() + ": solver says " + verdict_name(v.kind) +
                                ", enumeration says " + (brute[v.env.action.id] ? "Differs" : "Equivalent"));
      }
    }
  });

  uint64_t inconclusive = 0, differs = 0;
  for (auto& res : results) {
    ++r.cases;
    inconclusive += res.inconclusive;
    differs += res.differs;
    if (res.mismatch) r.fail(std::move(res.failure));
  }
  if (inconclusive * 20 > n) r.fail(json{{"detail", std::to_string(inconclusive) + " inconclusive pairs"}});
  r.summary = std::to_string(r.cases) + " pairs (" + std::to_string(differs) + " differing, " +
              std::to_string(inconclusive) + " inconclusive), " + std::to_string(r.failures) +
              " verdict mismatches against bound-2 enumeration";
  return r;
}

Report grounding(const Context& ctx) {
  Report r;
  Schema schema = *parse_schema(R"(
entity Team in [Team];
entity User in [Team];
action view appliesTo { principal: [User], resource: [Team] };
)");
  RequestEnv env = environments(schema).at(0);
  auto claim = *parse_expression(R"(Team::"0" in Team::"1" && Team::"1" in Team::"0")");
  symcc::SymbolicEnv senv(schema, env);
  auto compiled = symcc::compile(claim, senv);
  if (!compiled) {
    r.fail(json{{"detail", compiled.error().message}});
    return r;
  }
  auto run = [&](bool with_wf) -> Result<smt::SolverOutcome, smt::SolverError> {
    std::vector<symcc::TermPtr> asserts;
    if (with_wf) asserts = symcc::wf_constraints(compiled->footprint, senv);
    asserts.push_back(symcc::term::is_true(compiled->term));
    return smt::run_solver(ctx.solver, *smt::print_script(senv, asserts));
  };
  std::ostringstream summary;

  ++r.cases;
  auto grounded = run(true);
  if (!grounded || grounded->kind != smt::SolverOutcome::Kind::Unsat) {
    r.fail(json{{"detail", "expected Unsat with well-formedness constraints"},
                {"got", grounded ? smt::outcome_name(grounded->kind) : grounded.error().message}});
  } else {
    summary << "Unsat with constraints; ";
  }

  ++r.cases;
  auto bare = run(false);
  if (!bare || bare->kind != smt::SolverOutcome::Kind::Sat || !bare->model) {
    r.fail(json{{"detail", "expected Sat without constraints"},
                {"got", bare ? smt::outcome_name(bare->kind) : bare.error().message}});
  } else {
    const auto& m = *bare->model;
    auto team = [](const char* id) { return symcc::SValue::datatype("Team", {symcc::SValue::string(utf8_decode(id))}); };
    auto anc = [&](const char* id) {
      return m.apply("teamInTeam", team(id), symcc::Sort::set_of(symcc::Sort::datatype("Team")));
    };
    auto has = [](const symcc::SValue& set, const symcc::SValue& x) {
      return std::find(set.elems.begin(), set.elems.end(), x) != set.elems.end();
    };
    if (!has(anc("0"), team("1")) || !has(anc("1"), team("0"))) {
      r.fail(json{{"detail", "model does not put the two teams in a cycle"}, {"model", m.raw()}});
    } else {
      summary << "Sat without, model has Team 0 and Team 1 as each other's ancestors; ";
    }
  }

  ++r.cases;
  testkit::EnumConfig ecfg;
  ecfg.bound = 2;
  uint64_t true_count = 0;
  auto visited = testkit::enumerate_conforming(schema, ecfg, [&](const RequestEnv&, const EntityStore& s,
                                                                 const Request& req) {
    auto v = evaluate(claim, s, req);
    true_count += v.ok() && *v == Value::boolean(true);
    return true;
  });
  if (!visited || true_count) {
    r.fail(json{{"detail", "enumeration found the claim true or could not run"}});
  } else {
    summary << "never true over " << *visited << " enumerated inputs";
  }
  r.summary = summary.str();
  return r;
}

Report authorize_latency(const Context& ctx) {
  Report r;
  std::string dir = ctx.fixtures + "/tinytodo/";
  Schema schema = load_schema(dir + "schema.cedarschema");
  PolicySet set = load_set(dir + "policies.cedar");
  auto loaded = load_entities(read_file(dir + "entities-50.json"));
  if (!loaded) throw std::runtime_error("entities-50.json: " + loaded.error().message);
  EntityStore store = loaded->with_actions(schema);
  std::vector<EntityRef> users, resources, actions;
  for (const auto& [uid, d] : store.entries()) {
    if (uid.type == "User") users.push_back(uid);
    if (uid.type != kActionType) resources.push_back(uid);
  }
  for (const auto& [name, decl] : schema.actions) {
    if (decl.declared) actions.push_back(decl.uid);
  }
  uint64_t n = ctx.count(100000);
  Rng rng(ctx.seed);
  std::vector<double> micros;
  micros.reserve(n);
  uint64_t allows = 0;
  for (uint64_t i = 0; i < n; ++i) {
    Request req{rng.pick(users), rng.pick(actions), rng.pick(resources), Value::empty_record()};
    auto t0 = Clock::now();
    Decision d = authorize(set, store, req);
    auto t1 = Clock::now();
    allows += d.verdict == Decision::Verdict::Allow;
    micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    ++r.cases;
  }
  double med = median(micros);
  if (med >= 1000.0) r.fail(json{{"detail", "median authorize latency " + fmt(med) + " us"}});
  r.summary = "median " + fmt(med) + " us over " + std::to_string(n) + " requests on " +
              std::to_string(store.size()) + " entities (" + std::to_string(allows) + " allowed)";
  return r;
}

Report analyze_latency(const Context& ctx) {
  Report r;
  uint64_t trials = std::max<uint64_t>(3, ctx.count(50));
  std::ostringstream summary;
  for (const auto& name : kApps) {
    App app = load_app(ctx, name);
    auto envs = environments(app.schema);
    std::vector<std::string> actions;
    for (const auto& env : envs) {
      if (std::find(actions.begin(), actions.end(), env.action.id) == actions.end()) actions.push_back(env.action.id);
    }
    auto source = source_policies(app.set);
    Rng rng(case_seed(ctx.seed, std::hash<std::string>{}(name)));
    std::vector<double> secs;
    uint64_t differs = 0, solver_calls = 0;
    for (uint64_t t = 0; t < trials; ++t) {
      // Drop a policy that applies to the chosen action; dropping an
      // unrelated one folds to Equivalent without a solver call.
      auto ps = source;
      size_t k = rng.below(ps.size());
      std::vector<std::string> candidates;
      for (const auto& a : matching_actions(ps[k].action, app.schema)) {
        if (std::find(actions.begin(), actions.end(), a.id) != actions.end()) candidates.push_back(a.id);
      }
      std::string action = candidates.empty() ? rng.pick(actions) : rng.pick(candidates);
      ps.erase(ps.begin() + static_cast<long>(k));
      PolicySet reduced = *PolicySet::create(std::move(ps));
      auto t0 = Clock::now();
      for (const auto& env : envs) {
        if (env.action.id != action) continue;
        auto v = symcc::check_env(app.set, reduced, app.schema, env, ctx.solver);
        if (!v) {
          r.fail(json{{"detail", name + " " + env.to_string() + ": " + v.error().message}});
        } else {
          differs += v->kind == symcc::EnvVerdict::Kind::Differs;
          solver_calls += !v->script.empty();
        }
      }
      secs.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      ++r.cases;
    }
    double med = median(secs);
    if (med >= 5.0) r.fail(json{{"detail", name + ": median analysis " + fmt(med) + " s"}});
    summary << name << " median " << fmt(med * 1000) << " ms (" << solver_calls << " solver calls, " << differs
            << " differing envs); ";
  }
  r.summary = summary.str() + std::to_string(trials) + " trials per app";
  return r;
}

Report round_trip(const Context& ctx) {
  Report r;
  uint64_t n = ctx.count(100000);
  uint64_t templates = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t s = case_seed(ctx.seed ^ 0x7007, i);
    Rng rng(s);
    Policy p = testkit::gen_any_policy(rng, 1 + rng.below(5));
    templates += p.is_template();
    std::string text = render_policy(p);
    ++r.cases;
    auto back = parse_policies(text);
    if (!back || back->size() != 1 || !policy_equal(back->front(), p)) {
      json j{{"case_seed", s}, {"text", text}};
      if (!back) {
        j["detail"] = render_diagnostics(back.error(), text, "<rendered>");
      } else {
        j["detail"] = "parsed policy differs";
        if (back->size() == 1) j["reprinted"] = render_policy(back->front());
      }
      r.fail(std::move(j));
    }
  }
  r.summary = std::to_string(r.cases) + " policies (" + std::to_string(templates) + " templates), " +
              std::to_string(r.failures) + " round-trip failures";
  return r;
}

namespace {

const std::vector<std::string> kTokens = {
    "permit", "forbid", "(", ")", "{", "}", "[", "]", "principal", "action", "resource", "context", "when",
    "unless", "if", "then", "else", "has", "like", "in", "is", "==", "!=", "<", "<=", ">", ">=", "&&", "||", "!",
    "-", "+", "*", ",", ";", ":", "::", ".", "\"s\"", "\"a*b\"", "\"\\u{1F600}\"", "\"\\*\"", "1", "0",
    "9223372036854775807", "9223372036854775808", "-9223372036854775808", "User", "Action", "A::B", "?principal",
    "?resource", "@id(\"x\")", "@", "true", "false", "entity", "action", "appliesTo", "Set<", ">", "Bool", "Long",
    "String", "namespace", "type", " ", "\n", "/*", "*/", "//", "\\", "\"", "'", "\xff", "\xc3"};

std::string random_bytes(Rng& rng) {
  std::string s;
  for (size_t len = rng.below(80); len > 0; --len) s.push_back(static_cast<char>(rng.below(256)));
  return s;
}

std::string token_soup(Rng& rng) {
  std::string s;
  for (size_t len = rng.below(40); len > 0; --len) {
    s += rng.pick(kTokens);
    if (rng.chance(60)) s += ' ';
  }
  return s;
}

std::string mutated(Rng& rng, const std::string& base) {
  std::string s = base;
  if (s.empty()) return s;
  for (size_t k = 1 + rng.below(4); k > 0; --k) {
    size_t at = rng.below(s.size());
    switch (rng.below(3)) {
      case 0: s[at] = static_cast<char>(rng.below(256)); break;
      case 1: s.erase(at, 1 + rng.below(8)); break;
      default: s.insert(at, rng.pick(kTokens)); break;
    }
    if (s.empty()) break;
  }
  return s;
}

}  // namespace

Report fuzz(const Context& ctx) {
  Report r;
  uint64_t n = ctx.count(1000000);
  std::vector<std::string> corpus;
  for (const auto& app : kAllSets) {
    corpus.push_back(read_file(ctx.fixtures + "/" + app + "/policies.cedar"));
    corpus.push_back(read_file(ctx.fixtures + "/" + app + "/schema.cedarschema"));
  }
  corpus.push_back(read_file(ctx.fixtures + "/tinytodo/entities.json"));
  App tinytodo = load_app(ctx, "tinytodo");
  auto envs = environments(tinytodo.schema);

  uint64_t parsed_ok = 0, evaluated = 0, typed = 0;
  Rng rng(case_seed(ctx.seed, 0xf022));
  GenConfig cfg;
  EntityStore store = testkit::gen_store(rng, cfg);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t s = case_seed(ctx.seed ^ 0xf022, i);
    Rng local(s);
    ++r.cases;
    try {
      unsigned kind = static_cast<unsigned>(local.below(10));
      if (kind < 6) {
        std::string input = kind < 2 ? random_bytes(local) : kind < 4 ? token_soup(local) : mutated(local, local.pick(corpus));
        switch (local.below(6)) {
          case 0: parsed_ok += parse_policies(input).ok(); break;
          case 1: parsed_ok += parse_expression(input).ok(); break;
          case 2: parsed_ok += parse_schema(input).ok(); break;
          case 3: parsed_ok += load_entities(input).ok(); break;
          case 4: parsed_ok += load_request(input).ok(); break;
          default: parsed_ok += parse_links(input).ok(); break;
        }
      } else {
        if (i % 1000 == 0) store = testkit::gen_store(local, cfg);
        ExprPtr e = testkit::gen_expr(local, 1 + local.below(8));
        if (kind >= 8) {
          // Printer-oriented shapes: odd names, extreme literals, nested records.
          Policy p = testkit::gen_any_policy(local, 1 + local.below(6));
          if (!p.conditions.empty()) e = p.conditions[0].body;
        }
        Request req = testkit::gen_request(local, store);
        evaluated += evaluate(e, store, req).ok();
        const RequestEnv& env = local.pick(envs);
        ExprPtr specialized = substitute_var(e, Var::Action, Expr::entity(env.action));
        if (typecheck(specialized, env, tinytodo.schema).ok()) {
          ++typed;
          symcc::SymbolicEnv senv(tinytodo.schema, env);
          (void)symcc::compile(specialized, senv);
        }
      }
    } catch (const std::exception& ex) {
      r.fail(json{{"case_seed", s}, {"detail", std::string("exception: ") + ex.what()}});
    }
  }
  r.summary = std::to_string(r.cases) + " inputs (" + std::to_string(parsed_ok) + " parsed, " +
              std::to_string(evaluated) + " evaluated to a value, " + std::to_string(typed) +
              " typechecked), " + std::to_string(r.failures) + " crashes";
  return r;
}

}  // namespace arbiter::checks
