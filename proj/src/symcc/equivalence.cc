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

#include "arbiter/symcc/equivalence.h"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "arbiter/smt/script.h"
#include "arbiter/symcc/interpret.h"
#include "arbiter/utf8.h"

namespace arbiter::symcc {

const char* verdict_name(EnvVerdict::Kind k) {
  switch (k) {
    case EnvVerdict::Kind::Equivalent: return "Equivalent";
    case EnvVerdict::Kind::Differs: return "Differs";
    case EnvVerdict::Kind::Unknown: return "Unknown";
    case EnvVerdict::Kind::Timeout: return "Timeout";
  }
  return "?";
}

const char* analysis_error_name(AnalysisError::Kind k) {
  switch (k) {
    case AnalysisError::Kind::IllTyped: return "IllTyped";
    case AnalysisError::Kind::SolverUnavailable: return "SolverUnavailable";
    case AnalysisError::Kind::SolverFailed: return "SolverFailed";
    case AnalysisError::Kind::ReconstructionFailed: return "ReconstructionFailed";
  }
  return "?";
}

Result<AllowTerm, AnalysisError> allow_term(const PolicySet& set, SymbolicEnv& senv) {
  TermPtr permits = term::boolean(false);
  TermPtr forbids = term::boolean(false);
  std::vector<FootprintEntry> footprint;
  for (const auto& p : set.policies()) {
    auto c = compile(specialize(p, senv.env()), senv);
    if (!c) {
      return unexpected(AnalysisError{AnalysisError::Kind::IllTyped,
                                      "policy " + p.id + " in " + senv.env().to_string() + ": " + c.error().message});
    }
    TermPtr holds = term::is_true(c->term);
    if (p.effect == Effect::Permit) {
      permits = term::or_(permits, holds);
    } else {
      forbids = term::or_(forbids, holds);
    }
    merge_footprint(footprint, c->footprint);
  }
  return AllowTerm{term::and_(permits, term::not_(forbids)), std::move(footprint)};
}

Result<EquivalenceQuery, AnalysisError> equivalence_query(const PolicySet& old_set, const PolicySet& new_set,
                                                          SymbolicEnv& senv) {
  auto a = allow_term(old_set, senv);
  if (!a) return unexpected(a.error());
  auto b = allow_term(new_set, senv);
  if (!b) return unexpected(b.error());
  EquivalenceQuery q;
  q.allowed_old = a->term;
  q.allowed_new = b->term;
  q.footprint = a->footprint;
  merge_footprint(q.footprint, b->footprint);
  TermPtr differ = term::not_(term::eq(a->term, b->term));
  if (!differ->is_false()) {
    q.assertions = wf_constraints(q.footprint, senv);
    q.assertions.push_back(differ);
  } else {
    q.assertions.push_back(differ);
  }
  return q;
}

namespace {

void collect_entities(const Value& v, std::vector<EntityRef>& out) {
  switch (v.kind()) {
    case Value::Kind::Entity: out.push_back(v.as_entity()); break;
    case Value::Kind::Set:
      for (const auto& x : v.as_set()) collect_entities(x, out);
      break;
    case Value::Kind::Record:
      for (const auto& [k, x] : v.as_record()) collect_entities(x, out);
      break;
    default: break;
  }
}

// Reconstruction stops here; models never need this many entities.
constexpr size_t kMaxEntities = 100000;

}  // namespace

Result<std::pair<Request, EntityStore>, std::string> reconstruct(const Interpretation& model, SymbolicEnv& senv,
                                                                 const std::vector<FootprintEntry>& footprint) {
  const Schema& schema = senv.schema();
  const RequestEnv& env = senv.env();
  auto value_of = [&](const TermPtr& t) -> Result<Value, std::string> {
    auto v = eval_term(t, model);
    if (!v) return unexpected(v.error().message);
    auto d = decode_value(*v, t->sort(), senv);
    if (!d) return unexpected(d.error().message);
    return std::move(*d);
  };

  Request req;
  auto p = value_of(senv.variable(Var::Principal));
  if (!p) return unexpected(p.error());
  auto r = value_of(senv.variable(Var::Resource));
  if (!r) return unexpected(r.error());
  auto ctx = value_of(senv.variable(Var::Context));
  if (!ctx) return unexpected(ctx.error());
  req.principal = p->as_entity();
  req.action = env.action;
  req.resource = r->as_entity();
  req.context = std::move(*ctx);

  // Footprint points are where the wf constraints hold, so only they keep
  // the model's ancestors.
  std::set<EntityRef> grounded;
  for (const auto& f : footprint) {
    auto v = eval_term(f.term, model);
    if (!v) return unexpected(v.error().message);
    if (!v->is_some()) continue;
    auto d = decode_value(v->elems[0], f.term->sort().element(), senv);
    if (!d) return unexpected(d.error().message);
    grounded.insert(d->as_entity());
  }

  std::map<EntityRef, EntityInput> inputs;
  std::deque<EntityRef> work(grounded.begin(), grounded.end());
  work.push_back(req.principal);
  work.push_back(req.resource);
  std::vector<EntityRef> found;
  collect_entities(req.context, found);
  work.insert(work.end(), found.begin(), found.end());

  while (!work.empty()) {
    EntityRef e = std::move(work.front());
    work.pop_front();
    if (inputs.count(e) || Schema::is_action_type(e.type)) continue;
    const EntityTypeDecl* decl = schema.entity_type(e.type);
    if (!decl) continue;
    if (inputs.size() >= kMaxEntities) return unexpected(std::string("model reaches too many entities"));
    EntityInput in;
    in.uid = e;
    TermPtr self = senv.entity(e);
    std::vector<EntityRef> reached;
    if (TermPtr attrs = senv.attrs_of(e.type, self)) {
      auto v = value_of(attrs);
      if (!v) return unexpected(v.error());
      in.attrs = std::move(*v);
      collect_entities(in.attrs, reached);
    }
    if (grounded.count(e)) {
      for (const auto& anc : decl->ancestor_types) {
        TermPtr set = senv.ancestors_of(e.type, anc, self);
        if (!set) continue;
        auto v = value_of(set);
        if (!v) return unexpected(v.error());
        for (const auto& x : v->as_set()) {
          in.parents.push_back(x.as_entity());
          reached.push_back(x.as_entity());
        }
      }
    }
    inputs.emplace(e, std::move(in));
    work.insert(work.end(), reached.begin(), reached.end());
  }

  std::vector<EntityInput> list;
  for (auto& [k, v] : inputs) list.push_back(std::move(v));
  auto store = EntityStore::build(std::move(list));
  if (!store) return unexpected("model hierarchy is not a DAG: " + store.error().message);
  return std::make_pair(std::move(req), store->with_actions(schema));
}

Result<EnvVerdict, AnalysisError> check_env(const PolicySet& old_set, const PolicySet& new_set,
                                            const Schema& schema, const RequestEnv& env,
                                            const smt::SolverConfig& solver) {
  SymbolicEnv senv(schema, env);
  auto q = equivalence_query(old_set, new_set, senv);
  if (!q) return unexpected(q.error());
  EnvVerdict verdict;
  verdict.env = env;
  if (q->assertions.size() == 1 && q->assertions[0]->is_false()) return verdict;

  auto script = smt::print_script(senv, q->assertions);
  if (!script) {
    return unexpected(AnalysisError{AnalysisError::Kind::SolverFailed, "internal sort error: " + script.error().message});
  }
  verdict.script = *script;
  auto out = smt::run_solver(solver, *script);
  if (!out) {
    auto kind = out.error().kind == smt::SolverError::Kind::SolverUnavailable ? AnalysisError::Kind::SolverUnavailable
                                                                              : AnalysisError::Kind::SolverFailed;
    std::string msg = out.error().message;
    if (!out.error().raw.empty()) msg += "\n" + out.error().raw;
    return unexpected(AnalysisError{kind, msg});
  }
  switch (out->kind) {
    case smt::SolverOutcome::Kind::Unsat: return verdict;
    case smt::SolverOutcome::Kind::Unknown:
      verdict.kind = EnvVerdict::Kind::Unknown;
      verdict.reason = out->reason;
      return verdict;
    case smt::SolverOutcome::Kind::Timeout: verdict.kind = EnvVerdict::Kind::Timeout; return verdict;
    case smt::SolverOutcome::Kind::Sat: break;
  }

  auto witness = reconstruct(*out->model, senv, q->footprint);
  if (!witness) {
    return unexpected(AnalysisError{AnalysisError::Kind::ReconstructionFailed,
                                    env.to_string() + ": " + witness.error()});
  }
  Counterexample cex{witness->first, witness->second, {}, {}};
  cex.decision_old = authorize(old_set, cex.store, cex.request);
  cex.decision_new = authorize(new_set, cex.store, cex.request);
  if (cex.decision_old.verdict == cex.decision_new.verdict) {
    return unexpected(AnalysisError{AnalysisError::Kind::ReconstructionFailed,
                                    env.to_string() + ": the reconstructed input gets the same decision from both sets"});
  }
  verdict.kind = EnvVerdict::Kind::Differs;
  verdict.counterexample = std::move(cex);
  return verdict;
}

Result<std::vector<EnvVerdict>, AnalysisError> analyze_equivalence(const PolicySet& old_set,
                                                                   const PolicySet& new_set, const Schema& schema,
                                                                   const AnalysisOptions& options) {
  std::vector<RequestEnv> envs = environments(schema);
  std::vector<std::optional<Result<EnvVerdict, AnalysisError>>> results(envs.size());
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  jobs = std::min<unsigned>(jobs, std::max<size_t>(envs.size(), 1));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i; (i = next++) < envs.size();) {
      results[i] = check_env(old_set, new_set, schema, envs[i], options.solver);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<EnvVerdict> out;
  for (auto& r : results) {
    if (!r->ok()) return unexpected(r->error());
    out.push_back(std::move(r->value()));
  }
  return out;
}

}  // namespace arbiter::symcc
