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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arbiter/authorizer.h"
#include "arbiter/entities.h"
#include "arbiter/result.h"
#include "arbiter/schema.h"
#include "arbiter/smt/solver.h"
#include "arbiter/symcc/compiler.h"
#include "arbiter/symcc/encoder.h"
#include "arbiter/validator.h"

namespace arbiter::symcc {

struct Counterexample {
  Request request;
  EntityStore store;  // includes the schema's actions
  Decision decision_old;
  Decision decision_new;
};

struct EnvVerdict {
  enum class Kind { Equivalent, Differs, Unknown, Timeout };
  RequestEnv env;
  Kind kind = Kind::Equivalent;
  std::optional<Counterexample> counterexample;  // Differs only
  std::string reason;                            // Unknown only, as the solver said it
  std::string script;                            // empty when no solver call was needed
};

const char* verdict_name(EnvVerdict::Kind k);

struct AnalysisError {
  enum class Kind { IllTyped, SolverUnavailable, SolverFailed, ReconstructionFailed };
  Kind kind;
  std::string message;
};

const char* analysis_error_name(AnalysisError::Kind k);

// `allowed` for one policy set: some permit is true and no forbid is.
struct AllowTerm {
  TermPtr term;  // Bool
  std::vector<FootprintEntry> footprint;
};

Result<AllowTerm, AnalysisError> allow_term(const PolicySet& set, SymbolicEnv& senv);

// The assertions whose unsatisfiability means the two sets agree on every
// well-formed input of the env: wf constraints plus the negated equivalence.
struct EquivalenceQuery {
  TermPtr allowed_old;
  TermPtr allowed_new;
  std::vector<TermPtr> assertions;
  std::vector<FootprintEntry> footprint;
};

Result<EquivalenceQuery, AnalysisError> equivalence_query(const PolicySet& old_set, const PolicySet& new_set,
                                                          SymbolicEnv& senv);

struct AnalysisOptions {
  smt::SolverConfig solver;
  unsigned jobs = 0;  // 0: pick from the hardware
};

Result<EnvVerdict, AnalysisError> check_env(const PolicySet& old_set, const PolicySet& new_set,
                                            const Schema& schema, const RequestEnv& env,
                                            const smt::SolverConfig& solver);

// One verdict per request environment, in schema order.
Result<std::vector<EnvVerdict>, AnalysisError> analyze_equivalence(const PolicySet& old_set,
                                                                   const PolicySet& new_set, const Schema& schema,
                                                                   const AnalysisOptions& options);

// Builds a concrete request and store from a model: request variables from
// the constants; attributes for every entity reached; ancestors only for
// footprint entities, then closed transitively.
Result<std::pair<Request, EntityStore>, std::string> reconstruct(const Interpretation& model,
                                                                 SymbolicEnv& senv,
                                                                 const std::vector<FootprintEntry>& footprint);

}  // namespace arbiter::symcc
