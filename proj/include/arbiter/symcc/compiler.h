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

#include <string>
#include <vector>

#include "arbiter/expr.h"
#include "arbiter/result.h"
#include "arbiter/symcc/encoder.h"
#include "arbiter/symcc/term.h"

namespace arbiter::symcc {

struct CompileError {
  enum class Kind { IllTyped, UnsupportedConstruct };
  Kind kind;
  std::string message;
};

// An entity-typed subexpression, compiled.
struct FootprintEntry {
  TermPtr term;  // Option-sorted
  std::string entity_type;
};

struct Compiled {
  TermPtr term;  // (Option T) where T encodes the expression's type
  std::vector<FootprintEntry> footprint;
};

// `expr` must have `action` replaced by the env's action (see specialize).
// It is typechecked first; branches the typechecker prunes are not compiled.
Result<Compiled, CompileError> compile(const ExprPtr& expr, SymbolicEnv& senv);

// Acyclicity and transitivity of the ancestor functions, instantiated at
// the footprint. Trivially true instances are dropped.
std::vector<TermPtr> wf_constraints(const std::vector<FootprintEntry>& footprint, SymbolicEnv& senv);

// Footprints merged without duplicates.
void merge_footprint(std::vector<FootprintEntry>& into, const std::vector<FootprintEntry>& from);

}  // namespace arbiter::symcc
