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

#include "arbiter/entities.h"
#include "arbiter/expr.h"
#include "arbiter/policy.h"
#include "arbiter/result.h"

namespace arbiter {

struct EvalError {
  enum class Kind { EntityNotFound, AttrNotFound, TypeMismatch, ArithmeticOverflow };
  Kind kind;
  std::string detail;
  std::string trace;  // rendered source of the failing subexpression
};

const char* eval_error_name(EvalError::Kind k);

// Call-by-value, left to right. `&&`, `||` and `if` short-circuit.
Result<Value, EvalError> evaluate(const ExprPtr& expr, const EntityStore& store, const Request& request);

struct PolicyOutcome {
  enum class Kind { Satisfied, NotSatisfied, Errored };
  Kind kind;
  EvalError error{EvalError::Kind::TypeMismatch, {}, {}};  // meaningful when Errored
};

PolicyOutcome evaluate_policy(const Policy& policy, const EntityStore& store, const Request& request);
// Same, for a policy already desugared with toexp.
PolicyOutcome evaluate_condition(const ExprPtr& desugared, const EntityStore& store, const Request& request);

}  // namespace arbiter
