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

#include "arbiter/authorizer.h"
#include "arbiter/evaluator.h"

namespace arbiter::testkit {

// Deliberately naive interpreter used as a differential oracle for the
// evaluator. Shares only the data types; error details and traces are left
// empty, so compare values and error kinds.
Result<Value, EvalError> reference_evaluate(const ExprPtr& expr, const EntityStore& store, const Request& request);

// Scope checks and conditions interpreted directly from the policy, without
// desugaring or slicing.
Decision reference_authorize(const PolicySet& set, const EntityStore& store, const Request& request);

}  // namespace arbiter::testkit
