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

#include "arbiter/result.h"
#include "arbiter/smt/model.h"

namespace arbiter::smt {

struct SolverConfig {
  std::string executable;
  std::vector<std::string> args;
  int timeout_ms = 30000;
};

struct SolverOutcome {
  enum class Kind { Sat, Unsat, Unknown, Timeout };
  Kind kind = Kind::Unknown;
  std::optional<Model> model;  // Sat only
  std::string reason;          // Unknown only
};

const char* outcome_name(SolverOutcome::Kind k);

struct SolverError {
  enum class Kind { SolverUnavailable, ModelParseError, ProtocolError };
  Kind kind;
  std::string message;
  std::string raw;  // solver output, when there was any
};

// Runs one batch session: the script plus `(get-model)` on stdin, the
// responses read from stdout. The child is killed once the timeout passes
// and is reaped on every path.
Result<SolverOutcome, SolverError> run_solver(const SolverConfig& config, const std::string& script);

// Executable lookup: `explicit_path` if non-empty, then $SOLVER_BIN, then
// `cvc5` on $PATH, then the bundled shim. Empty if none exists.
std::string find_solver(const std::string& explicit_path = {});

// Config for `find_solver(explicit_path)` with the default timeout.
SolverConfig default_solver_config(const std::string& explicit_path = {});

}  // namespace arbiter::smt
