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

#include "arbiter/result.h"
#include "arbiter/symcc/encoder.h"
#include "arbiter/symcc/term.h"

namespace arbiter::smt {

struct InternalSortError {
  std::string message;
};

// Checks that every node's sort agrees with its operator and children and
// that every symbol is declared in `senv`.
Result<bool, InternalSortError> sort_check(const symcc::TermPtr& t, const symcc::SymbolicEnv& senv);

// `(set-logic ALL)`, options, the Option datatype, the declarations of
// `senv`, one `assert` per term, then `(check-sat)`.
Result<std::string, InternalSortError> print_script(const symcc::SymbolicEnv& senv,
                                                    const std::vector<symcc::TermPtr>& assertions);

// Just the declaration lines.
std::string print_declarations(const symcc::SymbolicEnv& senv);

}  // namespace arbiter::smt
