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
#include <string_view>
#include <vector>

#include "arbiter/expr.h"
#include "arbiter/policy.h"
#include "arbiter/result.h"
#include "arbiter/schema.h"

namespace arbiter {

struct SourceSpan {
  size_t byte_start = 0;
  size_t byte_end = 0;
  int line = 1;
  int column = 1;
};

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

using Diagnostics = std::vector<ParseDiagnostic>;

// `file:line:col: severity: message`, then the offending source line and a
// caret under the span start.
std::string render_diagnostic(const ParseDiagnostic& d, std::string_view source,
                              std::string_view filename);
std::string render_diagnostics(const Diagnostics& ds, std::string_view source,
                               std::string_view filename);

// Policies and templates in document order. Ids come from `@id("...")` or
// default to `policy<N>` by position.
Result<std::vector<Policy>, Diagnostics> parse_policies(std::string_view text);
Result<ExprPtr, Diagnostics> parse_expression(std::string_view text);
Result<Schema, Diagnostics> parse_schema(std::string_view text);

std::string render_value(const Value& v);
std::string render_expr(const ExprPtr& e);
std::string render_policy(const Policy& p);
std::string render_policies(const std::vector<Policy>& ps);

// Whether `s` can be written as a bare identifier (not reserved).
bool is_plain_identifier(std::string_view s);

}  // namespace arbiter
