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
#include <string_view>
#include <vector>

#include "arbiter/expr.h"
#include "arbiter/parser.h"

namespace arbiter::detail {

struct Token {
  enum class Kind { Ident, String, Int, Punct, End };
  Kind kind = Kind::End;
  // Identifier name, punctuation text, decimal digits, or the raw bytes
  // between the quotes of a string literal (escapes not yet processed).
  std::string text;
  SourceSpan span;

  bool is(std::string_view p) const { return kind == Kind::Punct && text == p; }
  bool is_ident(std::string_view w) const { return kind == Kind::Ident && text == w; }
};

// Tokenizes `src`; stops at the first lexical error, which is appended to
// `diags`. The returned vector always ends with an End token.
std::vector<Token> tokenize(std::string_view src, Diagnostics& diags);

// Processes escapes in a raw string literal. Returns an error message on a
// bad escape. When `pattern` is non-null, unescaped `*` become wildcards and
// `\*` is accepted as a literal star.
std::optional<std::string> decode_string(std::string_view raw, std::string* out, Pattern* pattern);

bool is_reserved(std::string_view word);

}  // namespace arbiter::detail
