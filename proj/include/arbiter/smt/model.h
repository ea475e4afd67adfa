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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "arbiter/result.h"
#include "arbiter/symcc/interpret.h"

namespace arbiter::smt {

// S-expression as printed by the solver. String literals are decoded;
// `|quoted|` symbols keep their bars.
struct SExpr {
  enum class Kind { Symbol, String, List };
  Kind kind = Kind::Symbol;
  std::string text;  // Symbol
  std::u32string str;  // String
  std::vector<SExpr> items;  // List

  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  std::string to_string() const;
};

Result<std::vector<SExpr>, std::string> parse_sexprs(std::string_view text);

// Decodes an SMT-LIB string literal body (without the surrounding quotes).
std::u32string decode_smt_string(std::string_view body);

struct ModelParseError {
  std::string message;
  std::string raw;
};

// The `define-fun`s of a `(get-model)` response. Bodies are evaluated on
// demand; datatype values are recognized by constructor application.
class Model : public symcc::Interpretation {
 public:
  static Result<Model, ModelParseError> parse(std::string_view text);

  symcc::SValue constant(const std::string& symbol, const symcc::Sort& sort) const override;
  symcc::SValue apply(const std::string& fn, const symcc::SValue& arg, const symcc::Sort& result) const override;

  bool defines(const std::string& symbol) const;
  const std::string& raw() const { return raw_; }

 private:
  struct Definition {
    std::vector<std::string> params;
    SExpr body;
  };
  std::map<std::string, Definition> defs_;
  std::string raw_;
};

// Canonical form of a symbol: bars dropped.
std::string unquote_symbol(const std::string& s);

}  // namespace arbiter::smt
