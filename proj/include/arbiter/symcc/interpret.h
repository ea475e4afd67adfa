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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arbiter/entities.h"
#include "arbiter/result.h"
#include "arbiter/symcc/encoder.h"
#include "arbiter/symcc/term.h"
#include "arbiter/types.h"
#include "arbiter/value.h"

namespace arbiter::symcc {

// A ground SMT value. Sets are kept sorted and duplicate-free; an Option is
// `none` when `elems` is empty and `some` of its single element otherwise;
// a datatype value is its constructor applied to `elems`.
struct SValue {
  enum class Kind { Bool, BitVec, String, Set, Option, Datatype };
  Kind kind = Kind::Bool;
  bool b = false;
  int64_t bv = 0;
  std::u32string str;
  std::string ctor;
  std::vector<SValue> elems;

  static SValue boolean(bool x);
  static SValue bitvec(int64_t x);
  static SValue string(std::u32string s);
  static SValue set(std::vector<SValue> elems);
  static SValue none();
  static SValue some(SValue v);
  static SValue datatype(std::string ctor, std::vector<SValue> fields);

  bool is_some() const { return kind == Kind::Option && !elems.empty(); }
  std::string to_string() const;

  std::strong_ordering operator<=>(const SValue& o) const;
  bool operator==(const SValue& o) const { return (*this <=> o) == 0; }
};

// Meaning of the uninterpreted symbols of a term.
class Interpretation {
 public:
  virtual ~Interpretation() = default;
  virtual SValue constant(const std::string& symbol, const Sort& sort) const = 0;
  virtual SValue apply(const std::string& fn, const SValue& arg, const Sort& result) const = 0;
};

struct EvalTermError {
  std::string message;
};

// Ground evaluation. Selecting from the wrong constructor or taking `val`
// of `none` has no defined value in SMT; both are reported as errors since
// compiled terms never need them.
Result<SValue, EvalTermError> eval_term(const TermPtr& t, const Interpretation& interp);

// Conversions between concrete values and their encodings under `senv`.
Result<SValue, EvalTermError> encode_value(const Value& v, const Type& type, SymbolicEnv& senv);
Result<Value, EvalTermError> decode_value(const SValue& v, const Sort& sort, const SymbolicEnv& senv);

// Decodes a compiled result: nullopt for `none`.
Result<std::optional<Value>, EvalTermError> decode_result(const SValue& v, const Sort& option_sort,
                                                          const SymbolicEnv& senv);

// The functions and constants induced by a concrete store and request.
// The store must conform to the schema; absent entities have no ancestors
// and report an error for their attributes.
class StoreInterpretation : public Interpretation {
 public:
  StoreInterpretation(SymbolicEnv& senv, const EntityStore& store, const Request& request)
      : senv_(senv), store_(store), request_(request) {}

  SValue constant(const std::string& symbol, const Sort& sort) const override;
  SValue apply(const std::string& fn, const SValue& arg, const Sort& result) const override;

 private:
  SymbolicEnv& senv_;
  const EntityStore& store_;
  const Request& request_;
};

}  // namespace arbiter::symcc
