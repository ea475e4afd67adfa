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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arbiter/schema.h"
#include "arbiter/symcc/term.h"
#include "arbiter/types.h"
#include "arbiter/validator.h"

namespace arbiter::symcc {

struct FieldDecl {
  std::string attr;      // source attribute name
  std::string selector;  // printable SMT symbol
  bool required = true;
  Type type;             // singleton-free attribute type
  Sort sort;             // Option-wrapped when optional
};

// An entity datatype has a single `eid` field; a record datatype has one
// field per attribute in name order.
struct DatatypeDecl {
  std::string symbol;  // sort symbol, also the constructor
  bool is_entity = false;
  std::string entity_type;  // entities only
  Type record_type;         // records only
  std::vector<FieldDecl> fields;
};

struct FunDecl {
  enum class Kind { Attrs, Ancestors };
  Kind kind;
  std::string symbol;
  std::string entity_type;
  std::string ancestor_type;  // Ancestors only
  Sort arg;
  Sort result;
};

struct ConstDecl {
  Var var;
  std::string symbol;
  Sort sort;
};

// Symbolic store and request for one request environment: datatypes for
// entity and record types, attribute and ancestor functions per entity type,
// and constants for the request variables. Record and Action datatypes are
// added on first use. Symbol choice is deterministic.
class SymbolicEnv {
 public:
  SymbolicEnv(const Schema& schema, const RequestEnv& env);

  const Schema& schema() const { return *schema_; }
  const RequestEnv& env() const { return env_; }

  // In dependency order.
  const std::vector<DatatypeDecl>& datatypes() const { return datatypes_; }
  const std::vector<FunDecl>& functions() const { return functions_; }
  const std::vector<ConstDecl>& constants() const { return constants_; }

  Sort sort_of(const Type& t);
  Sort entity_sort(const std::string& entity_type);

  TermPtr entity(const EntityRef& r);
  TermPtr variable(Var v);
  // nullptr when the entity type has no attributes.
  TermPtr attrs_of(const std::string& entity_type, const TermPtr& e);
  // nullptr unless `ancestor_type` is an allowed ancestor type.
  TermPtr ancestors_of(const std::string& entity_type, const std::string& ancestor_type, const TermPtr& e);
  // The attribute as stored: Option-sorted when optional.
  TermPtr field(const Type& record_type, const std::string& attr, const TermPtr& rec);
  TermPtr record(const Type& record_type, std::vector<TermPtr> fields);

  const DatatypeDecl* datatype(const std::string& symbol) const;
  const DatatypeDecl& record_decl(const Type& record_type);
  const FunDecl* function(const std::string& symbol) const;

 private:
  std::string fresh(const std::string& preferred);
  size_t declare_entity(const std::string& entity_type);
  size_t declare_record(const Type& record_type, const std::string& preferred);

  const Schema* schema_;
  RequestEnv env_;
  std::set<std::string> sort_symbols_;
  std::set<std::string> fun_symbols_;
  std::vector<DatatypeDecl> datatypes_;
  std::vector<FunDecl> functions_;
  std::vector<ConstDecl> constants_;
  std::map<std::string, size_t> entity_index_;
  std::vector<std::pair<Type, size_t>> record_index_;
  size_t anonymous_records_ = 0;
};

// Printable SMT-LIB symbol: bare when legal, `|quoted|` otherwise.
std::string smt_symbol(const std::string& s);

// Declarations for `schema` under `env`.
inline SymbolicEnv encode_types(const Schema& schema, const RequestEnv& env) { return SymbolicEnv(schema, env); }

}  // namespace arbiter::symcc
