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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "arbiter/expr.h"

namespace arbiter::symcc {

// SMT sorts used by the encoding. Datatype sorts are identified by their
// (already printable) SMT symbol.
class Sort {
 public:
  enum class Kind { Bool, BitVec, String, Set, Option, Datatype };

  Sort() : kind_(Kind::Bool) {}
  static Sort boolean() { return Sort(Kind::Bool); }
  static Sort bitvec() { return Sort(Kind::BitVec); }
  static Sort string() { return Sort(Kind::String); }
  static Sort set_of(Sort elem);
  static Sort option_of(Sort elem);
  static Sort datatype(std::string symbol);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Sort& element() const { return *elem_; }
  bool is_option() const { return kind_ == Kind::Option; }

  std::string to_smtlib() const;
  bool operator==(const Sort& other) const;

 private:
  explicit Sort(Kind k) : kind_(k) {}
  Kind kind_;
  std::string name_;
  std::shared_ptr<const Sort> elem_;
};

enum class Op {
  Const,      // declared constant
  App,        // unary uninterpreted function application
  BoolLit,
  BvLit,
  StrLit,
  None,
  Some,
  Val,        // Option selector
  IsSome,     // Option tester
  Construct,  // datatype constructor
  Select,     // datatype field selector
  Not,
  And,
  Or,
  Implies,
  Eq,
  Ite,
  BvNeg,
  BvAdd,
  BvSub,
  BvMul,
  BvSlt,
  BvSle,
  BvNegO,
  BvSaddO,
  BvSsubO,
  BvSmulO,
  SetEmpty,
  SetSingleton,
  SetUnion,
  SetInter,
  SetMember,  // (set.member elem set)
  SetSubset,
  StrInRe,
};

class Term;
using TermPtr = std::shared_ptr<const Term>;

class Term {
 public:
  Op op() const { return op_; }
  const Sort& sort() const { return sort_; }
  // Symbol of a constant, function, constructor or selector.
  const std::string& name() const { return name_; }
  bool bool_value() const { return b_; }
  int64_t bv_value() const { return bv_; }
  const std::u32string& str_value() const { return str_; }
  const Pattern& pattern() const { return pattern_; }
  // Field position for Select.
  size_t index() const { return index_; }
  const std::vector<TermPtr>& children() const { return kids_; }
  const TermPtr& child(size_t i) const { return kids_[i]; }
  size_t hash() const { return hash_; }
  size_t size() const { return size_; }

  bool is_true() const { return op_ == Op::BoolLit && b_; }
  bool is_false() const { return op_ == Op::BoolLit && !b_; }

  static TermPtr make(Op op, Sort sort, std::vector<TermPtr> kids, std::string name = {}, bool b = false,
                      int64_t bv = 0, std::u32string str = {}, Pattern pattern = {}, size_t index = 0);

 private:
  Term() = default;
  Op op_ = Op::BoolLit;
  Sort sort_;
  std::string name_;
  bool b_ = false;
  int64_t bv_ = 0;
  std::u32string str_;
  Pattern pattern_;
  size_t index_ = 0;
  std::vector<TermPtr> kids_;
  size_t hash_ = 0;
  size_t size_ = 1;
};

bool term_equal(const TermPtr& a, const TermPtr& b);

struct TermPtrHash {
  size_t operator()(const TermPtr& t) const noexcept { return t->hash(); }
};
struct TermPtrEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return term_equal(a, b); }
};

// True for closed literal values (no constants, functions or selectors).
bool is_value(const TermPtr& t);

// Builders. They fold whatever is statically decided (literal guards,
// Option wrappers around known values, identical operands, literal
// arithmetic) so emitted scripts only carry what the solver must decide.
namespace term {

TermPtr constant(std::string name, Sort sort);
TermPtr app(std::string fn, Sort result, TermPtr arg);
TermPtr boolean(bool b);
TermPtr bv(int64_t v);
TermPtr str(std::u32string s);
TermPtr none(Sort elem);
TermPtr some(TermPtr t);
TermPtr val(TermPtr t);
TermPtr is_some(TermPtr t);
TermPtr construct(std::string ctor, Sort sort, std::vector<TermPtr> fields);
TermPtr select(std::string selector, size_t index, Sort field_sort, TermPtr t);
TermPtr not_(TermPtr t);
TermPtr and_(TermPtr a, TermPtr b);
TermPtr or_(TermPtr a, TermPtr b);
TermPtr implies(TermPtr a, TermPtr b);
TermPtr eq(TermPtr a, TermPtr b);
TermPtr ite(TermPtr c, TermPtr a, TermPtr b);
TermPtr bvneg(TermPtr a);
TermPtr bvadd(TermPtr a, TermPtr b);
TermPtr bvsub(TermPtr a, TermPtr b);
TermPtr bvmul(TermPtr a, TermPtr b);
TermPtr bvslt(TermPtr a, TermPtr b);
TermPtr bvsle(TermPtr a, TermPtr b);
TermPtr bvnego(TermPtr a);
TermPtr bvsaddo(TermPtr a, TermPtr b);
TermPtr bvssubo(TermPtr a, TermPtr b);
TermPtr bvsmulo(TermPtr a, TermPtr b);
TermPtr set_empty(Sort elem);
TermPtr set_singleton(TermPtr t);
TermPtr set_union(TermPtr a, TermPtr b);
TermPtr set_inter(TermPtr a, TermPtr b);
TermPtr set_member(TermPtr elem, TermPtr set);
TermPtr set_subset(TermPtr a, TermPtr b);
TermPtr str_in_re(TermPtr s, Pattern p);

// The value inside an Option term: `v` for `(some v)`, else `(val t)`.
TermPtr get(TermPtr t);
// `e2` when `e1` is some, none otherwise.
TermPtr if_ok(TermPtr e1, TermPtr e2);
// `(= (some true) t)`
TermPtr is_true(TermPtr t);

}  // namespace term

// SMT-LIB text. Large subterms that occur more than once are bound with
// `let` so that output size stays linear in the term DAG.
std::string to_smtlib(const TermPtr& t);

// SMT-LIB string literal with the surrounding quotes.
std::string smt_string_literal(const std::u32string& s);

}  // namespace arbiter::symcc
