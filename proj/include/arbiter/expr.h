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
#include <utility>
#include <vector>

#include "arbiter/value.h"

namespace arbiter {

enum class Var { Principal, Action, Resource, Context };
enum class SlotId { Principal, Resource };

enum class BinaryOp { Add, Sub, Less, LessEq, Eq, In, Contains, ContainsAll, ContainsAny };

const char* var_name(Var v);
const char* slot_name(SlotId s);  // "?principal" / "?resource"
const char* binary_op_name(BinaryOp op);

// A `like` pattern: literal segments separated by `*` wildcards. Adjacent
// wildcards are collapsed and empty literal segments dropped, so equal
// patterns have equal element lists.
class Pattern {
 public:
  struct Elem {
    bool wildcard = false;
    std::string text;  // UTF-8; empty for wildcards
    bool operator==(const Elem&) const = default;
  };

  Pattern() = default;
  void push_literal(const std::string& s);
  void push_wildcard();

  const std::vector<Elem>& elems() const { return elems_; }
  bool matches(const std::string& subject) const;
  // Source form without the surrounding quotes; literal `*` is written `\*`.
  std::string to_source() const;

  bool operator==(const Pattern&) const = default;

 private:
  std::vector<Elem> elems_;
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. One struct for all kinds keeps construction and
// structural comparison uniform; accessors assert nothing, so callers switch
// on kind() first.
class Expr {
 public:
  enum class Kind {
    Lit, Var, Slot, Set, Record, GetAttr, HasAttr, And, Or, Not, Neg, Binary, Like, Is, MulConst, If
  };

  Kind kind() const { return kind_; }
  const Value& literal() const { return lit_; }
  Var var() const { return var_; }
  SlotId slot() const { return slot_; }
  BinaryOp op() const { return op_; }
  // Attribute name for GetAttr/HasAttr, entity type for Is.
  const std::string& name() const { return name_; }
  int64_t factor() const { return factor_; }
  const Pattern& pattern() const { return pattern_; }
  const std::vector<ExprPtr>& children() const { return children_; }
  const ExprPtr& child(size_t i) const { return children_[i]; }
  // Record literal keys, parallel to children().
  const std::vector<std::string>& keys() const { return keys_; }

  bool has_slots() const { return has_slots_; }
  // Height of the tree; leaves have depth 1.
  size_t depth() const { return depth_; }
  size_t hash() const { return hash_; }

  static ExprPtr lit(Value v);
  static ExprPtr boolean(bool b) { return lit(Value::boolean(b)); }
  static ExprPtr integer(int64_t i) { return lit(Value::integer(i)); }
  static ExprPtr string(std::string s) { return lit(Value::string(std::move(s))); }
  static ExprPtr entity(EntityRef r) { return lit(Value::entity(std::move(r))); }
  static ExprPtr variable(Var v);
  static ExprPtr slot_ref(SlotId s);
  static ExprPtr set(std::vector<ExprPtr> elems);
  static ExprPtr record(std::vector<std::pair<std::string, ExprPtr>> fields);
  static ExprPtr get_attr(ExprPtr e, std::string attr);
  static ExprPtr has_attr(ExprPtr e, std::string attr);
  static ExprPtr and_(ExprPtr a, ExprPtr b);
  static ExprPtr or_(ExprPtr a, ExprPtr b);
  static ExprPtr not_(ExprPtr e);
  static ExprPtr neg(ExprPtr e);
  static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
  static ExprPtr like(ExprPtr e, Pattern p);
  static ExprPtr is(ExprPtr e, std::string entity_type);
  static ExprPtr mul_const(int64_t factor, ExprPtr e);
  static ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr f);

  // Rebuilds this node with new children (same kind and payload).
  ExprPtr with_children(std::vector<ExprPtr> children) const;

 private:
  Expr() = default;
  static ExprPtr finish(Expr e);

  Kind kind_ = Kind::Lit;
  Value lit_;
  Var var_ = Var::Principal;
  SlotId slot_ = SlotId::Principal;
  BinaryOp op_ = BinaryOp::Eq;
  std::string name_;
  int64_t factor_ = 0;
  Pattern pattern_;
  std::vector<ExprPtr> children_;
  std::vector<std::string> keys_;
  bool has_slots_ = false;
  size_t depth_ = 1;
  size_t hash_ = 0;
};

bool expr_equal(const Expr& a, const Expr& b);
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) { return a == b || expr_equal(*a, *b); }

struct ExprPtrHash {
  size_t operator()(const ExprPtr& e) const noexcept { return e->hash(); }
};
struct ExprPtrEq {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const { return expr_equal(a, b); }
};

// Replaces every slot using `lookup`; slots it maps to nullptr are kept.
template <typename F>
ExprPtr substitute_slots(const ExprPtr& e, F&& lookup);

// Replaces every occurrence of variable `v` with `replacement`.
ExprPtr substitute_var(const ExprPtr& e, Var v, const ExprPtr& replacement);

template <typename F>
ExprPtr substitute_slots(const ExprPtr& e, F&& lookup) {
  if (!e->has_slots()) return e;
  if (e->kind() == Expr::Kind::Slot) {
    ExprPtr r = lookup(e->slot());
    return r ? r : e;
  }
  std::vector<ExprPtr> kids;
  kids.reserve(e->children().size());
  for (const auto& c : e->children()) kids.push_back(substitute_slots(c, lookup));
  return e->with_children(std::move(kids));
}

}  // namespace arbiter
