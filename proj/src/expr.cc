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

#include "arbiter/expr.h"

#include <algorithm>
#include <functional>

#include "arbiter/utf8.h"

namespace arbiter {

const char* var_name(Var v) {
  switch (v) {
    case Var::Principal: return "principal";
    case Var::Action: return "action";
    case Var::Resource: return "resource";
    case Var::Context: return "context";
  }
  return "?";
}

const char* slot_name(SlotId s) { return s == SlotId::Principal ? "?principal" : "?resource"; }

const char* binary_op_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Less: return "<";
    case BinaryOp::LessEq: return "<=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::In: return "in";
    case BinaryOp::Contains: return "contains";
    case BinaryOp::ContainsAll: return "containsAll";
    case BinaryOp::ContainsAny: return "containsAny";
  }
  return "?";
}

void Pattern::push_literal(const std::string& s) {
  if (s.empty()) return;
  if (!elems_.empty() && !elems_.back().wildcard) {
    elems_.back().text += s;
  } else {
    elems_.push_back({false, s});
  }
}

void Pattern::push_wildcard() {
  if (!elems_.empty() && elems_.back().wildcard) return;
  elems_.push_back({true, {}});
}

bool Pattern::matches(const std::string& subject) const {
  // Flatten to code points; -1 marks a wildcard. Standard glob matching with
  // a single backtrack point.
  std::vector<int64_t> pat;
  for (const auto& e : elems_) {
    if (e.wildcard) {
      pat.push_back(-1);
    } else {
      for (char32_t c : utf8_decode(e.text)) pat.push_back(c);
    }
  }
  std::u32string s = utf8_decode(subject);
  size_t p = 0, i = 0, star = SIZE_MAX, mark = 0;
  while (i < s.size()) {
    if (p < pat.size() && pat[p] != -1 && static_cast<char32_t>(pat[p]) == s[i]) {
      ++p;
      ++i;
    } else if (p < pat.size() && pat[p] == -1) {
      star = p++;
      mark = i;
    } else if (star != SIZE_MAX) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == -1) ++p;
  return p == pat.size();
}

std::string Pattern::to_source() const {
  std::string out;
  for (const auto& e : elems_) {
    if (e.wildcard) {
      out += '*';
      continue;
    }
    for (char c : escape_string(e.text)) {
      if (c == '*') out += "\\*";
      else out += c;
    }
  }
  return out;
}

namespace {

size_t mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

size_t value_hash(const Value& v) {
  size_t h = static_cast<size_t>(v.kind());
  switch (v.kind()) {
    case Value::Kind::Bool: return mix(h, v.as_bool());
    case Value::Kind::Long: return mix(h, std::hash<int64_t>{}(v.as_long()));
    case Value::Kind::String: return mix(h, std::hash<std::string>{}(v.as_string()));
    case Value::Kind::Entity: return mix(h, EntityRefHash{}(v.as_entity()));
    case Value::Kind::Set:
      for (const auto& e : v.as_set()) h = mix(h, value_hash(e));
      return h;
    case Value::Kind::Record:
      for (const auto& [k, e] : v.as_record()) h = mix(mix(h, std::hash<std::string>{}(k)), value_hash(e));
      return h;
  }
  return h;
}

}  // namespace

ExprPtr Expr::finish(Expr e) {
  size_t h = mix(0, static_cast<size_t>(e.kind_));
  bool slots = e.kind_ == Kind::Slot;
  switch (e.kind_) {
    case Kind::Lit: h = mix(h, value_hash(e.lit_)); break;
    case Kind::Var: h = mix(h, static_cast<size_t>(e.var_)); break;
    case Kind::Slot: h = mix(h, static_cast<size_t>(e.slot_)); break;
    case Kind::Binary: h = mix(h, static_cast<size_t>(e.op_)); break;
    case Kind::GetAttr:
    case Kind::HasAttr:
    case Kind::Is: h = mix(h, std::hash<std::string>{}(e.name_)); break;
    case Kind::MulConst: h = mix(h, std::hash<int64_t>{}(e.factor_)); break;
    case Kind::Like:
      for (const auto& p : e.pattern_.elems()) h = mix(mix(h, p.wildcard), std::hash<std::string>{}(p.text));
      break;
    case Kind::Record:
      for (const auto& k : e.keys_) h = mix(h, std::hash<std::string>{}(k));
      break;
    default: break;
  }
  size_t depth = 0;
  for (const auto& c : e.children_) {
    h = mix(h, c->hash_);
    slots = slots || c->has_slots_;
    depth = std::max(depth, c->depth_);
  }
  e.depth_ = depth + 1;
  e.hash_ = h;
  e.has_slots_ = slots;
  return std::shared_ptr<const Expr>(new Expr(std::move(e)));
}

ExprPtr Expr::lit(Value v) {
  Expr e;
  e.kind_ = Kind::Lit;
  e.lit_ = std::move(v);
  return finish(std::move(e));
}

ExprPtr Expr::variable(Var v) {
  Expr e;
  e.kind_ = Kind::Var;
  e.var_ = v;
  return finish(std::move(e));
}

ExprPtr Expr::slot_ref(SlotId s) {
  Expr e;
  e.kind_ = Kind::Slot;
  e.slot_ = s;
  return finish(std::move(e));
}

ExprPtr Expr::set(std::vector<ExprPtr> elems) {
  Expr e;
  e.kind_ = Kind::Set;
  e.children_ = std::move(elems);
  return finish(std::move(e));
}

ExprPtr Expr::record(std::vector<std::pair<std::string, ExprPtr>> fields) {
  Expr e;
  e.kind_ = Kind::Record;
  for (auto& [k, v] : fields) {
    e.keys_.push_back(std::move(k));
    e.children_.push_back(std::move(v));
  }
  return finish(std::move(e));
}

ExprPtr Expr::get_attr(ExprPtr x, std::string attr) {
  Expr e;
  e.kind_ = Kind::GetAttr;
  e.name_ = std::move(attr);
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::has_attr(ExprPtr x, std::string attr) {
  Expr e;
  e.kind_ = Kind::HasAttr;
  e.name_ = std::move(attr);
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::and_(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind_ = Kind::And;
  e.children_ = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

ExprPtr Expr::or_(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind_ = Kind::Or;
  e.children_ = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

ExprPtr Expr::not_(ExprPtr x) {
  Expr e;
  e.kind_ = Kind::Not;
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::neg(ExprPtr x) {
  Expr e;
  e.kind_ = Kind::Neg;
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind_ = Kind::Binary;
  e.op_ = op;
  e.children_ = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

ExprPtr Expr::like(ExprPtr x, Pattern p) {
  Expr e;
  e.kind_ = Kind::Like;
  e.pattern_ = std::move(p);
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::is(ExprPtr x, std::string entity_type) {
  Expr e;
  e.kind_ = Kind::Is;
  e.name_ = std::move(entity_type);
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::mul_const(int64_t factor, ExprPtr x) {
  Expr e;
  e.kind_ = Kind::MulConst;
  e.factor_ = factor;
  e.children_ = {std::move(x)};
  return finish(std::move(e));
}

ExprPtr Expr::ite(ExprPtr c, ExprPtr t, ExprPtr f) {
  Expr e;
  e.kind_ = Kind::If;
  e.children_ = {std::move(c), std::move(t), std::move(f)};
  return finish(std::move(e));
}

ExprPtr Expr::with_children(std::vector<ExprPtr> children) const {
  Expr e = *this;
  e.children_ = std::move(children);
  return finish(std::move(e));
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Lit:
      if (!(a.literal() == b.literal())) return false;
      break;
    case Expr::Kind::Var:
      if (a.var() != b.var()) return false;
      break;
    case Expr::Kind::Slot:
      if (a.slot() != b.slot()) return false;
      break;
    case Expr::Kind::Binary:
      if (a.op() != b.op()) return false;
      break;
    case Expr::Kind::GetAttr:
    case Expr::Kind::HasAttr:
    case Expr::Kind::Is:
      if (a.name() != b.name()) return false;
      break;
    case Expr::Kind::MulConst:
      if (a.factor() != b.factor()) return false;
      break;
    case Expr::Kind::Like:
      if (!(a.pattern() == b.pattern())) return false;
      break;
    case Expr::Kind::Record:
      if (a.keys() != b.keys()) return false;
      break;
    default:
      break;
  }
  if (a.children().size() != b.children().size()) return false;
  for (size_t i = 0; i < a.children().size(); ++i) {
    if (!expr_equal(a.child(i), b.child(i))) return false;
  }
  return true;
}

ExprPtr substitute_var(const ExprPtr& e, Var v, const ExprPtr& replacement) {
  if (e->kind() == Expr::Kind::Var) return e->var() == v ? replacement : e;
  if (e->children().empty()) return e;
  std::vector<ExprPtr> kids;
  kids.reserve(e->children().size());
  bool changed = false;
  for (const auto& c : e->children()) {
    kids.push_back(substitute_var(c, v, replacement));
    changed = changed || kids.back() != c;
  }
  return changed ? e->with_children(std::move(kids)) : e;
}

}  // namespace arbiter
