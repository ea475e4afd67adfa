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

#include "arbiter/symcc/term.h"

#include <cassert>
#include <cstdio>
#include <functional>
#include <unordered_map>

#include "arbiter/utf8.h"

namespace arbiter::symcc {

Sort Sort::set_of(Sort elem) {
  Sort s(Kind::Set);
  s.elem_ = std::make_shared<const Sort>(std::move(elem));
  return s;
}

Sort Sort::option_of(Sort elem) {
  Sort s(Kind::Option);
  s.elem_ = std::make_shared<const Sort>(std::move(elem));
  return s;
}

Sort Sort::datatype(std::string symbol) {
  Sort s(Kind::Datatype);
  s.name_ = std::move(symbol);
  return s;
}

std::string Sort::to_smtlib() const {
  switch (kind_) {
    case Kind::Bool: return "Bool";
    case Kind::BitVec: return "(_ BitVec 64)";
    case Kind::String: return "String";
    case Kind::Set: return "(Set " + elem_->to_smtlib() + ")";
    case Kind::Option: return "(Option " + elem_->to_smtlib() + ")";
    case Kind::Datatype: return name_;
  }
  return "?";
}

bool Sort::operator==(const Sort& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Set:
    case Kind::Option: return *elem_ == *other.elem_;
    case Kind::Datatype: return name_ == other.name_;
    default: return true;
  }
}

namespace {

size_t mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

}  // namespace

TermPtr Term::make(Op op, Sort sort, std::vector<TermPtr> kids, std::string name, bool b, int64_t bv,
                   std::u32string str, Pattern pattern, size_t index) {
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = op;
  t->sort_ = std::move(sort);
  t->name_ = std::move(name);
  t->b_ = b;
  t->bv_ = bv;
  t->str_ = std::move(str);
  t->pattern_ = std::move(pattern);
  t->index_ = index;
  t->kids_ = std::move(kids);
  size_t h = mix(static_cast<size_t>(op), std::hash<std::string>{}(t->sort_.to_smtlib()));
  h = mix(h, std::hash<std::string>{}(t->name_));
  h = mix(h, b);
  h = mix(h, static_cast<size_t>(bv));
  h = mix(h, std::hash<std::u32string>{}(t->str_));
  h = mix(h, index);
  for (const auto& e : t->pattern_.elems()) h = mix(h, std::hash<std::string>{}(e.text) + e.wildcard);
  for (const auto& k : t->kids_) {
    h = mix(h, k->hash_);
    t->size_ += k->size_;
  }
  t->hash_ = h;
  return t;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->hash() != b->hash() || a->op() != b->op() || a->children().size() != b->children().size()) return false;
  if (!(a->sort() == b->sort()) || a->name() != b->name() || a->bool_value() != b->bool_value() ||
      a->bv_value() != b->bv_value() || a->str_value() != b->str_value() || a->index() != b->index() ||
      !(a->pattern() == b->pattern())) {
    return false;
  }
  for (size_t i = 0; i < a->children().size(); ++i) {
    if (!term_equal(a->child(i), b->child(i))) return false;
  }
  return true;
}

bool is_value(const TermPtr& t) {
  switch (t->op()) {
    case Op::BoolLit:
    case Op::BvLit:
    case Op::StrLit:
    case Op::None:
    case Op::SetEmpty: return true;
    case Op::Some:
    case Op::Construct:
    case Op::SetSingleton:
    case Op::SetUnion:
      for (const auto& k : t->children()) {
        if (!is_value(k)) return false;
      }
      return true;
    default: return false;
  }
}

namespace {

bool contains_set(const TermPtr& t) {
  if (t->op() == Op::SetEmpty || t->op() == Op::SetSingleton || t->op() == Op::SetUnion) return true;
  for (const auto& k : t->children()) {
    if (contains_set(k)) return true;
  }
  return false;
}

TermPtr mk(Op op, Sort sort, std::vector<TermPtr> kids) { return Term::make(op, std::move(sort), std::move(kids)); }

bool add_overflows(int64_t a, int64_t b) {
  int64_t r;
  return __builtin_add_overflow(a, b, &r);
}
bool sub_overflows(int64_t a, int64_t b) {
  int64_t r;
  return __builtin_sub_overflow(a, b, &r);
}
bool mul_overflows(int64_t a, int64_t b) {
  int64_t r;
  return __builtin_mul_overflow(a, b, &r);
}

bool both_lit(const TermPtr& a, const TermPtr& b) { return a->op() == Op::BvLit && b->op() == Op::BvLit; }

}  // namespace

namespace term {

TermPtr constant(std::string name, Sort sort) { return Term::make(Op::Const, std::move(sort), {}, std::move(name)); }

TermPtr app(std::string fn, Sort result, TermPtr arg) {
  return Term::make(Op::App, std::move(result), {std::move(arg)}, std::move(fn));
}

TermPtr boolean(bool b) {
  static const TermPtr t = Term::make(Op::BoolLit, Sort::boolean(), {}, {}, true);
  static const TermPtr f = Term::make(Op::BoolLit, Sort::boolean(), {}, {}, false);
  return b ? t : f;
}

TermPtr bv(int64_t v) { return Term::make(Op::BvLit, Sort::bitvec(), {}, {}, false, v); }

TermPtr str(std::u32string s) { return Term::make(Op::StrLit, Sort::string(), {}, {}, false, 0, std::move(s)); }

TermPtr none(Sort elem) { return mk(Op::None, Sort::option_of(std::move(elem)), {}); }

TermPtr some(TermPtr t) {
  Sort s = Sort::option_of(t->sort());
  return mk(Op::Some, std::move(s), {std::move(t)});
}

TermPtr val(TermPtr t) {
  assert(t->sort().is_option());
  if (t->op() == Op::Some) return t->child(0);
  Sort s = t->sort().element();
  return mk(Op::Val, std::move(s), {std::move(t)});
}

TermPtr is_some(TermPtr t) {
  if (t->op() == Op::Some) return boolean(true);
  if (t->op() == Op::None) return boolean(false);
  return mk(Op::IsSome, Sort::boolean(), {std::move(t)});
}

TermPtr construct(std::string ctor, Sort sort, std::vector<TermPtr> fields) {
  return Term::make(Op::Construct, std::move(sort), std::move(fields), std::move(ctor));
}

TermPtr select(std::string selector, size_t index, Sort field_sort, TermPtr t) {
  if (t->op() == Op::Construct) return t->child(index);
  return Term::make(Op::Select, std::move(field_sort), {std::move(t)}, std::move(selector), false, 0, {}, {}, index);
}

TermPtr not_(TermPtr t) {
  if (t->op() == Op::BoolLit) return boolean(!t->bool_value());
  if (t->op() == Op::Not) return t->child(0);
  return mk(Op::Not, Sort::boolean(), {std::move(t)});
}

TermPtr and_(TermPtr a, TermPtr b) {
  if (a->is_true()) return b;
  if (b->is_true()) return a;
  if (a->is_false() || b->is_false()) return boolean(false);
  if (term_equal(a, b)) return a;
  return mk(Op::And, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr or_(TermPtr a, TermPtr b) {
  if (a->is_false()) return b;
  if (b->is_false()) return a;
  if (a->is_true() || b->is_true()) return boolean(true);
  if (term_equal(a, b)) return a;
  return mk(Op::Or, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr implies(TermPtr a, TermPtr b) {
  if (a->is_true()) return b;
  if (a->is_false() || b->is_true()) return boolean(true);
  return mk(Op::Implies, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr eq(TermPtr a, TermPtr b) {
  assert(a->sort() == b->sort());
  if (term_equal(a, b)) return boolean(true);
  if (a->op() == Op::Some && b->op() == Op::Some) return eq(a->child(0), b->child(0));
  if (a->op() == Op::BoolLit) return a->bool_value() ? b : not_(b);
  if (b->op() == Op::BoolLit) return b->bool_value() ? a : not_(a);
  if ((a->op() == Op::Some && b->op() == Op::None) || (a->op() == Op::None && b->op() == Op::Some)) {
    return boolean(false);
  }
  // Distinct literal values are distinct, except that set literals have
  // more than one spelling.
  if (is_value(a) && is_value(b) && !contains_set(a) && !contains_set(b)) return boolean(false);
  return mk(Op::Eq, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr ite(TermPtr c, TermPtr a, TermPtr b) {
  assert(a->sort() == b->sort());
  if (c->is_true()) return a;
  if (c->is_false()) return b;
  if (term_equal(a, b)) return a;
  if (a->is_true() && b->is_false()) return c;
  if (a->is_false() && b->is_true()) return not_(c);
  Sort s = a->sort();
  return mk(Op::Ite, std::move(s), {std::move(c), std::move(a), std::move(b)});
}

TermPtr bvneg(TermPtr a) {
  if (a->op() == Op::BvLit && a->bv_value() != INT64_MIN) return bv(-a->bv_value());
  return mk(Op::BvNeg, Sort::bitvec(), {std::move(a)});
}

TermPtr bvadd(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) {
    return bv(static_cast<int64_t>(static_cast<uint64_t>(a->bv_value()) + static_cast<uint64_t>(b->bv_value())));
  }
  return mk(Op::BvAdd, Sort::bitvec(), {std::move(a), std::move(b)});
}

TermPtr bvsub(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) {
    return bv(static_cast<int64_t>(static_cast<uint64_t>(a->bv_value()) - static_cast<uint64_t>(b->bv_value())));
  }
  return mk(Op::BvSub, Sort::bitvec(), {std::move(a), std::move(b)});
}

TermPtr bvmul(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) {
    return bv(static_cast<int64_t>(static_cast<uint64_t>(a->bv_value()) * static_cast<uint64_t>(b->bv_value())));
  }
  return mk(Op::BvMul, Sort::bitvec(), {std::move(a), std::move(b)});
}

TermPtr bvslt(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) return boolean(a->bv_value() < b->bv_value());
  return mk(Op::BvSlt, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr bvsle(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) return boolean(a->bv_value() <= b->bv_value());
  return mk(Op::BvSle, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr bvnego(TermPtr a) {
  if (a->op() == Op::BvLit) return boolean(a->bv_value() == INT64_MIN);
  return mk(Op::BvNegO, Sort::boolean(), {std::move(a)});
}

TermPtr bvsaddo(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) return boolean(add_overflows(a->bv_value(), b->bv_value()));
  return mk(Op::BvSaddO, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr bvssubo(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) return boolean(sub_overflows(a->bv_value(), b->bv_value()));
  return mk(Op::BvSsubO, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr bvsmulo(TermPtr a, TermPtr b) {
  if (both_lit(a, b)) return boolean(mul_overflows(a->bv_value(), b->bv_value()));
  return mk(Op::BvSmulO, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr set_empty(Sort elem) { return mk(Op::SetEmpty, Sort::set_of(std::move(elem)), {}); }

TermPtr set_singleton(TermPtr t) {
  Sort s = Sort::set_of(t->sort());
  return mk(Op::SetSingleton, std::move(s), {std::move(t)});
}

TermPtr set_union(TermPtr a, TermPtr b) {
  if (a->op() == Op::SetEmpty) return b;
  if (b->op() == Op::SetEmpty) return a;
  if (term_equal(a, b)) return a;
  Sort s = a->sort();
  return mk(Op::SetUnion, std::move(s), {std::move(a), std::move(b)});
}

TermPtr set_inter(TermPtr a, TermPtr b) {
  if (a->op() == Op::SetEmpty) return a;
  if (b->op() == Op::SetEmpty) return b;
  if (term_equal(a, b)) return a;
  Sort s = a->sort();
  return mk(Op::SetInter, std::move(s), {std::move(a), std::move(b)});
}

TermPtr set_member(TermPtr elem, TermPtr set) {
  if (set->op() == Op::SetEmpty) return boolean(false);
  if (set->op() == Op::SetSingleton) return eq(std::move(elem), set->child(0));
  if (is_value(elem) && !contains_set(elem) && is_value(set)) {
    std::vector<TermPtr> stack = {set};
    while (!stack.empty()) {
      TermPtr s = stack.back();
      stack.pop_back();
      if (s->op() == Op::SetUnion) {
        stack.push_back(s->child(0));
        stack.push_back(s->child(1));
      } else if (s->op() == Op::SetSingleton) {
        if (contains_set(s->child(0))) return mk(Op::SetMember, Sort::boolean(), {std::move(elem), std::move(set)});
        if (term_equal(s->child(0), elem)) return boolean(true);
      }
    }
    return boolean(false);
  }
  return mk(Op::SetMember, Sort::boolean(), {std::move(elem), std::move(set)});
}

TermPtr set_subset(TermPtr a, TermPtr b) {
  if (a->op() == Op::SetEmpty || term_equal(a, b)) return boolean(true);
  return mk(Op::SetSubset, Sort::boolean(), {std::move(a), std::move(b)});
}

TermPtr str_in_re(TermPtr s, Pattern p) {
  if (s->op() == Op::StrLit) return boolean(p.matches(utf8_encode(s->str_value())));
  return Term::make(Op::StrInRe, Sort::boolean(), {std::move(s)}, {}, false, 0, {}, std::move(p));
}

TermPtr get(TermPtr t) { return val(std::move(t)); }

TermPtr if_ok(TermPtr e1, TermPtr e2) {
  TermPtr b = is_some(std::move(e1));
  if (b->is_true()) return e2;
  TermPtr n = none(e2->sort().element());
  if (b->is_false()) return n;
  return ite(std::move(b), std::move(e2), std::move(n));
}

TermPtr is_true(TermPtr t) { return eq(some(boolean(true)), std::move(t)); }

}  // namespace term

std::string smt_string_literal(const std::u32string& s) {
  std::string out = "\"";
  for (char32_t c : s) {
    if (c == '"') {
      out += "\"\"";
    } else if (c >= 0x20 && c <= 0x7e && c != '\\') {
      out += static_cast<char>(c);
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "\\u{%x}", static_cast<unsigned>(c));
      out += buf;
    }
  }
  return out + "\"";
}

namespace {

std::string regex(const Pattern& p) {
  std::vector<std::string> parts;
  for (const auto& e : p.elems()) {
    parts.push_back(e.wildcard ? "re.all" : "(str.to_re " + smt_string_literal(utf8_decode(e.text)) + ")");
  }
  if (parts.empty()) return "(str.to_re \"\")";
  if (parts.size() == 1) return parts[0];
  std::string out = "(re.++";
  for (const auto& x : parts) out += " " + x;
  return out + ")";
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Eq: return "=";
    case Op::Ite: return "ite";
    case Op::BvNeg: return "bvneg";
    case Op::BvAdd: return "bvadd";
    case Op::BvSub: return "bvsub";
    case Op::BvMul: return "bvmul";
    case Op::BvSlt: return "bvslt";
    case Op::BvSle: return "bvsle";
    case Op::BvNegO: return "bvnego";
    case Op::BvSaddO: return "bvsaddo";
    case Op::BvSsubO: return "bvssubo";
    case Op::BvSmulO: return "bvsmulo";
    case Op::SetSingleton: return "set.singleton";
    case Op::SetUnion: return "set.union";
    case Op::SetInter: return "set.inter";
    case Op::SetMember: return "set.member";
    case Op::SetSubset: return "set.subset";
    case Op::Some: return "some";
    case Op::Val: return "val";
    case Op::IsSome: return "(_ is some)";
    default: return nullptr;
  }
}

// Shared subterms at least this big get a `let` name.
constexpr size_t kLetThreshold = 8;

class Printer {
 public:
  std::string print(const TermPtr& root) {
    count(root);
    std::vector<TermPtr> order;
    collect(root, order);
    std::string prefix, suffix;
    for (const auto& t : order) {
      std::string name = "_l" + std::to_string(names_.size());
      std::string body = render(t);
      names_.emplace(t, name);
      prefix += "(let ((" + name + " " + body + ")) ";
      suffix += ")";
    }
    return prefix + render(root) + suffix;
  }

 private:
  void count(const TermPtr& t) {
    if (++counts_[t] > 1) return;
    for (const auto& k : t->children()) count(k);
  }

  // Post-order list of subterms to bind.
  void collect(const TermPtr& t, std::vector<TermPtr>& out) {
    if (!visited_.emplace(t, true).second) return;
    for (const auto& k : t->children()) collect(k, out);
    if (counts_[t] > 1 && t->size() >= kLetThreshold) out.push_back(t);
  }

  std::string render(const TermPtr& t) {
    auto it = names_.find(t);
    if (it != names_.end()) return it->second;
    std::string out;
    auto args = [&](const char* head) {
      out = "(" + std::string(head);
      for (const auto& k : t->children()) out += " " + render(k);
      out += ")";
    };
    switch (t->op()) {
      case Op::Const: return t->name();
      case Op::App:
        out = "(" + t->name() + " " + render(t->child(0)) + ")";
        return out;
      case Op::BoolLit: return t->bool_value() ? "true" : "false";
      case Op::BvLit: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "#x%016llx", static_cast<unsigned long long>(t->bv_value()));
        return buf;
      }
      case Op::StrLit: return smt_string_literal(t->str_value());
      case Op::None: return "(as none " + t->sort().to_smtlib() + ")";
      case Op::SetEmpty: return "(as set.empty " + t->sort().to_smtlib() + ")";
      case Op::Construct:
        if (t->children().empty()) return t->name();
        args(t->name().c_str());
        return out;
      case Op::Select:
        out = "(" + t->name() + " " + render(t->child(0)) + ")";
        return out;
      case Op::StrInRe: return "(str.in_re " + render(t->child(0)) + " " + regex(t->pattern()) + ")";
      default: args(op_symbol(t->op())); return out;
    }
  }

  std::unordered_map<TermPtr, int, TermPtrHash, TermPtrEq> counts_;
  std::unordered_map<TermPtr, bool, TermPtrHash, TermPtrEq> visited_;
  std::unordered_map<TermPtr, std::string, TermPtrHash, TermPtrEq> names_;
};

}  // namespace

std::string to_smtlib(const TermPtr& t) { return Printer().print(t); }

}  // namespace arbiter::symcc
