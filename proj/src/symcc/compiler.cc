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

#include "arbiter/symcc/compiler.h"

#include <algorithm>

#include "arbiter/parser.h"
#include "arbiter/utf8.h"
#include "arbiter/validator.h"

namespace arbiter::symcc {

namespace {

using namespace term;

// The solver's string alphabet stops at U+2FFFF.
constexpr char32_t kMaxSolverCodePoint = 0x2FFFF;

class Compiler {
 public:
  Compiler(SymbolicEnv& senv, const TypeTable& table) : s_(senv), table_(table) {}

  TermPtr compile(const ExprPtr& e) {
    auto it = table_.find(e.get());
    if (it == table_.end()) throw CompileError{CompileError::Kind::IllTyped, "untyped node " + render_expr(e)};
    const Type& t = it->second;
    TermPtr r = dispatch(e, t);
    if (t.is_entity() && !Schema::is_action_type(t.entity_name())) {
      FootprintEntry f{r, t.entity_name()};
      merge_footprint(footprint_, {f});
    }
    return r;
  }

  std::vector<FootprintEntry> footprint_;

 private:
  const Type& type_of(const ExprPtr& e) const { return table_.at(e.get()); }

  TermPtr string_term(const std::string& s) {
    std::u32string u = utf8_decode(s);
    for (char32_t c : u) {
      if (c > kMaxSolverCodePoint) {
        throw CompileError{CompileError::Kind::UnsupportedConstruct, "code point beyond U+2FFFF in string literal"};
      }
    }
    return str(std::move(u));
  }

  TermPtr value_term(const Value& v, const Type& t) {
    switch (v.kind()) {
      case Value::Kind::Bool: return boolean(v.as_bool());
      case Value::Kind::Long: return bv(v.as_long());
      case Value::Kind::String: return string_term(v.as_string());
      case Value::Kind::Entity: {
        string_term(v.as_entity().id);
        return s_.entity(v.as_entity());
      }
      case Value::Kind::Set: {
        TermPtr acc = set_empty(s_.sort_of(t.element()));
        for (const auto& x : v.as_set()) acc = set_union(acc, set_singleton(value_term(x, t.element())));
        return acc;
      }
      case Value::Kind::Record: {
        std::vector<TermPtr> fields;
        for (const auto& a : t.attributes()) fields.push_back(value_term(v.as_record().at(a.name), a.type));
        return s_.record(t, std::move(fields));
      }
    }
    return boolean(false);
  }

  TermPtr arith(TermPtr overflow, TermPtr result) {
    return ite(std::move(overflow), none(Sort::bitvec()), some(std::move(result)));
  }

  // The attribute record of an entity or record value.
  std::pair<TermPtr, const Type*> record_of(const TermPtr& v, const Type& t) {
    if (t.is_record()) return {v, &t};
    const EntityTypeDecl* d = s_.schema().entity_type(t.entity_name());
    if (!d || d->attributes.attributes().empty()) return {nullptr, nullptr};
    return {s_.attrs_of(t.entity_name(), v), &d->attributes};
  }

  TermPtr dispatch(const ExprPtr& e, const Type& t) {
    using K = Expr::Kind;
    switch (e->kind()) {
      case K::Lit: return some(value_term(e->literal(), t));
      case K::Var: return some(s_.variable(e->var()));
      case K::Slot:
        throw CompileError{CompileError::Kind::UnsupportedConstruct, "template slots must be linked before analysis"};
      case K::Set: {
        std::vector<TermPtr> kids;
        for (const auto& c : e->children()) kids.push_back(compile(c));
        TermPtr acc = set_empty(s_.sort_of(t.element()));
        for (const auto& k : kids) acc = set_union(acc, set_singleton(get(k)));
        TermPtr out = some(acc);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) out = if_ok(*it, out);
        return out;
      }
      case K::Record: {
        // Children in source order; fields in attribute-name order.
        std::vector<TermPtr> kids;
        for (const auto& c : e->children()) kids.push_back(compile(c));
        std::vector<TermPtr> fields;
        for (const auto& a : t.attributes()) {
          size_t i = std::find(e->keys().begin(), e->keys().end(), a.name) - e->keys().begin();
          fields.push_back(get(kids[i]));
        }
        TermPtr out = some(s_.record(t, std::move(fields)));
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) out = if_ok(*it, out);
        return out;
      }
      case K::GetAttr:
      case K::HasAttr: {
        TermPtr c = compile(e->child(0));
        auto [rec, rt] = record_of(get(c), type_of(e->child(0)));
        const AttributeType* a = rt ? rt->find_attribute(e->name()) : nullptr;
        if (e->kind() == K::HasAttr) {
          if (!a) return if_ok(c, some(boolean(false)));
          if (a->required) return if_ok(c, some(boolean(true)));
          return if_ok(c, some(is_some(s_.field(*rt, e->name(), rec))));
        }
        if (!a) throw CompileError{CompileError::Kind::IllTyped, "missing attribute " + e->name()};
        TermPtr f = s_.field(*rt, e->name(), rec);
        return a->required ? if_ok(c, some(f)) : if_ok(c, f);
      }
      case K::And:
      case K::Or: {
        bool is_and = e->kind() == K::And;
        TermPtr a = compile(e->child(0));
        Type::Kind ta = type_of(e->child(0)).kind();
        if (ta == (is_and ? Type::Kind::False : Type::Kind::True)) return if_ok(a, some(boolean(!is_and)));
        TermPtr b = compile(e->child(1));
        if (ta == (is_and ? Type::Kind::True : Type::Kind::False)) return if_ok(a, b);
        TermPtr shortcut = some(boolean(!is_and));
        return if_ok(a, is_and ? ite(get(a), b, shortcut) : ite(get(a), shortcut, b));
      }
      case K::If: {
        TermPtr c = compile(e->child(0));
        Type::Kind tc = type_of(e->child(0)).kind();
        if (tc == Type::Kind::True) return if_ok(c, compile(e->child(1)));
        if (tc == Type::Kind::False) return if_ok(c, compile(e->child(2)));
        TermPtr x = compile(e->child(1));
        TermPtr y = compile(e->child(2));
        return if_ok(c, ite(get(c), x, y));
      }
      case K::Not: {
        TermPtr a = compile(e->child(0));
        return if_ok(a, some(not_(get(a))));
      }
      case K::Neg: {
        TermPtr a = compile(e->child(0));
        TermPtr v = get(a);
        return if_ok(a, arith(bvnego(v), bvneg(v)));
      }
      case K::MulConst: {
        TermPtr a = compile(e->child(0));
        TermPtr v = get(a);
        return if_ok(a, arith(bvsmulo(bv(e->factor()), v), bvmul(bv(e->factor()), v)));
      }
      case K::Like: {
        TermPtr a = compile(e->child(0));
        for (const auto& el : e->pattern().elems()) string_term(el.text);
        return if_ok(a, some(str_in_re(get(a), e->pattern())));
      }
      case K::Is: {
        TermPtr a = compile(e->child(0));
        return if_ok(a, some(boolean(type_of(e->child(0)).entity_name() == e->name())));
      }
      case K::Binary: {
        TermPtr a = compile(e->child(0));
        TermPtr b = compile(e->child(1));
        return if_ok(a, if_ok(b, binary(e, get(a), get(b))));
      }
    }
    throw CompileError{CompileError::Kind::UnsupportedConstruct, "unknown expression kind"};
  }

  // Result for operands that did not error.
  TermPtr binary(const ExprPtr& e, const TermPtr& x, const TermPtr& y) {
    switch (e->op()) {
      case BinaryOp::Add: return arith(bvsaddo(x, y), bvadd(x, y));
      case BinaryOp::Sub: return arith(bvssubo(x, y), bvsub(x, y));
      case BinaryOp::Less: return some(bvslt(x, y));
      case BinaryOp::LessEq: return some(bvsle(x, y));
      case BinaryOp::Eq:
        if (!(x->sort() == y->sort())) return some(boolean(false));
        return some(eq(x, y));
      case BinaryOp::In: return some(in(type_of(e->child(0)), type_of(e->child(1)), x, y));
      case BinaryOp::Contains: return some(set_member(y, x));
      case BinaryOp::ContainsAll: return some(set_subset(y, x));
      case BinaryOp::ContainsAny: return some(not_(eq(set_inter(x, y), set_empty(x->sort().element()))));
    }
    throw CompileError{CompileError::Kind::UnsupportedConstruct, "unknown operator"};
  }

  static std::optional<EntityRef> action_value(const TermPtr& t) {
    if (t->op() != Op::Construct || t->children().size() != 1 || t->child(0)->op() != Op::StrLit) return std::nullopt;
    return EntityRef{kActionType, utf8_encode(t->child(0)->str_value())};
  }

  // Elements of a literal set, or nullopt.
  static bool literal_elems(const TermPtr& t, std::vector<TermPtr>& out) {
    switch (t->op()) {
      case Op::SetEmpty: return true;
      case Op::SetSingleton: out.push_back(t->child(0)); return true;
      case Op::SetUnion: return literal_elems(t->child(0), out) && literal_elems(t->child(1), out);
      default: return false;
    }
  }

  TermPtr in(const Type& t1, const Type& t2, const TermPtr& x, const TermPtr& y) {
    bool rhs_set = t2.is_set();
    const std::string& e1 = t1.entity_name();
    const std::string& e2 = rhs_set ? t2.element().entity_name() : t2.entity_name();
    if (Schema::is_action_type(e1)) {
      if (!Schema::is_action_type(e2)) return boolean(false);
      return action_in(x, y, rhs_set);
    }
    TermPtr b1 = boolean(false);
    if (e1 == e2) b1 = rhs_set ? set_member(x, y) : eq(x, y);
    TermPtr b2 = boolean(false);
    const EntityTypeDecl* d = s_.schema().entity_type(e1);
    TermPtr anc = d && d->ancestor_types.count(e2) ? s_.ancestors_of(e1, e2, x) : nullptr;
    if (anc) {
      b2 = rhs_set ? not_(eq(set_inter(y, anc), set_empty(y->sort().element()))) : set_member(y, anc);
    }
    return or_(b1, b2);
  }

  // Action groups are fixed by the schema, so membership is a finite
  // disjunction; literal operands fold completely.
  TermPtr action_in(const TermPtr& x, const TermPtr& y, bool rhs_set) {
    const Schema& schema = s_.schema();
    auto a = action_value(x);
    std::vector<TermPtr> elems;
    if (!rhs_set) elems.push_back(y);
    if (a && (rhs_set ? literal_elems(y, elems) : true)) {
      bool all_literal = true;
      bool found = false;
      for (const auto& el : elems) {
        auto g = action_value(el);
        if (!g) all_literal = false;
        else if (schema.action_in(*a, *g)) found = true;
      }
      if (all_literal) return boolean(found);
    }
    TermPtr out = rhs_set ? set_member(x, y) : eq(x, y);
    for (const auto& [child, decl] : schema.actions) {
      for (const auto& g : decl.ancestors) {
        TermPtr gt = s_.entity(g);
        out = or_(out, and_(eq(x, s_.entity(child)), rhs_set ? set_member(gt, y) : eq(y, gt)));
      }
    }
    return out;
  }

  SymbolicEnv& s_;
  const TypeTable& table_;
};

}  // namespace

void merge_footprint(std::vector<FootprintEntry>& into, const std::vector<FootprintEntry>& from) {
  for (const auto& f : from) {
    bool dup = std::any_of(into.begin(), into.end(), [&](const FootprintEntry& g) {
      return g.entity_type == f.entity_type && term_equal(g.term, f.term);
    });
    if (!dup) into.push_back(f);
  }
}

Result<Compiled, CompileError> compile(const ExprPtr& expr, SymbolicEnv& senv) {
  TypeTable table;
  auto typed = typecheck(expr, senv.env(), senv.schema(), Capability::empty(), &table);
  if (!typed) {
    return unexpected(CompileError{CompileError::Kind::IllTyped,
                                   std::string(type_error_name(typed.error().kind)) + ": " + typed.error().detail});
  }
  try {
    Compiler c(senv, table);
    TermPtr t = c.compile(expr);
    return Compiled{t, std::move(c.footprint_)};
  } catch (const CompileError& e) {
    return unexpected(e);
  }
}

std::vector<TermPtr> wf_constraints(const std::vector<FootprintEntry>& footprint, SymbolicEnv& senv) {
  const Schema& schema = senv.schema();
  auto parents = [&](const std::string& t) -> const std::set<std::string>& {
    static const std::set<std::string> kNone;
    const EntityTypeDecl* d = schema.entity_type(t);
    return d ? d->ancestor_types : kNone;
  };
  std::vector<TermPtr> out;
  auto emit = [&](TermPtr t) {
    if (t->is_true()) return;
    for (const auto& o : out) {
      if (term_equal(o, t)) return;
    }
    out.push_back(std::move(t));
  };
  for (const auto& f : footprint) {
    if (!parents(f.entity_type).count(f.entity_type)) continue;
    TermPtr v = term::get(f.term);
    TermPtr anc = senv.ancestors_of(f.entity_type, f.entity_type, v);
    if (!anc) continue;
    emit(term::implies(term::is_some(f.term), term::not_(term::set_member(v, anc))));
  }
  for (const auto& f1 : footprint) {
    const auto& p1 = parents(f1.entity_type);
    for (const auto& f2 : footprint) {
      if (!p1.count(f2.entity_type)) continue;
      const auto& p2 = parents(f2.entity_type);
      TermPtr v1 = term::get(f1.term);
      TermPtr v2 = term::get(f2.term);
      TermPtr b = term::and_(term::is_some(f1.term), term::is_some(f2.term));
      for (const auto& e3 : p1) {
        if (!p2.count(e3)) continue;
        TermPtr a12 = senv.ancestors_of(f1.entity_type, f2.entity_type, v1);
        TermPtr a23 = senv.ancestors_of(f2.entity_type, e3, v2);
        TermPtr a13 = senv.ancestors_of(f1.entity_type, e3, v1);
        if (!a12 || !a23 || !a13) continue;
        emit(term::implies(term::and_(b, term::set_member(v2, a12)), term::set_subset(a23, a13)));
      }
    }
  }
  return out;
}

}  // namespace arbiter::symcc
