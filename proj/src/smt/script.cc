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

#include "arbiter/smt/script.h"

#include <unordered_set>

namespace arbiter::smt {

using symcc::Op;
using symcc::Sort;
using symcc::TermPtr;

namespace {

class SortChecker {
 public:
  explicit SortChecker(const symcc::SymbolicEnv& senv) : senv_(senv) {}

  void check(const TermPtr& t) {
    if (!seen_.insert(t.get()).second) return;
    for (const auto& k : t->children()) check(k);
    const auto& k = t->children();
    auto want = [&](bool ok, const char* what) {
      if (!ok) throw InternalSortError{std::string(what) + " in " + symcc::to_smtlib(t)};
    };
    auto arity = [&](size_t n) { want(k.size() == n, "wrong arity"); };
    auto is = [](const TermPtr& x, const Sort& s) { return x->sort() == s; };
    const Sort b = Sort::boolean(), bv = Sort::bitvec();
    switch (t->op()) {
      case Op::Const: {
        bool found = false;
        for (const auto& c : senv_.constants()) found = found || (c.symbol == t->name() && c.sort == t->sort());
        want(found, "undeclared constant");
        break;
      }
      case Op::App: {
        const symcc::FunDecl* f = senv_.function(t->name());
        arity(1);
        want(f && f->arg == k[0]->sort() && f->result == t->sort(), "bad application");
        break;
      }
      case Op::BoolLit: want(is(t, b), "bool literal"); break;
      case Op::BvLit: want(is(t, bv), "bv literal"); break;
      case Op::StrLit: want(is(t, Sort::string()), "string literal"); break;
      case Op::None: want(t->sort().is_option(), "none"); break;
      case Op::Some: arity(1); want(t->sort() == Sort::option_of(k[0]->sort()), "some"); break;
      case Op::Val: arity(1); want(k[0]->sort() == Sort::option_of(t->sort()), "val"); break;
      case Op::IsSome: arity(1); want(is(t, b) && k[0]->sort().is_option(), "is some"); break;
      case Op::Construct: {
        const symcc::DatatypeDecl* d = senv_.datatype(t->name());
        want(d && t->sort() == Sort::datatype(d->symbol) && d->fields.size() == k.size(), "constructor");
        for (size_t i = 0; i < k.size(); ++i) want(k[i]->sort() == d->fields[i].sort, "constructor field");
        break;
      }
      case Op::Select: {
        arity(1);
        const symcc::DatatypeDecl* d = senv_.datatype(k[0]->sort().name());
        want(d && t->index() < d->fields.size() && d->fields[t->index()].selector == t->name() &&
                 d->fields[t->index()].sort == t->sort(),
             "selector");
        break;
      }
      case Op::Not: arity(1); want(is(t, b) && is(k[0], b), "not"); break;
      case Op::And:
      case Op::Or:
      case Op::Implies: arity(2); want(is(t, b) && is(k[0], b) && is(k[1], b), "connective"); break;
      case Op::Eq: arity(2); want(is(t, b) && k[0]->sort() == k[1]->sort(), "equality"); break;
      case Op::Ite:
        arity(3);
        want(is(k[0], b) && k[1]->sort() == t->sort() && k[2]->sort() == t->sort(), "ite");
        break;
      case Op::BvNeg: arity(1); want(is(t, bv) && is(k[0], bv), "bvneg"); break;
      case Op::BvNegO: arity(1); want(is(t, b) && is(k[0], bv), "bvnego"); break;
      case Op::BvAdd:
      case Op::BvSub:
      case Op::BvMul: arity(2); want(is(t, bv) && is(k[0], bv) && is(k[1], bv), "bv op"); break;
      case Op::BvSlt:
      case Op::BvSle:
      case Op::BvSaddO:
      case Op::BvSsubO:
      case Op::BvSmulO: arity(2); want(is(t, b) && is(k[0], bv) && is(k[1], bv), "bv predicate"); break;
      case Op::SetEmpty: want(t->sort().kind() == Sort::Kind::Set, "empty set"); break;
      case Op::SetSingleton: arity(1); want(t->sort() == Sort::set_of(k[0]->sort()), "singleton"); break;
      case Op::SetUnion:
      case Op::SetInter:
        arity(2);
        want(t->sort().kind() == Sort::Kind::Set && k[0]->sort() == t->sort() && k[1]->sort() == t->sort(), "set op");
        break;
      case Op::SetMember:
        arity(2);
        want(is(t, b) && k[1]->sort() == Sort::set_of(k[0]->sort()), "member");
        break;
      case Op::SetSubset:
        arity(2);
        want(is(t, b) && k[0]->sort().kind() == Sort::Kind::Set && k[0]->sort() == k[1]->sort(), "subset");
        break;
      case Op::StrInRe: arity(1); want(is(t, b) && is(k[0], Sort::string()), "str.in_re"); break;
    }
  }

 private:
  const symcc::SymbolicEnv& senv_;
  std::unordered_set<const symcc::Term*> seen_;
};

}  // namespace

Result<bool, InternalSortError> sort_check(const TermPtr& t, const symcc::SymbolicEnv& senv) {
  try {
    SortChecker(senv).check(t);
    return true;
  } catch (const InternalSortError& e) {
    return unexpected(e);
  }
}

std::string print_declarations(const symcc::SymbolicEnv& senv) {
  std::string out = "(declare-datatype Option (par (T) ((none) (some (val T)))))\n";
  for (const auto& d : senv.datatypes()) {
    out += "(declare-datatype " + d.symbol + " ((" + d.symbol;
    for (const auto& f : d.fields) out += " (" + f.selector + " " + f.sort.to_smtlib() + ")";
    out += ")))\n";
  }
  for (const auto& f : senv.functions()) {
    out += "(declare-fun " + f.symbol + " (" + f.arg.to_smtlib() + ") " + f.result.to_smtlib() + ")\n";
  }
  for (const auto& c : senv.constants()) out += "(declare-const " + c.symbol + " " + c.sort.to_smtlib() + ")\n";
  return out;
}

Result<std::string, InternalSortError> print_script(const symcc::SymbolicEnv& senv,
                                                    const std::vector<TermPtr>& assertions) {
  std::string out = "(set-logic ALL)\n(set-option :produce-models true)\n";
  out += print_declarations(senv);
  for (const auto& a : assertions) {
    if (!(a->sort() == Sort::boolean())) return unexpected(InternalSortError{"assertion is not Bool"});
    auto ok = sort_check(a, senv);
    if (!ok) return unexpected(ok.error());
    out += "(assert " + symcc::to_smtlib(a) + ")\n";
  }
  out += "(check-sat)\n";
  return out;
}

}  // namespace arbiter::smt
