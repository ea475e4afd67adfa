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

#include "arbiter/symcc/interpret.h"

#include <algorithm>
#include <unordered_map>

#include "arbiter/utf8.h"

namespace arbiter::symcc {

SValue SValue::boolean(bool x) {
  SValue v;
  v.kind = Kind::Bool;
  v.b = x;
  return v;
}

SValue SValue::bitvec(int64_t x) {
  SValue v;
  v.kind = Kind::BitVec;
  v.bv = x;
  return v;
}

SValue SValue::string(std::u32string s) {
  SValue v;
  v.kind = Kind::String;
  v.str = std::move(s);
  return v;
}

SValue SValue::set(std::vector<SValue> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  SValue v;
  v.kind = Kind::Set;
  v.elems = std::move(elems);
  return v;
}

SValue SValue::none() {
  SValue v;
  v.kind = Kind::Option;
  return v;
}

SValue SValue::some(SValue x) {
  SValue v;
  v.kind = Kind::Option;
  v.elems.push_back(std::move(x));
  return v;
}

SValue SValue::datatype(std::string ctor, std::vector<SValue> fields) {
  SValue v;
  v.kind = Kind::Datatype;
  v.ctor = std::move(ctor);
  v.elems = std::move(fields);
  return v;
}

std::strong_ordering SValue::operator<=>(const SValue& o) const {
  if (auto c = kind <=> o.kind; c != 0) return c;
  switch (kind) {
    case Kind::Bool: return b <=> o.b;
    case Kind::BitVec: return bv <=> o.bv;
    case Kind::String: return str <=> o.str;
    case Kind::Datatype:
      if (auto c = ctor <=> o.ctor; c != 0) return c;
      break;
    default: break;
  }
  return std::lexicographical_compare_three_way(elems.begin(), elems.end(), o.elems.begin(), o.elems.end());
}

std::string SValue::to_string() const {
  auto list = [&](std::string head) {
    for (const auto& e : elems) head += " " + e.to_string();
    return "(" + head + ")";
  };
  switch (kind) {
    case Kind::Bool: return b ? "true" : "false";
    case Kind::BitVec: return std::to_string(bv);
    case Kind::String: return smt_string_literal(str);
    case Kind::Set: return list("set");
    case Kind::Option: return elems.empty() ? "none" : list("some");
    case Kind::Datatype: return elems.empty() ? ctor : list(ctor);
  }
  return "?";
}

namespace {

// Glob match over code points: literal segments and `*` gaps.
bool glob(const std::vector<std::u32string>& segs, const std::vector<bool>& wild, const std::u32string& s) {
  // Classic two-pointer matcher with backtracking to the last star.
  std::u32string pat;
  std::vector<bool> star;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (wild[i]) {
      pat.push_back(0);
      star.push_back(true);
    } else {
      for (char32_t c : segs[i]) {
        pat.push_back(c);
        star.push_back(false);
      }
    }
  }
  size_t p = 0, i = 0, star_p = std::u32string::npos, star_i = 0;
  while (i < s.size()) {
    if (p < pat.size() && !star[p] && pat[p] == s[i]) {
      ++p;
      ++i;
    } else if (p < pat.size() && star[p]) {
      star_p = p++;
      star_i = i;
    } else if (star_p != std::u32string::npos) {
      p = star_p + 1;
      i = ++star_i;
    } else {
      return false;
    }
  }
  while (p < pat.size() && star[p]) ++p;
  return p == pat.size();
}

bool re_match(const Pattern& pattern, const std::u32string& s) {
  std::vector<std::u32string> segs;
  std::vector<bool> wild;
  for (const auto& e : pattern.elems()) {
    segs.push_back(e.wildcard ? std::u32string() : utf8_decode(e.text));
    wild.push_back(e.wildcard);
  }
  return glob(segs, wild, s);
}

std::vector<SValue> merge(const std::vector<SValue>& a, const std::vector<SValue>& b, bool keep_union) {
  std::vector<SValue> out;
  if (keep_union) {
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  } else {
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  }
  return out;
}

class TermEvaluator {
 public:
  explicit TermEvaluator(const Interpretation& interp) : interp_(interp) {}

  const SValue& eval(const TermPtr& t) {
    auto it = memo_.find(t.get());
    if (it != memo_.end()) return it->second;
    SValue v = compute(t);
    return memo_.emplace(t.get(), std::move(v)).first->second;
  }

 private:
  bool eval_bool(const TermPtr& t) { return eval(t).b; }
  int64_t eval_bv(const TermPtr& t) { return eval(t).bv; }

  SValue compute(const TermPtr& t) {
    const auto& k = t->children();
    switch (t->op()) {
      case Op::Const: return interp_.constant(t->name(), t->sort());
      case Op::App: return interp_.apply(t->name(), eval(k[0]), t->sort());
      case Op::BoolLit: return SValue::boolean(t->bool_value());
      case Op::BvLit: return SValue::bitvec(t->bv_value());
      case Op::StrLit: return SValue::string(t->str_value());
      case Op::None: return SValue::none();
      case Op::Some: return SValue::some(eval(k[0]));
      case Op::Val: {
        const SValue& o = eval(k[0]);
        if (!o.is_some()) throw EvalTermError{"val of none"};
        return o.elems[0];
      }
      case Op::IsSome: return SValue::boolean(eval(k[0]).is_some());
      case Op::Construct: {
        std::vector<SValue> fields;
        for (const auto& c : k) fields.push_back(eval(c));
        return SValue::datatype(t->name(), std::move(fields));
      }
      case Op::Select: {
        const SValue& d = eval(k[0]);
        if (d.kind != SValue::Kind::Datatype || t->index() >= d.elems.size()) {
          throw EvalTermError{"selector " + t->name() + " applied to " + d.to_string()};
        }
        return d.elems[t->index()];
      }
      case Op::Not: return SValue::boolean(!eval_bool(k[0]));
      case Op::And: return SValue::boolean(eval_bool(k[0]) && eval_bool(k[1]));
      case Op::Or: return SValue::boolean(eval_bool(k[0]) || eval_bool(k[1]));
      case Op::Implies: return SValue::boolean(!eval_bool(k[0]) || eval_bool(k[1]));
      case Op::Eq: return SValue::boolean(eval(k[0]) == eval(k[1]));
      case Op::Ite: return eval_bool(k[0]) ? eval(k[1]) : eval(k[2]);
      case Op::BvNeg: return SValue::bitvec(static_cast<int64_t>(0 - static_cast<uint64_t>(eval_bv(k[0]))));
      case Op::BvAdd:
        return SValue::bitvec(static_cast<int64_t>(static_cast<uint64_t>(eval_bv(k[0])) + static_cast<uint64_t>(eval_bv(k[1]))));
      case Op::BvSub:
        return SValue::bitvec(static_cast<int64_t>(static_cast<uint64_t>(eval_bv(k[0])) - static_cast<uint64_t>(eval_bv(k[1]))));
      case Op::BvMul:
        return SValue::bitvec(static_cast<int64_t>(static_cast<uint64_t>(eval_bv(k[0])) * static_cast<uint64_t>(eval_bv(k[1]))));
      case Op::BvSlt: return SValue::boolean(eval_bv(k[0]) < eval_bv(k[1]));
      case Op::BvSle: return SValue::boolean(eval_bv(k[0]) <= eval_bv(k[1]));
      case Op::BvNegO: return SValue::boolean(eval_bv(k[0]) == INT64_MIN);
      case Op::BvSaddO:
      case Op::BvSsubO:
      case Op::BvSmulO: {
        // Exact arithmetic in 128 bits, then a range check.
        __int128 x = eval_bv(k[0]), y = eval_bv(k[1]);
        __int128 r = t->op() == Op::BvSaddO ? x + y : t->op() == Op::BvSsubO ? x - y : x * y;
        return SValue::boolean(r < INT64_MIN || r > INT64_MAX);
      }
      case Op::SetEmpty: return SValue::set({});
      case Op::SetSingleton: return SValue::set({eval(k[0])});
      case Op::SetUnion: return SValue::set(merge(eval(k[0]).elems, eval(k[1]).elems, true));
      case Op::SetInter: return SValue::set(merge(eval(k[0]).elems, eval(k[1]).elems, false));
      case Op::SetMember: {
        const auto& s = eval(k[1]).elems;
        return SValue::boolean(std::binary_search(s.begin(), s.end(), eval(k[0])));
      }
      case Op::SetSubset: {
        const auto& a = eval(k[0]).elems;
        const auto& b = eval(k[1]).elems;
        return SValue::boolean(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
      case Op::StrInRe: return SValue::boolean(re_match(t->pattern(), eval(k[0]).str));
    }
    throw EvalTermError{"unknown term"};
  }

  const Interpretation& interp_;
  std::unordered_map<const Term*, SValue> memo_;
};

}  // namespace

Result<SValue, EvalTermError> eval_term(const TermPtr& t, const Interpretation& interp) {
  try {
    TermEvaluator ev(interp);
    return ev.eval(t);
  } catch (const EvalTermError& e) {
    return unexpected(e);
  }
}

Result<SValue, EvalTermError> encode_value(const Value& v, const Type& type, SymbolicEnv& senv) {
  auto mismatch = [&]() {
    return unexpected(EvalTermError{"value of kind " + std::string(kind_name(v.kind())) + " does not have type " +
                                    type.to_string()});
  };
  switch (type.kind()) {
    case Type::Kind::Bool:
    case Type::Kind::True:
    case Type::Kind::False:
      if (!v.is_bool()) return mismatch();
      return SValue::boolean(v.as_bool());
    case Type::Kind::Long:
      if (!v.is_long()) return mismatch();
      return SValue::bitvec(v.as_long());
    case Type::Kind::String:
      if (!v.is_string()) return mismatch();
      return SValue::string(utf8_decode(v.as_string()));
    case Type::Kind::Entity: {
      if (!v.is_entity() || v.as_entity().type != type.entity_name()) return mismatch();
      return SValue::datatype(senv.entity_sort(type.entity_name()).name(),
                              {SValue::string(utf8_decode(v.as_entity().id))});
    }
    case Type::Kind::Set: {
      if (!v.is_set()) return mismatch();
      std::vector<SValue> elems;
      for (const auto& x : v.as_set()) {
        auto e = encode_value(x, type.element(), senv);
        if (!e) return e;
        elems.push_back(std::move(*e));
      }
      return SValue::set(std::move(elems));
    }
    case Type::Kind::Record: {
      if (!v.is_record()) return mismatch();
      const auto& rec = v.as_record();
      for (const auto& [k, x] : rec) {
        if (!type.find_attribute(k)) return unexpected(EvalTermError{"undeclared attribute " + k});
      }
      std::string ctor = senv.record_decl(type).symbol;
      std::vector<SValue> fields;
      for (const auto& a : type.attributes()) {
        auto it = rec.find(a.name);
        if (it == rec.end()) {
          if (a.required) return unexpected(EvalTermError{"missing required attribute " + a.name});
          fields.push_back(SValue::none());
          continue;
        }
        auto e = encode_value(it->second, a.type, senv);
        if (!e) return e;
        fields.push_back(a.required ? std::move(*e) : SValue::some(std::move(*e)));
      }
      return SValue::datatype(ctor, std::move(fields));
    }
  }
  return mismatch();
}

Result<Value, EvalTermError> decode_value(const SValue& v, const Sort& sort, const SymbolicEnv& senv) {
  switch (sort.kind()) {
    case Sort::Kind::Bool: return Value::boolean(v.b);
    case Sort::Kind::BitVec: return Value::integer(v.bv);
    case Sort::Kind::String: return Value::string(utf8_encode(v.str));
    case Sort::Kind::Set: {
      std::vector<Value> elems;
      for (const auto& x : v.elems) {
        auto e = decode_value(x, sort.element(), senv);
        if (!e) return e;
        elems.push_back(std::move(*e));
      }
      return Value::set(std::move(elems));
    }
    case Sort::Kind::Option: return unexpected(EvalTermError{"bare Option value"});
    case Sort::Kind::Datatype: {
      const DatatypeDecl* d = senv.datatype(sort.name());
      if (!d || v.kind != SValue::Kind::Datatype || v.elems.size() != d->fields.size()) {
        return unexpected(EvalTermError{"cannot decode " + v.to_string() + " as " + sort.name()});
      }
      if (d->is_entity) return Value::entity(EntityRef{d->entity_type, utf8_encode(v.elems[0].str)});
      ValueRecord rec;
      for (size_t i = 0; i < d->fields.size(); ++i) {
        const FieldDecl& f = d->fields[i];
        const SValue* x = &v.elems[i];
        Sort s = f.sort;
        if (!f.required) {
          if (!x->is_some()) continue;
          x = &x->elems[0];
          s = s.element();
        }
        auto e = decode_value(*x, s, senv);
        if (!e) return e;
        rec.emplace(f.attr, std::move(*e));
      }
      return Value::record(std::move(rec));
    }
  }
  return unexpected(EvalTermError{"unknown sort"});
}

Result<std::optional<Value>, EvalTermError> decode_result(const SValue& v, const Sort& option_sort,
                                                          const SymbolicEnv& senv) {
  if (!v.is_some()) return std::optional<Value>();
  auto d = decode_value(v.elems[0], option_sort.element(), senv);
  if (!d) return unexpected(d.error());
  return std::optional<Value>(std::move(*d));
}

SValue StoreInterpretation::constant(const std::string& symbol, const Sort& sort) const {
  for (const auto& c : senv_.constants()) {
    if (c.symbol != symbol) continue;
    Result<SValue, EvalTermError> r = SValue();
    switch (c.var) {
      case Var::Principal: r = encode_value(Value::entity(request_.principal), Type::entity(request_.principal.type), senv_); break;
      case Var::Resource: r = encode_value(Value::entity(request_.resource), Type::entity(request_.resource.type), senv_); break;
      case Var::Context: r = encode_value(request_.context, senv_.env().context, senv_); break;
      case Var::Action: r = encode_value(Value::entity(request_.action), Type::entity(kActionType), senv_); break;
    }
    if (!r) throw r.error();
    return std::move(*r);
  }
  throw EvalTermError{"unknown constant " + symbol};
}

SValue StoreInterpretation::apply(const std::string& fn, const SValue& arg, const Sort& result) const {
  const FunDecl* f = senv_.function(fn);
  if (!f) throw EvalTermError{"unknown function " + fn};
  EntityRef who{f->entity_type, utf8_encode(arg.elems.at(0).str)};
  if (f->kind == FunDecl::Kind::Ancestors) {
    std::vector<SValue> out;
    for (const auto& a : store_.ancestors_of(who)) {
      if (a.type != f->ancestor_type) continue;
      out.push_back(SValue::datatype(result.element().name(), {SValue::string(utf8_decode(a.id))}));
    }
    return SValue::set(std::move(out));
  }
  const EntityData* d = store_.find(who);
  if (!d) throw EvalTermError{"no entity " + who.to_string()};
  auto r = encode_value(d->attrs, senv_.schema().entity_type(f->entity_type)->attributes, senv_);
  if (!r) throw r.error();
  return std::move(*r);
}

}  // namespace arbiter::symcc
