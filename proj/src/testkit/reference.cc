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

#include "arbiter/testkit/reference.h"

#include <deque>

#include "arbiter/utf8.h"

namespace arbiter::testkit {

namespace {

struct Failure {
  EvalError::Kind kind;
};

[[noreturn]] void fail(EvalError::Kind k) { throw Failure{k}; }

bool glob(const std::u32string& s, size_t i, const std::vector<std::pair<bool, char32_t>>& pat, size_t p) {
  // Plain recursion; patterns and subjects in tests are short.
  if (p == pat.size()) return i == s.size();
  if (pat[p].first) {
    for (size_t k = i; k <= s.size(); ++k) {
      if (glob(s, k, pat, p + 1)) return true;
    }
    return false;
  }
  return i < s.size() && s[i] == pat[p].second && glob(s, i + 1, pat, p + 1);
}

bool like(const std::string& subject, const Pattern& pattern) {
  std::vector<std::pair<bool, char32_t>> pat;
  for (const auto& e : pattern.elems()) {
    if (e.wildcard) {
      pat.emplace_back(true, 0);
    } else {
      for (char32_t c : utf8_decode(e.text)) pat.emplace_back(false, c);
    }
  }
  return glob(utf8_decode(subject), 0, pat, 0);
}

int64_t checked(__int128 x) {
  if (x > INT64_MAX || x < INT64_MIN) fail(EvalError::Kind::ArithmeticOverflow);
  return static_cast<int64_t>(x);
}

class Ref {
 public:
  Ref(const EntityStore& store, const Request& req) : store_(store), req_(req) {}

  // Reachability over the stored ancestor sets, without assuming they are
  // already closed.
  bool descends(const EntityRef& a, const EntityRef& b) const {
    if (a == b) return true;
    std::set<EntityRef> seen{a};
    std::deque<EntityRef> todo{a};
    while (!todo.empty()) {
      EntityRef cur = todo.front();
      todo.pop_front();
      const EntityData* d = store_.find(cur);
      if (!d) continue;
      for (const auto& p : d->ancestors) {
        if (p == b) return true;
        if (seen.insert(p).second) todo.push_back(p);
      }
    }
    return false;
  }

  bool to_bool(const Value& v) const {
    if (!v.is_bool()) fail(EvalError::Kind::TypeMismatch);
    return v.as_bool();
  }
  int64_t to_long(const Value& v) const {
    if (!v.is_long()) fail(EvalError::Kind::TypeMismatch);
    return v.as_long();
  }
  const ValueSet& to_set(const Value& v) const {
    if (!v.is_set()) fail(EvalError::Kind::TypeMismatch);
    return v.as_set();
  }

  Value eval(const Expr& e) const {
    using K = Expr::Kind;
    switch (e.kind()) {
      case K::Lit: return e.literal();
      case K::Var:
        if (e.var() == Var::Principal) return Value::entity(req_.principal);
        if (e.var() == Var::Action) return Value::entity(req_.action);
        if (e.var() == Var::Resource) return Value::entity(req_.resource);
        return req_.context;
      case K::Slot: fail(EvalError::Kind::TypeMismatch);
      case K::Set: {
        std::vector<Value> out;
        for (const auto& c : e.children()) out.push_back(eval(*c));
        return Value::set(out);
      }
      case K::Record: {
        ValueRecord r;
        for (size_t i = 0; i < e.keys().size(); ++i) r[e.keys()[i]] = eval(*e.child(i));
        return Value::record(r);
      }
      case K::GetAttr:
      case K::HasAttr: {
        Value base = eval(*e.child(0));
        const ValueRecord* rec;
        if (base.is_record()) {
          rec = &base.as_record();
        } else if (base.is_entity()) {
          const EntityData* d = store_.find(base.as_entity());
          if (!d) {
            if (e.kind() == K::HasAttr) return Value::boolean(false);
            fail(EvalError::Kind::EntityNotFound);
          }
          rec = &d->attrs.as_record();
        } else {
          fail(EvalError::Kind::TypeMismatch);
        }
        auto it = rec->find(e.name());
        if (e.kind() == K::HasAttr) return Value::boolean(it != rec->end());
        if (it == rec->end()) fail(EvalError::Kind::AttrNotFound);
        return it->second;
      }
      case K::And:
        if (!to_bool(eval(*e.child(0)))) return Value::boolean(false);
        return Value::boolean(to_bool(eval(*e.child(1))));
      case K::Or:
        if (to_bool(eval(*e.child(0)))) return Value::boolean(true);
        return Value::boolean(to_bool(eval(*e.child(1))));
      case K::Not: return Value::boolean(!to_bool(eval(*e.child(0))));
      case K::Neg: return Value::integer(checked(-static_cast<__int128>(to_long(eval(*e.child(0))))));
      case K::MulConst:
        return Value::integer(checked(static_cast<__int128>(e.factor()) * to_long(eval(*e.child(0)))));
      case K::Like: {
        Value v = eval(*e.child(0));
        if (!v.is_string()) fail(EvalError::Kind::TypeMismatch);
        return Value::boolean(like(v.as_string(), e.pattern()));
      }
      case K::Is: {
        Value v = eval(*e.child(0));
        return Value::boolean(v.is_entity() && v.as_entity().type == e.name());
      }
      case K::If: return to_bool(eval(*e.child(0))) ? eval(*e.child(1)) : eval(*e.child(2));
      case K::Binary: return binary(e);
    }
    fail(EvalError::Kind::TypeMismatch);
  }

  Value binary(const Expr& e) const {
    Value a = eval(*e.child(0));
    Value b = eval(*e.child(1));
    switch (e.op()) {
      case BinaryOp::Eq: return Value::boolean(a == b);
      case BinaryOp::Add: {
        int64_t x = to_long(a);
        return Value::integer(checked(static_cast<__int128>(x) + to_long(b)));
      }
      case BinaryOp::Sub: {
        int64_t x = to_long(a);
        return Value::integer(checked(static_cast<__int128>(x) - to_long(b)));
      }
      case BinaryOp::Less: {
        int64_t x = to_long(a);
        return Value::boolean(x < to_long(b));
      }
      case BinaryOp::LessEq: {
        int64_t x = to_long(a);
        return Value::boolean(x <= to_long(b));
      }
      case BinaryOp::In: {
        if (!a.is_entity()) fail(EvalError::Kind::TypeMismatch);
        if (b.is_entity()) return Value::boolean(descends(a.as_entity(), b.as_entity()));
        bool found = false;
        for (const auto& x : to_set(b)) {
          if (!x.is_entity()) fail(EvalError::Kind::TypeMismatch);
          if (descends(a.as_entity(), x.as_entity())) found = true;
        }
        return Value::boolean(found);
      }
      case BinaryOp::Contains: {
        for (const auto& x : to_set(a)) {
          if (x == b) return Value::boolean(true);
        }
        return Value::boolean(false);
      }
      case BinaryOp::ContainsAll:
      case BinaryOp::ContainsAny: {
        const ValueSet& xs = to_set(a);
        const ValueSet& ys = to_set(b);
        size_t hits = 0;
        for (const auto& y : ys) {
          for (const auto& x : xs) {
            if (x == y) {
              ++hits;
              break;
            }
          }
        }
        return Value::boolean(e.op() == BinaryOp::ContainsAll ? hits == ys.size() : hits > 0);
      }
    }
    fail(EvalError::Kind::TypeMismatch);
  }

  bool scope(const ScopeConstraint& c, const EntityRef& x) const {
    if (c.kind == ScopeConstraint::Kind::Any) return true;
    const EntityRef* target = c.entity();
    if (!target) fail(EvalError::Kind::TypeMismatch);
    return c.kind == ScopeConstraint::Kind::Eq ? x == *target : descends(x, *target);
  }

  bool action(const ActionConstraint& c) const {
    switch (c.kind) {
      case ActionConstraint::Kind::Any: return true;
      case ActionConstraint::Kind::Eq: return req_.action == c.refs[0];
      default:
        for (const auto& r : c.refs) {
          if (descends(req_.action, r)) return true;
        }
        return false;
    }
  }

  bool satisfied(const Policy& p) const {
    if (!scope(p.principal, req_.principal) || !action(p.action) || !scope(p.resource, req_.resource)) return false;
    for (const auto& c : p.conditions) {
      if (to_bool(eval(*c.body)) != c.is_when) return false;
    }
    return true;
  }

 private:
  const EntityStore& store_;
  const Request& req_;
};

}  // namespace

Result<Value, EvalError> reference_evaluate(const ExprPtr& expr, const EntityStore& store, const Request& request) {
  try {
    return Ref(store, request).eval(*expr);
  } catch (const Failure& f) {
    return unexpected(EvalError{f.kind, {}, {}});
  }
}

Decision reference_authorize(const PolicySet& set, const EntityStore& store, const Request& request) {
  Ref ref(store, request);
  std::set<std::string> permits, forbids;
  Decision d;
  for (const auto& p : set.policies()) {
    try {
      if (ref.satisfied(p)) (p.effect == Effect::Permit ? permits : forbids).insert(p.id);
    } catch (const Failure& f) {
      d.errors.emplace_back(p.id, EvalError{f.kind, {}, {}});
    }
  }
  std::sort(d.errors.begin(), d.errors.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (!forbids.empty() || permits.empty()) {
    d.determining = forbids;
  } else {
    d.verdict = Decision::Verdict::Allow;
    d.determining = permits;
  }
  return d;
}

}  // namespace arbiter::testkit
