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

#include "arbiter/evaluator.h"

#include "arbiter/parser.h"

namespace arbiter {

const char* eval_error_name(EvalError::Kind k) {
  switch (k) {
    case EvalError::Kind::EntityNotFound: return "EntityNotFound";
    case EvalError::Kind::AttrNotFound: return "AttrNotFound";
    case EvalError::Kind::TypeMismatch: return "TypeMismatch";
    case EvalError::Kind::ArithmeticOverflow: return "ArithmeticOverflow";
  }
  return "?";
}

namespace {

using Out = Result<Value, EvalError>;

class Evaluator {
 public:
  Evaluator(const EntityStore& store, const Request& req) : store_(store), req_(req) {}

  Out eval(const ExprPtr& e) {
    switch (e->kind()) {
      case Expr::Kind::Lit: return e->literal();
      case Expr::Kind::Var:
        switch (e->var()) {
          case Var::Principal: return Value::entity(req_.principal);
          case Var::Action: return Value::entity(req_.action);
          case Var::Resource: return Value::entity(req_.resource);
          case Var::Context: return req_.context;
        }
        break;
      case Expr::Kind::Slot: return fail(e, EvalError::Kind::TypeMismatch, "unlinked template slot");
      case Expr::Kind::Set: {
        std::vector<Value> elems;
        elems.reserve(e->children().size());
        for (const auto& c : e->children()) {
          auto v = eval(c);
          if (!v) return v;
          elems.push_back(std::move(*v));
        }
        return Value::set(std::move(elems));
      }
      case Expr::Kind::Record: {
        ValueRecord r;
        for (size_t i = 0; i < e->children().size(); ++i) {
          auto v = eval(e->child(i));
          if (!v) return v;
          r[e->keys()[i]] = std::move(*v);
        }
        return Value::record(std::move(r));
      }
      case Expr::Kind::GetAttr: return get_attr(e);
      case Expr::Kind::HasAttr: return has_attr(e);
      case Expr::Kind::And:
      case Expr::Kind::Or: {
        bool is_and = e->kind() == Expr::Kind::And;
        auto a = eval_bool(e->child(0));
        if (!a) return a;
        if (a->as_bool() != is_and) return *a;
        return eval_bool(e->child(1));
      }
      case Expr::Kind::Not: {
        auto a = eval_bool(e->child(0));
        if (!a) return a;
        return Value::boolean(!a->as_bool());
      }
      case Expr::Kind::Neg: {
        auto a = eval_long(e->child(0));
        if (!a) return a;
        if (a->as_long() == INT64_MIN) return fail(e, EvalError::Kind::ArithmeticOverflow, "negation overflows");
        return Value::integer(-a->as_long());
      }
      case Expr::Kind::MulConst: {
        auto a = eval_long(e->child(0));
        if (!a) return a;
        int64_t r;
        if (__builtin_mul_overflow(e->factor(), a->as_long(), &r)) {
          return fail(e, EvalError::Kind::ArithmeticOverflow, "multiplication overflows");
        }
        return Value::integer(r);
      }
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::Like: {
        auto a = eval(e->child(0));
        if (!a) return a;
        if (!a->is_string()) return mismatch(e, "string", *a);
        return Value::boolean(e->pattern().matches(a->as_string()));
      }
      case Expr::Kind::Is: {
        auto a = eval(e->child(0));
        if (!a) return a;
        return Value::boolean(a->is_entity() && a->as_entity().type == e->name());
      }
      case Expr::Kind::If: {
        auto c = eval_bool(e->child(0));
        if (!c) return c;
        return eval(e->child(c->as_bool() ? 1 : 2));
      }
    }
    return fail(e, EvalError::Kind::TypeMismatch, "unreachable");
  }

 private:
  Out fail(const ExprPtr& e, EvalError::Kind k, std::string detail) {
    return unexpected(EvalError{k, std::move(detail), render_expr(e)});
  }
  Out mismatch(const ExprPtr& e, const char* wanted, const Value& got) {
    return fail(e, EvalError::Kind::TypeMismatch,
                std::string("expected ") + wanted + ", got " + kind_name(got.kind()));
  }

  Out eval_bool(const ExprPtr& e) {
    auto v = eval(e);
    if (v && !v->is_bool()) return mismatch(e, "bool", *v);
    return v;
  }
  Out eval_long(const ExprPtr& e) {
    auto v = eval(e);
    if (v && !v->is_long()) return mismatch(e, "long", *v);
    return v;
  }

  Out get_attr(const ExprPtr& e) {
    auto a = eval(e->child(0));
    if (!a) return a;
    const ValueRecord* rec = nullptr;
    if (a->is_entity()) {
      const EntityData* d = store_.find(a->as_entity());
      if (!d) return fail(e, EvalError::Kind::EntityNotFound, "entity " + a->as_entity().to_string() + " does not exist");
      rec = &d->attrs.as_record();
    } else if (a->is_record()) {
      rec = &a->as_record();
    } else {
      return mismatch(e, "entity or record", *a);
    }
    auto it = rec->find(e->name());
    if (it == rec->end()) return fail(e, EvalError::Kind::AttrNotFound, "no attribute \"" + e->name() + "\"");
    return it->second;
  }

  Out has_attr(const ExprPtr& e) {
    auto a = eval(e->child(0));
    if (!a) return a;
    if (a->is_entity()) {
      const EntityData* d = store_.find(a->as_entity());
      return Value::boolean(d && d->attrs.as_record().count(e->name()));
    }
    if (a->is_record()) return Value::boolean(a->as_record().count(e->name()) > 0);
    return mismatch(e, "entity or record", *a);
  }

  bool entity_in(const EntityRef& a, const EntityRef& b) {
    return a == b || store_.ancestors_of(a).count(b) > 0;
  }

  Out binary(const ExprPtr& e) {
    auto a = eval(e->child(0));
    if (!a) return a;
    auto b = eval(e->child(1));
    if (!b) return b;
    switch (e->op()) {
      case BinaryOp::Eq: return Value::boolean(*a == *b);
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Less:
      case BinaryOp::LessEq: {
        if (!a->is_long()) return mismatch(e->child(0), "long", *a);
        if (!b->is_long()) return mismatch(e->child(1), "long", *b);
        int64_t x = a->as_long(), y = b->as_long(), r;
        if (e->op() == BinaryOp::Less) return Value::boolean(x < y);
        if (e->op() == BinaryOp::LessEq) return Value::boolean(x <= y);
        bool over = e->op() == BinaryOp::Add ? __builtin_add_overflow(x, y, &r) : __builtin_sub_overflow(x, y, &r);
        if (over) return fail(e, EvalError::Kind::ArithmeticOverflow, "arithmetic overflows 64 bits");
        return Value::integer(r);
      }
      case BinaryOp::In: {
        if (!a->is_entity()) return mismatch(e->child(0), "entity", *a);
        if (b->is_entity()) return Value::boolean(entity_in(a->as_entity(), b->as_entity()));
        if (!b->is_set()) return mismatch(e->child(1), "entity or set", *b);
        bool found = false;
        for (const auto& x : b->as_set()) {
          if (!x.is_entity()) return mismatch(e->child(1), "set of entities", *b);
          found = found || entity_in(a->as_entity(), x.as_entity());
        }
        return Value::boolean(found);
      }
      case BinaryOp::Contains:
        if (!a->is_set()) return mismatch(e->child(0), "set", *a);
        return Value::boolean(a->set_contains(*b));
      case BinaryOp::ContainsAll:
      case BinaryOp::ContainsAny: {
        if (!a->is_set()) return mismatch(e->child(0), "set", *a);
        if (!b->is_set()) return mismatch(e->child(1), "set", *b);
        bool all = true, any = false;
        for (const auto& x : b->as_set()) {
          bool in = a->set_contains(x);
          all = all && in;
          any = any || in;
        }
        return Value::boolean(e->op() == BinaryOp::ContainsAll ? all : any);
      }
    }
    return fail(e, EvalError::Kind::TypeMismatch, "unreachable");
  }

  const EntityStore& store_;
  const Request& req_;
};

}  // namespace

Result<Value, EvalError> evaluate(const ExprPtr& expr, const EntityStore& store, const Request& request) {
  return Evaluator(store, request).eval(expr);
}

PolicyOutcome evaluate_condition(const ExprPtr& desugared, const EntityStore& store, const Request& request) {
  auto v = evaluate(desugared, store, request);
  if (!v) return {PolicyOutcome::Kind::Errored, v.error()};
  if (!v->is_bool()) {
    return {PolicyOutcome::Kind::Errored,
            {EvalError::Kind::TypeMismatch, "policy evaluated to a non-boolean", render_expr(desugared)}};
  }
  return {v->as_bool() ? PolicyOutcome::Kind::Satisfied : PolicyOutcome::Kind::NotSatisfied};
}

PolicyOutcome evaluate_policy(const Policy& policy, const EntityStore& store, const Request& request) {
  auto e = toexp(policy);
  if (!e) {
    return {PolicyOutcome::Kind::Errored, {EvalError::Kind::TypeMismatch, e.error().message, policy.id}};
  }
  return evaluate_condition(*e, store, request);
}

}  // namespace arbiter
