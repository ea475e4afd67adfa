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

#include <cctype>

#include "arbiter/parser.h"
#include "lexer.h"

namespace arbiter {

bool is_plain_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return !detail::is_reserved(s);
}

namespace {

// Binding strength, loosest first. A child printed where a higher level is
// required gets parentheses.
enum Level { kIf = 0, kOr, kAnd, kRel, kAdd, kMul, kUnary, kMember };

std::string key_text(const std::string& k) {
  return is_plain_identifier(k) ? k : "\"" + escape_string(k) + "\"";
}

void render(const ExprPtr& e, int min_level, std::string& out);

int level_of(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::If: return kIf;
    case Expr::Kind::Or: return kOr;
    case Expr::Kind::And: return kAnd;
    case Expr::Kind::HasAttr:
    case Expr::Kind::Like:
    case Expr::Kind::Is: return kRel;
    case Expr::Kind::Binary:
      switch (e.op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Contains:
        case BinaryOp::ContainsAll:
        case BinaryOp::ContainsAny: return kMember;
        default: return kRel;
      }
    case Expr::Kind::MulConst: return kMul;
    case Expr::Kind::Not:
    case Expr::Kind::Neg: return kUnary;
    case Expr::Kind::Lit:
      return e.literal().is_long() && e.literal().as_long() < 0 ? kUnary : kMember;
    default: return kMember;
  }
}

void render_inner(const ExprPtr& e, std::string& out) {
  switch (e->kind()) {
    case Expr::Kind::Lit:
      out += render_value(e->literal());
      return;
    case Expr::Kind::Var:
      out += var_name(e->var());
      return;
    case Expr::Kind::Slot:
      out += slot_name(e->slot());
      return;
    case Expr::Kind::Set:
      out += '[';
      for (size_t i = 0; i < e->children().size(); ++i) {
        if (i) out += ", ";
        render(e->child(i), kIf, out);
      }
      out += ']';
      return;
    case Expr::Kind::Record:
      out += '{';
      for (size_t i = 0; i < e->children().size(); ++i) {
        if (i) out += ", ";
        out += key_text(e->keys()[i]) + ": ";
        render(e->child(i), kIf, out);
      }
      out += '}';
      return;
    case Expr::Kind::GetAttr:
      render(e->child(0), kMember, out);
      if (is_plain_identifier(e->name())) out += "." + e->name();
      else out += "[\"" + escape_string(e->name()) + "\"]";
      return;
    case Expr::Kind::HasAttr:
      render(e->child(0), kAdd, out);
      out += " has " + key_text(e->name());
      return;
    case Expr::Kind::Like:
      render(e->child(0), kAdd, out);
      out += " like \"" + e->pattern().to_source() + "\"";
      return;
    case Expr::Kind::Is:
      render(e->child(0), kAdd, out);
      out += " is " + e->name();
      return;
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      int lv = level_of(*e);
      render(e->child(0), lv, out);
      out += e->kind() == Expr::Kind::And ? " && " : " || ";
      render(e->child(1), lv + 1, out);
      return;
    }
    case Expr::Kind::Not:
    case Expr::Kind::Neg: {
      out += e->kind() == Expr::Kind::Not ? "!" : "-";
      const ExprPtr& c = e->child(0);
      // `-5` would re-parse as a literal, so keep the negation visible.
      if (e->kind() == Expr::Kind::Neg && c->kind() == Expr::Kind::Lit && c->literal().is_long()) {
        out += "(" + render_value(c->literal()) + ")";
      } else {
        render(c, kUnary, out);
      }
      return;
    }
    case Expr::Kind::MulConst:
      out += std::to_string(e->factor()) + " * ";
      render(e->child(0), kUnary, out);
      return;
    case Expr::Kind::Binary: {
      int lv = level_of(*e);
      if (lv == kMember) {
        render(e->child(0), kMember, out);
        out += std::string(".") + binary_op_name(e->op()) + "(";
        render(e->child(1), kIf, out);
        out += ")";
      } else if (lv == kAdd) {
        render(e->child(0), kAdd, out);
        out += std::string(" ") + binary_op_name(e->op()) + " ";
        render(e->child(1), kMul, out);
      } else {
        render(e->child(0), kAdd, out);
        out += std::string(" ") + binary_op_name(e->op()) + " ";
        render(e->child(1), kAdd, out);
      }
      return;
    }
    case Expr::Kind::If:
      out += "if ";
      render(e->child(0), kIf, out);
      out += " then ";
      render(e->child(1), kIf, out);
      out += " else ";
      render(e->child(2), kIf, out);
      return;
  }
}

void render(const ExprPtr& e, int min_level, std::string& out) {
  if (level_of(*e) < min_level) {
    out += '(';
    render_inner(e, out);
    out += ')';
  } else {
    render_inner(e, out);
  }
}

std::string scope_text(const char* var, const ScopeConstraint& c) {
  std::string s = var;
  if (c.kind == ScopeConstraint::Kind::Any) return s;
  s += c.kind == ScopeConstraint::Kind::Eq ? " == " : " in ";
  if (const EntityRef* r = c.entity()) s += r->to_string();
  else s += slot_name(std::get<SlotId>(c.target));
  return s;
}

std::string action_text(const ActionConstraint& c) {
  switch (c.kind) {
    case ActionConstraint::Kind::Any: return "action";
    case ActionConstraint::Kind::Eq: return "action == " + c.refs.at(0).to_string();
    case ActionConstraint::Kind::In: return "action in " + c.refs.at(0).to_string();
    case ActionConstraint::Kind::InSet: {
      std::string s = "action in [";
      for (size_t i = 0; i < c.refs.size(); ++i) {
        if (i) s += ", ";
        s += c.refs[i].to_string();
      }
      return s + "]";
    }
  }
  return "action";
}

}  // namespace

std::string render_value(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Long: return std::to_string(v.as_long());
    case Value::Kind::String: return "\"" + escape_string(v.as_string()) + "\"";
    case Value::Kind::Entity: return v.as_entity().to_string();
    case Value::Kind::Set: {
      std::string s = "[";
      bool first = true;
      for (const auto& e : v.as_set()) {
        if (!first) s += ", ";
        first = false;
        s += render_value(e);
      }
      return s + "]";
    }
    case Value::Kind::Record: {
      std::string s = "{";
      bool first = true;
      for (const auto& [k, e] : v.as_record()) {
        if (!first) s += ", ";
        first = false;
        s += key_text(k) + ": " + render_value(e);
      }
      return s + "}";
    }
  }
  return "";
}

std::string render_expr(const ExprPtr& e) {
  std::string out;
  render(e, kIf, out);
  return out;
}

std::string render_policy(const Policy& p) {
  std::string out;
  for (const auto& [k, v] : p.annotations) out += "@" + k + "(\"" + escape_string(v) + "\")\n";
  out += p.effect == Effect::Permit ? "permit (\n" : "forbid (\n";
  out += "  " + scope_text("principal", p.principal) + ",\n";
  out += "  " + action_text(p.action) + ",\n";
  out += "  " + scope_text("resource", p.resource) + "\n)";
  for (const auto& c : p.conditions) {
    out += c.is_when ? "\nwhen { " : "\nunless { ";
    out += render_expr(c.body) + " }";
  }
  return out + ";\n";
}

std::string render_policies(const std::vector<Policy>& ps) {
  std::string out;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i) out += "\n";
    out += render_policy(ps[i]);
  }
  return out;
}

}  // namespace arbiter
