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

#include <algorithm>
#include <cstdint>
#include <limits>

#include "arbiter/parser.h"
#include "lexer.h"

namespace arbiter {

using detail::Token;

namespace {

constexpr int kMaxNesting = 200;
constexpr size_t kMaxTreeDepth = 1000;
constexpr size_t kMaxDiagnostics = 20;

struct Abort {};

class PolicyParser {
 public:
  PolicyParser(std::vector<Token> toks, Diagnostics& diags) : toks_(std::move(toks)), diags_(diags) {}

  std::vector<Policy> policies() {
    std::vector<Policy> out;
    while (!at_end()) {
      try {
        Policy p = policy();
        if (p.id.empty()) p.id = "policy" + std::to_string(out.size());
        out.push_back(std::move(p));
      } catch (const Abort&) {
        if (diags_.size() >= kMaxDiagnostics) break;
        recover();
      }
    }
    check_unique_ids(out);
    return out;
  }

  ExprPtr whole_expression() {
    try {
      ExprPtr e = expr();
      if (!at_end()) fail(peek(), "unexpected " + describe(peek()) + " after expression");
      return e;
    } catch (const Abort&) {
      return nullptr;
    }
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End: return "end of input";
      case Token::Kind::String: return "string literal";
      case Token::Kind::Int: return "integer " + t.text;
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const Token& at, std::string msg) {
    diags_.push_back({ParseDiagnostic::Severity::Error, std::move(msg), at.span});
    throw Abort{};
  }

  const Token& expect_punct(std::string_view p) {
    if (!peek().is(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
    return next();
  }
  void expect_word(std::string_view w) {
    if (!peek().is_ident(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
    next();
  }

  void recover() {
    while (!at_end()) {
      if (next().is(";")) return;
    }
  }

  void check_unique_ids(const std::vector<Policy>& ps) {
    std::map<std::string, size_t> seen;
    for (size_t i = 0; i < ps.size(); ++i) {
      if (!seen.emplace(ps[i].id, i).second) {
        diags_.push_back({ParseDiagnostic::Severity::Error, "duplicate policy id \"" + ps[i].id + "\"",
                          spans_.size() > i ? spans_[i] : SourceSpan{}});
      }
    }
  }

  std::string string_literal(const Token& t) {
    std::string out;
    if (auto err = detail::decode_string(t.text, &out, nullptr)) fail(t, *err);
    return out;
  }

  Policy policy() {
    Policy p;
    SourceSpan start = peek().span;
    while (peek().is("@")) {
      next();
      const Token& key = peek();
      if (key.kind != Token::Kind::Ident) fail(key, "expected annotation name after '@'");
      next();
      expect_punct("(");
      const Token& val = peek();
      if (val.kind != Token::Kind::String) fail(val, "annotation value must be a string literal");
      next();
      std::string v = string_literal(val);
      expect_punct(")");
      if (!p.annotations.emplace(key.text, v).second) fail(key, "duplicate annotation @" + key.text);
    }
    if (auto it = p.annotations.find("id"); it != p.annotations.end()) p.id = it->second;
    spans_.push_back(start);

    const Token& eff = peek();
    if (eff.is_ident("permit")) p.effect = Effect::Permit;
    else if (eff.is_ident("forbid")) p.effect = Effect::Forbid;
    else fail(eff, "expected 'permit' or 'forbid', found " + describe(eff));
    next();

    expect_punct("(");
    p.principal = scope("principal", SlotId::Principal);
    expect_punct(",");
    p.action = action_scope();
    expect_punct(",");
    p.resource = scope("resource", SlotId::Resource);
    expect_punct(")");

    while (peek().is_ident("when") || peek().is_ident("unless")) {
      bool when = next().text == "when";
      expect_punct("{");
      if (peek().is("}")) fail(peek(), "empty condition body");
      ExprPtr body = expr();
      expect_punct("}");
      p.conditions.push_back({when, body});
    }
    if (peek().kind == Token::Kind::Ident && !peek().is_ident("permit") && !peek().is_ident("forbid")) {
      fail(peek(), "expected 'when', 'unless' or ';', found " + describe(peek()));
    }
    expect_punct(";");
    return p;
  }

  ScopeConstraint scope(const char* var, SlotId own_slot) {
    expect_word(var);
    bool eq;
    if (peek().is("==")) eq = true;
    else if (peek().is_ident("in")) eq = false;
    else return ScopeConstraint::any();
    next();
    if (peek().is("?")) {
      const Token& q = next();
      const Token& name = peek();
      if (!name.is_ident("principal") && !name.is_ident("resource")) fail(name, "unknown slot");
      next();
      SlotId s = name.text == "principal" ? SlotId::Principal : SlotId::Resource;
      if (s != own_slot) fail(q, std::string("slot ") + slot_name(s) + " cannot constrain " + var);
      return eq ? ScopeConstraint::eq(s) : ScopeConstraint::in(s);
    }
    EntityRef r = entity_ref();
    return eq ? ScopeConstraint::eq(std::move(r)) : ScopeConstraint::in(std::move(r));
  }

  EntityRef action_ref() {
    const Token& at = peek();
    EntityRef r = entity_ref();
    std::string_view t = r.type;
    if (!(t == kActionType || (t.size() > 8 && t.substr(t.size() - 8) == "::Action"))) {
      fail(at, "action constraint must name an Action entity, found type " + r.type);
    }
    return r;
  }

  ActionConstraint action_scope() {
    expect_word("action");
    ActionConstraint c;
    if (peek().is("==")) {
      next();
      c.kind = ActionConstraint::Kind::Eq;
      c.refs.push_back(action_ref());
    } else if (peek().is_ident("in")) {
      next();
      if (peek().is("[")) {
        next();
        c.kind = ActionConstraint::Kind::InSet;
        while (!peek().is("]")) {
          c.refs.push_back(action_ref());
          if (!peek().is(",")) break;
          next();
        }
        expect_punct("]");
      } else {
        c.kind = ActionConstraint::Kind::In;
        c.refs.push_back(action_ref());
      }
    } else if (peek().is("?")) {
      fail(peek(), "slots are not allowed in the action constraint");
    }
    return c;
  }

  std::string path_component() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t, "expected identifier, found " + describe(t));
    if (detail::is_reserved(t.text)) fail(t, "'" + t.text + "' is a reserved word");
    return next().text;
  }

  EntityRef entity_ref() {
    std::string type = path_component();
    for (;;) {
      expect_punct("::");
      if (peek().kind == Token::Kind::String) break;
      type += "::" + path_component();
    }
    const Token& id = next();
    return {type, string_literal(id)};
  }

  // ---- expressions ----

  struct DepthGuard {
    PolicyParser& p;
    explicit DepthGuard(PolicyParser& p) : p(p) {
      if (++p.nesting_ > kMaxNesting) p.fail(p.peek(), "expression nested too deeply");
    }
    ~DepthGuard() { --p.nesting_; }
  };

  ExprPtr checked(ExprPtr e, const Token& at) {
    if (e->depth() > kMaxTreeDepth) fail(at, "expression too deep");
    return e;
  }

  ExprPtr expr() {
    DepthGuard g(*this);
    if (peek().is_ident("if")) return if_expr();
    return or_expr();
  }

  ExprPtr if_expr() {
    const Token& kw = next();
    ExprPtr c = expr();
    expect_word("then");
    ExprPtr t = expr();
    expect_word("else");
    ExprPtr f = expr();
    return checked(Expr::ite(c, t, f), kw);
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (peek().is("||")) {
      const Token& op = next();
      lhs = checked(Expr::or_(lhs, and_expr()), op);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = relation();
    while (peek().is("&&")) {
      const Token& op = next();
      lhs = checked(Expr::and_(lhs, relation()), op);
    }
    return lhs;
  }

  bool at_relation_op() const {
    const Token& t = peek();
    return t.is("==") || t.is("!=") || t.is("<") || t.is("<=") || t.is(">") || t.is(">=") ||
           t.is_ident("in") || t.is_ident("has") || t.is_ident("like") || t.is_ident("is");
  }

  ExprPtr relation() {
    ExprPtr lhs = additive();
    if (!at_relation_op()) return lhs;
    const Token& op = next();
    ExprPtr out;
    if (op.is_ident("has")) {
      const Token& a = peek();
      if (a.kind == Token::Kind::String) {
        next();
        out = Expr::has_attr(lhs, string_literal(a));
      } else if (a.kind == Token::Kind::Ident) {
        if (detail::is_reserved(a.text)) fail(a, "'" + a.text + "' is a reserved word; write it as a string");
        out = Expr::has_attr(lhs, next().text);
      } else {
        fail(a, "expected attribute name after 'has'");
      }
    } else if (op.is_ident("like")) {
      const Token& s = peek();
      if (s.kind != Token::Kind::String) fail(s, "expected pattern string after 'like'");
      next();
      Pattern pat;
      if (auto err = detail::decode_string(s.text, nullptr, &pat)) fail(s, *err);
      out = Expr::like(lhs, std::move(pat));
    } else if (op.is_ident("is")) {
      std::string type = path_component();
      while (peek().is("::")) {
        next();
        type += "::" + path_component();
      }
      out = Expr::is(lhs, std::move(type));
    } else {
      ExprPtr rhs = additive();
      if (op.is("==")) out = Expr::binary(BinaryOp::Eq, lhs, rhs);
      else if (op.is("!=")) out = Expr::not_(Expr::binary(BinaryOp::Eq, lhs, rhs));
      else if (op.is("<")) out = Expr::binary(BinaryOp::Less, lhs, rhs);
      else if (op.is("<=")) out = Expr::binary(BinaryOp::LessEq, lhs, rhs);
      else if (op.is(">")) out = Expr::not_(Expr::binary(BinaryOp::LessEq, lhs, rhs));
      else if (op.is(">=")) out = Expr::not_(Expr::binary(BinaryOp::Less, lhs, rhs));
      else out = Expr::binary(BinaryOp::In, lhs, rhs);
    }
    if (at_relation_op()) fail(peek(), "comparison operators do not chain; add parentheses");
    return checked(out, op);
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (peek().is("+") || peek().is("-")) {
      const Token& op = next();
      ExprPtr rhs = multiplicative();
      lhs = checked(Expr::binary(op.is("+") ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs), op);
    }
    return lhs;
  }

  static const Value* long_literal(const ExprPtr& e) {
    return e->kind() == Expr::Kind::Lit && e->literal().is_long() ? &e->literal() : nullptr;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (peek().is("*")) {
      const Token& op = next();
      ExprPtr rhs = unary();
      if (const Value* v = long_literal(lhs)) lhs = Expr::mul_const(v->as_long(), rhs);
      else if (const Value* w = long_literal(rhs)) lhs = Expr::mul_const(w->as_long(), lhs);
      else fail(op, "multiplication requires an integer literal operand");
      lhs = checked(lhs, op);
    }
    return lhs;
  }

  ExprPtr unary() {
    std::vector<const Token*> ops;
    while (peek().is("!") || peek().is("-")) ops.push_back(&next());
    ExprPtr e;
    // `-` directly before an integer literal (and not before a member access
    // on it) is part of the literal, so the minimum long is expressible.
    if (!ops.empty() && ops.back()->is("-") && peek().kind == Token::Kind::Int && !peek(1).is(".") &&
        !peek(1).is("[")) {
      const Token& t = next();
      e = Expr::integer(parse_int(t, true));
      ops.pop_back();
    } else {
      e = member();
    }
    for (size_t i = ops.size(); i-- > 0;) {
      e = checked(ops[i]->is("!") ? Expr::not_(e) : Expr::neg(e), *ops[i]);
    }
    return e;
  }

  int64_t parse_int(const Token& t, bool negative) {
    // Accumulate as unsigned; 2^63 is allowed only when negated.
    uint64_t v = 0;
    const uint64_t limit = negative ? uint64_t(1) << 63 : (uint64_t(1) << 63) - 1;
    for (char c : t.text) {
      uint64_t d = c - '0';
      if (v > (limit - d) / 10) fail(t, "integer literal out of range");
      v = v * 10 + d;
    }
    if (negative) return v == (uint64_t(1) << 63) ? std::numeric_limits<int64_t>::min() : -static_cast<int64_t>(v);
    return static_cast<int64_t>(v);
  }

  ExprPtr member() {
    ExprPtr e = primary();
    for (;;) {
      if (peek().is(".")) {
        const Token& dot = next();
        const Token& name = peek();
        if (name.kind != Token::Kind::Ident) fail(name, "expected attribute name after '.'");
        next();
        if (peek().is("(")) {
          BinaryOp op;
          if (name.text == "contains") op = BinaryOp::Contains;
          else if (name.text == "containsAll") op = BinaryOp::ContainsAll;
          else if (name.text == "containsAny") op = BinaryOp::ContainsAny;
          else fail(name, "method '" + name.text + "' is not supported (extension methods are not part of the language)");
          next();
          ExprPtr arg = expr();
          if (peek().is(",")) fail(peek(), "'" + name.text + "' takes exactly one argument");
          expect_punct(")");
          e = checked(Expr::binary(op, e, arg), dot);
        } else {
          if (detail::is_reserved(name.text)) fail(name, "'" + name.text + "' is a reserved word; use [\"" + name.text + "\"]");
          e = checked(Expr::get_attr(e, name.text), dot);
        }
      } else if (peek().is("[")) {
        const Token& br = next();
        const Token& s = peek();
        if (s.kind != Token::Kind::String) fail(s, "expected string literal in attribute index");
        next();
        expect_punct("]");
        e = checked(Expr::get_attr(e, string_literal(s)), br);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int:
        next();
        return Expr::integer(parse_int(t, false));
      case Token::Kind::String:
        next();
        return Expr::string(string_literal(t));
      case Token::Kind::Ident: {
        if (t.text == "true" || t.text == "false") {
          next();
          return Expr::boolean(t.text == "true");
        }
        if (t.text == "principal") return next(), Expr::variable(Var::Principal);
        if (t.text == "action") return next(), Expr::variable(Var::Action);
        if (t.text == "resource") return next(), Expr::variable(Var::Resource);
        if (t.text == "context") return next(), Expr::variable(Var::Context);
        if (t.text == "if") {
          DepthGuard g(*this);
          return if_expr();
        }
        if (peek(1).is("(")) fail(t, "function '" + t.text + "' is not supported (extension functions are not part of the language)");
        if (peek(1).is("::")) return Expr::entity(entity_ref());
        if (detail::is_reserved(t.text)) fail(t, "unexpected reserved word '" + t.text + "'");
        fail(t, "unknown identifier '" + t.text + "'");
      }
      case Token::Kind::Punct:
        break;
      case Token::Kind::End:
        fail(t, "unexpected end of input");
    }
    if (t.is("(")) {
      next();
      ExprPtr e = expr();
      expect_punct(")");
      return e;
    }
    if (t.is("[")) {
      DepthGuard g(*this);
      next();
      std::vector<ExprPtr> elems;
      while (!peek().is("]")) {
        elems.push_back(expr());
        if (!peek().is(",")) break;
        next();
      }
      expect_punct("]");
      return checked(Expr::set(std::move(elems)), t);
    }
    if (t.is("{")) {
      DepthGuard g(*this);
      next();
      std::vector<std::pair<std::string, ExprPtr>> fields;
      while (!peek().is("}")) {
        const Token& k = peek();
        std::string key;
        if (k.kind == Token::Kind::Ident) key = k.text;
        else if (k.kind == Token::Kind::String) key = string_literal(k);
        else fail(k, "expected record key");
        next();
        for (const auto& f : fields) {
          if (f.first == key) fail(k, "duplicate record key \"" + key + "\"");
        }
        expect_punct(":");
        fields.emplace_back(std::move(key), expr());
        if (!peek().is(",")) break;
        next();
      }
      expect_punct("}");
      return checked(Expr::record(std::move(fields)), t);
    }
    if (t.is("?")) fail(t, "template slots may only appear in the policy scope");
    fail(t, "unexpected " + describe(t));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int nesting_ = 0;
  Diagnostics& diags_;
  std::vector<SourceSpan> spans_;
};

bool has_errors(const Diagnostics& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const auto& d) { return d.severity == ParseDiagnostic::Severity::Error; });
}

}  // namespace

Result<std::vector<Policy>, Diagnostics> parse_policies(std::string_view text) {
  Diagnostics diags;
  auto toks = detail::tokenize(text, diags);
  if (has_errors(diags)) return unexpected(std::move(diags));
  PolicyParser p(std::move(toks), diags);
  auto out = p.policies();
  if (has_errors(diags)) return unexpected(std::move(diags));
  return out;
}

Result<ExprPtr, Diagnostics> parse_expression(std::string_view text) {
  Diagnostics diags;
  auto toks = detail::tokenize(text, diags);
  if (has_errors(diags)) return unexpected(std::move(diags));
  PolicyParser p(std::move(toks), diags);
  ExprPtr e = p.whole_expression();
  if (!e || has_errors(diags)) return unexpected(std::move(diags));
  return e;
}

std::string render_diagnostic(const ParseDiagnostic& d, std::string_view source,
                              std::string_view filename) {
  std::string out = std::string(filename) + ":" + std::to_string(d.span.line) + ":" +
                    std::to_string(d.span.column) + ": " +
                    (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") + ": " +
                    d.message + "\n";
  size_t at = std::min(d.span.byte_start, source.size());
  size_t begin = at == 0 ? std::string_view::npos : source.rfind('\n', at - 1);
  begin = begin == std::string_view::npos ? 0 : begin + 1;
  size_t end = source.find('\n', begin);
  if (end == std::string_view::npos) end = source.size();
  out += "  " + std::string(source.substr(begin, end - begin)) + "\n";
  out += "  " + std::string(d.span.column > 0 ? d.span.column - 1 : 0, ' ') + "^\n";
  return out;
}

std::string render_diagnostics(const Diagnostics& ds, std::string_view source, std::string_view filename) {
  std::string out;
  for (const auto& d : ds) out += render_diagnostic(d, source, filename);
  return out;
}

}  // namespace arbiter
