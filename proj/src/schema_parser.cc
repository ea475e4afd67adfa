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
#include <set>

#include "arbiter/parser.h"
#include "lexer.h"

namespace arbiter {

using detail::Token;

namespace {

struct Abort {};

// Unresolved type expression; entity names are checked once every
// declaration has been read.
struct TypeRef {
  enum class Kind { Bool, Long, String, Named, Set, Record } kind = Kind::Bool;
  std::string name;
  SourceSpan span;
  std::vector<TypeRef> args;  // Set element, or record attribute types
  std::vector<std::pair<std::string, bool>> attrs;  // name, required
};

struct PendingEntity {
  std::string name;
  SourceSpan span;
  std::vector<std::pair<std::string, SourceSpan>> parents;
  TypeRef attrs;
};

struct PendingAction {
  std::string name;
  SourceSpan span;
  std::vector<std::pair<EntityRef, SourceSpan>> parents;
  bool has_applies = false;
  std::vector<std::pair<std::string, SourceSpan>> principals, resources;
  TypeRef context;
};

class SchemaParser {
 public:
  SchemaParser(std::vector<Token> toks, Diagnostics& diags) : toks_(std::move(toks)), diags_(diags) {}

  Schema parse() {
    try {
      while (peek().kind != Token::Kind::End) {
        if (peek().is(";")) {
          next();
        } else if (peek().is_ident("entity")) {
          entity_decl();
        } else if (peek().is_ident("action")) {
          action_decl();
        } else {
          fail(peek(), "expected 'entity' or 'action' declaration");
        }
      }
    } catch (const Abort&) {
      return {};
    }
    return resolve();
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& at, std::string msg) {
    error(at.span, std::move(msg));
    throw Abort{};
  }
  void error(const SourceSpan& span, std::string msg) {
    diags_.push_back({ParseDiagnostic::Severity::Error, std::move(msg), span});
  }
  void expect(std::string_view p) {
    if (!peek().is(p)) fail(peek(), "expected '" + std::string(p) + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail(peek(), "expected identifier");
    return next().text;
  }
  std::string path() {
    std::string s = ident();
    while (peek().is("::") && peek(1).kind == Token::Kind::Ident) {
      next();
      s += "::" + ident();
    }
    return s;
  }
  std::string string_lit(const Token& t) {
    std::string out;
    if (auto err = detail::decode_string(t.text, &out, nullptr)) fail(t, *err);
    return out;
  }
  // Action names are identifiers or string literals.
  std::string action_name() {
    const Token& t = peek();
    if (t.kind == Token::Kind::String) return next(), string_lit(t);
    return ident();
  }

  template <typename F>
  void bracket_list(F&& item) {
    if (!peek().is("[")) {
      item();
      return;
    }
    next();
    while (!peek().is("]")) {
      item();
      if (!peek().is(",")) break;
      next();
    }
    expect("]");
  }

  TypeRef type() {
    TypeRef t;
    t.span = peek().span;
    if (peek().is("{")) return record_type();
    std::string name = path();
    if (name == "String") t.kind = TypeRef::Kind::String;
    else if (name == "Long") t.kind = TypeRef::Kind::Long;
    else if (name == "Boolean" || name == "Bool") t.kind = TypeRef::Kind::Bool;
    else if (name == "Set") {
      t.kind = TypeRef::Kind::Set;
      expect("<");
      t.args.push_back(type());
      expect(">");
    } else {
      t.kind = TypeRef::Kind::Named;
      t.name = name;
    }
    return t;
  }

  TypeRef record_type() {
    TypeRef t;
    t.kind = TypeRef::Kind::Record;
    t.span = peek().span;
    expect("{");
    while (!peek().is("}")) {
      const Token& at = peek();
      std::string name = at.kind == Token::Kind::String ? (next(), string_lit(at)) : ident();
      bool required = true;
      if (peek().is("?")) {
        next();
        required = false;
      }
      expect(":");
      for (const auto& a : t.attrs) {
        if (a.first == name) fail(at, "duplicate attribute '" + name + "'");
      }
      t.attrs.emplace_back(name, required);
      t.args.push_back(type());
      if (!peek().is(",")) break;
      next();
    }
    expect("}");
    return t;
  }

  void entity_decl() {
    next();
    std::vector<std::pair<std::string, SourceSpan>> names;
    do {
      SourceSpan sp = peek().span;
      names.emplace_back(path(), sp);
    } while (peek().is(",") && (next(), true));
    PendingEntity proto;
    if (peek().is_ident("in")) {
      next();
      bracket_list([&] {
        SourceSpan sp = peek().span;
        proto.parents.emplace_back(path(), sp);
      });
    }
    if (peek().is("=")) next();
    if (peek().is("{")) {
      proto.attrs = record_type();
    } else {
      proto.attrs.kind = TypeRef::Kind::Record;
    }
    if (peek().is(";")) next();
    for (auto& [n, sp] : names) {
      PendingEntity e = proto;
      e.name = n;
      e.span = sp;
      entities_.push_back(std::move(e));
    }
  }

  EntityRef action_parent() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident && peek(1).is("::")) {
      std::string type = ident();
      while (peek().is("::") && peek(1).kind == Token::Kind::Ident) {
        next();
        type += "::" + ident();
      }
      expect("::");
      const Token& s = peek();
      if (s.kind != Token::Kind::String) fail(s, "expected action id string");
      next();
      return {type, string_lit(s)};
    }
    return {kActionType, action_name()};
  }

  void action_decl() {
    next();
    std::vector<std::pair<std::string, SourceSpan>> names;
    do {
      SourceSpan sp = peek().span;
      names.emplace_back(action_name(), sp);
    } while (peek().is(",") && (next(), true));
    PendingAction proto;
    proto.context.kind = TypeRef::Kind::Record;
    if (peek().is_ident("in")) {
      next();
      bracket_list([&] {
        SourceSpan sp = peek().span;
        proto.parents.emplace_back(action_parent(), sp);
      });
    }
    if (peek().is_ident("appliesTo")) {
      next();
      proto.has_applies = true;
      expect("{");
      while (!peek().is("}")) {
        const Token& key = peek();
        std::string k = ident();
        expect(":");
        auto types = [&](auto& into) {
          bracket_list([&] {
            SourceSpan sp = peek().span;
            into.emplace_back(path(), sp);
          });
        };
        if (k == "principal") types(proto.principals);
        else if (k == "resource") types(proto.resources);
        else if (k == "context") proto.context = type();
        else fail(key, "unknown appliesTo field '" + k + "'");
        if (!peek().is(",")) break;
        next();
      }
      expect("}");
    }
    if (peek().is(";")) next();
    for (auto& [n, sp] : names) {
      PendingAction a = proto;
      a.name = n;
      a.span = sp;
      actions_.push_back(std::move(a));
    }
  }

  // ---- resolution ----

  void check_entity_name(const std::string& name, const SourceSpan& span) {
    if (!entity_names_.count(name)) error(span, "unknown entity type '" + name + "'");
  }

  Type resolve_type(const TypeRef& t) {
    switch (t.kind) {
      case TypeRef::Kind::Bool: return Type::boolean();
      case TypeRef::Kind::Long: return Type::long_type();
      case TypeRef::Kind::String: return Type::string_type();
      case TypeRef::Kind::Named:
        check_entity_name(t.name, t.span);
        return Type::entity(t.name);
      case TypeRef::Kind::Set: return Type::set_of(resolve_type(t.args.at(0)));
      case TypeRef::Kind::Record: {
        std::vector<AttributeType> attrs;
        for (size_t i = 0; i < t.attrs.size(); ++i) {
          attrs.push_back({t.attrs[i].first, t.attrs[i].second, resolve_type(t.args[i])});
        }
        return Type::record(std::move(attrs));
      }
    }
    return Type::boolean();
  }

  Schema resolve() {
    Schema s;
    for (const auto& e : entities_) {
      if (e.name == kActionType) error(e.span, "'Action' is reserved for actions");
      if (!entity_names_.insert(e.name).second) error(e.span, "duplicate declaration of entity type '" + e.name + "'");
    }
    for (const auto& e : entities_) {
      EntityTypeDecl d;
      d.name = e.name;
      d.attributes = resolve_type(e.attrs);
      for (const auto& [p, sp] : e.parents) {
        check_entity_name(p, sp);
        d.parent_types.insert(p);
      }
      s.entity_types.emplace(e.name, std::move(d));
    }
    for (const auto& a : actions_) {
      ActionDecl d;
      d.uid = {kActionType, a.name};
      if (s.actions.count(d.uid)) {
        error(a.span, "duplicate declaration of action '" + a.name + "'");
        continue;
      }
      for (const auto& [p, sp] : a.principals) {
        check_entity_name(p, sp);
        d.principal_types.push_back(p);
      }
      for (const auto& [r, sp] : a.resources) {
        check_entity_name(r, sp);
        d.resource_types.push_back(r);
      }
      auto dedup = [](std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      };
      dedup(d.principal_types);
      dedup(d.resource_types);
      d.context = resolve_type(a.context);
      if (!d.context.is_record()) error(a.span, "context type of action '" + a.name + "' must be a record");
      for (const auto& [p, sp] : a.parents) {
        if (p.type != kActionType) error(sp, "action parent must be an Action, found type " + p.type);
        d.parents.insert(p);
      }
      s.actions.emplace(d.uid, std::move(d));
    }
    // Parents that are never declared act as pure groups.
    std::vector<EntityRef> groups;
    for (const auto& [uid, d] : s.actions) {
      for (const auto& p : d.parents) {
        if (!s.actions.count(p)) groups.push_back(p);
      }
    }
    for (const auto& g : groups) {
      ActionDecl d;
      d.uid = g;
      d.declared = false;
      s.actions.emplace(g, std::move(d));
    }
    if (auto cyc = s.compute_closures()) {
      SourceSpan sp;
      for (const auto& a : actions_) {
        if (a.name == cyc->id) sp = a.span;
      }
      error(sp, "action group membership is cyclic through '" + cyc->id + "'");
    }
    return s;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  Diagnostics& diags_;
  std::vector<PendingEntity> entities_;
  std::vector<PendingAction> actions_;
  std::set<std::string> entity_names_;
};

}  // namespace

Result<Schema, Diagnostics> parse_schema(std::string_view text) {
  Diagnostics diags;
  auto toks = detail::tokenize(text, diags);
  if (!diags.empty()) return unexpected(std::move(diags));
  SchemaParser p(std::move(toks), diags);
  Schema s = p.parse();
  if (!diags.empty()) return unexpected(std::move(diags));
  return s;
}

}  // namespace arbiter
