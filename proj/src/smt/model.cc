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

#include "arbiter/smt/model.h"

#include <cctype>

#include "arbiter/symcc/encoder.h"
#include "arbiter/utf8.h"

namespace arbiter::smt {

using symcc::SValue;

std::string unquote_symbol(const std::string& s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

std::u32string decode_smt_string(std::string_view body) {
  std::u32string raw = utf8_decode(std::string(body));
  std::u32string out;
  for (size_t i = 0; i < raw.size(); ++i) {
    char32_t c = raw[i];
    if (c == '"' && i + 1 < raw.size() && raw[i + 1] == '"') {
      out.push_back('"');
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < raw.size() && raw[i + 1] == 'u') {
      // \u{h..h} (1-5 digits) or \udddd
      size_t j = i + 2;
      std::string hex;
      if (j < raw.size() && raw[j] == '{') {
        ++j;
        while (j < raw.size() && raw[j] != '}' && hex.size() < 5 && std::isxdigit(static_cast<int>(raw[j] & 0x7f)) && raw[j] < 0x80) {
          hex.push_back(static_cast<char>(raw[j++]));
        }
        if (j < raw.size() && raw[j] == '}' && !hex.empty()) {
          out.push_back(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
          i = j;
          continue;
        }
      } else {
        while (j < raw.size() && hex.size() < 4 && raw[j] < 0x80 && std::isxdigit(static_cast<int>(raw[j]))) {
          hex.push_back(static_cast<char>(raw[j++]));
        }
        if (hex.size() == 4) {
          out.push_back(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
          i = j - 1;
          continue;
        }
      }
    }
    out.push_back(c);
  }
  return out;
}

std::string SExpr::to_string() const {
  switch (kind) {
    case Kind::Symbol: return text;
    case Kind::String: return symcc::smt_string_literal(str);
    case Kind::List: {
      std::string s = "(";
      for (size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].to_string();
      return s + ")";
    }
  }
  return "";
}

Result<std::vector<SExpr>, std::string> parse_sexprs(std::string_view text) {
  std::vector<std::vector<SExpr>> stack(1);
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) return unexpected(std::string("unbalanced ')'"));
      SExpr list;
      list.kind = SExpr::Kind::List;
      list.items = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(list));
      ++i;
    } else if (c == '"') {
      size_t j = i + 1;
      std::string body;
      for (;;) {
        if (j >= text.size()) return unexpected(std::string("unterminated string"));
        if (text[j] == '"') {
          if (j + 1 < text.size() && text[j + 1] == '"') {
            body += "\"\"";
            j += 2;
            continue;
          }
          break;
        }
        body.push_back(text[j++]);
      }
      SExpr s;
      s.kind = SExpr::Kind::String;
      s.str = decode_smt_string(body);
      stack.back().push_back(std::move(s));
      i = j + 1;
    } else if (c == '|') {
      size_t j = text.find('|', i + 1);
      if (j == std::string_view::npos) return unexpected(std::string("unterminated quoted symbol"));
      SExpr s;
      s.text = std::string(text.substr(i, j - i + 1));
      stack.back().push_back(std::move(s));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != '"' && text[j] != ';') {
        ++j;
      }
      SExpr s;
      s.text = std::string(text.substr(i, j - i));
      stack.back().push_back(std::move(s));
      i = j;
    }
  }
  if (stack.size() != 1) return unexpected(std::string("unbalanced '('"));
  return std::move(stack[0]);
}

namespace {

using Env = std::map<std::string, SValue>;

SValue fail(const std::string& what, const SExpr& at) {
  throw symcc::EvalTermError{what + ": " + at.to_string()};
}

int64_t parse_bits(const std::string& lit, const SExpr& at) {
  uint64_t v = 0;
  if (lit.rfind("#b", 0) == 0) {
    if (lit.size() != 66) fail("expected a 64-bit literal", at);
    for (size_t i = 2; i < lit.size(); ++i) v = (v << 1) | (lit[i] == '1');
  } else {
    if (lit.size() != 18) fail("expected a 64-bit literal", at);
    v = std::stoull(lit.substr(2), nullptr, 16);
  }
  return static_cast<int64_t>(v);
}

SValue eval(const SExpr& e, const Env& env);

SValue eval_bool_op(const std::string& op, const std::vector<SExpr>& args, const Env& env, const SExpr& at) {
  if (op == "not") {
    if (args.size() != 1) fail("arity", at);
    return SValue::boolean(!eval(args[0], env).b);
  }
  if (op == "and" || op == "or") {
    bool is_and = op == "and";
    for (const auto& a : args) {
      if (eval(a, env).b != is_and) return SValue::boolean(!is_and);
    }
    return SValue::boolean(is_and);
  }
  if (op == "=>") {
    if (args.size() != 2) fail("arity", at);
    return SValue::boolean(!eval(args[0], env).b || eval(args[1], env).b);
  }
  if (op == "=" || op == "distinct") {
    std::vector<SValue> vs;
    for (const auto& a : args) vs.push_back(eval(a, env));
    bool all_eq = true, all_distinct = true;
    for (size_t i = 0; i < vs.size(); ++i) {
      for (size_t j = i + 1; j < vs.size(); ++j) {
        bool same = vs[i] == vs[j];
        all_eq = all_eq && same;
        all_distinct = all_distinct && !same;
      }
    }
    return SValue::boolean(op == "=" ? all_eq : all_distinct);
  }
  return fail("unsupported operator", at);
}

SValue eval(const SExpr& e, const Env& env) {
  switch (e.kind) {
    case SExpr::Kind::String: return SValue::string(e.str);
    case SExpr::Kind::Symbol: {
      const std::string& s = e.text;
      if (s == "true" || s == "false") return SValue::boolean(s == "true");
      if (s.rfind("#b", 0) == 0 || s.rfind("#x", 0) == 0) return SValue::bitvec(parse_bits(s, e));
      auto it = env.find(unquote_symbol(s));
      if (it != env.end()) return it->second;
      if (s == "none") return SValue::none();
      // Nullary constructor.
      return SValue::datatype(symcc::smt_symbol(unquote_symbol(s)), {});
    }
    case SExpr::Kind::List: break;
  }
  if (e.items.empty()) fail("empty application", e);
  const SExpr& head = e.items[0];
  std::vector<SExpr> args(e.items.begin() + 1, e.items.end());
  if (head.kind == SExpr::Kind::List) {
    // ((_ is some) x)
    if (head.items.size() == 3 && head.items[0].is_symbol("_") && head.items[1].is_symbol("is") && args.size() == 1) {
      SValue v = eval(args[0], env);
      if (head.items[2].is_symbol("some")) return SValue::boolean(v.is_some());
      if (head.items[2].is_symbol("none")) return SValue::boolean(v.kind == SValue::Kind::Option && !v.is_some());
      return SValue::boolean(v.kind == SValue::Kind::Datatype &&
                             v.ctor == symcc::smt_symbol(unquote_symbol(head.items[2].text)));
    }
    // ((as const (Set T)) ...) and friends are not produced for our sorts.
    return fail("unsupported head", e);
  }
  const std::string& op = head.text;
  if (op == "as") {
    if (args.size() != 2) fail("arity", e);
    if (args[0].is_symbol("set.empty")) return SValue::set({});
    if (args[0].is_symbol("none")) return SValue::none();
    return eval(args[0], env);
  }
  if (op == "_") {
    // (_ bvN 64)
    if (args.size() == 2 && args[0].kind == SExpr::Kind::Symbol && args[0].text.rfind("bv", 0) == 0) {
      return SValue::bitvec(static_cast<int64_t>(std::stoull(args[0].text.substr(2))));
    }
    return fail("unsupported indexed symbol", e);
  }
  if (op == "let") {
    if (args.size() != 2 || args[0].kind != SExpr::Kind::List) fail("malformed let", e);
    Env inner = env;
    for (const auto& b : args[0].items) {
      if (b.kind != SExpr::Kind::List || b.items.size() != 2) fail("malformed binding", e);
      inner[unquote_symbol(b.items[0].text)] = eval(b.items[1], env);
    }
    return eval(args[1], inner);
  }
  if (op == "ite") {
    if (args.size() != 3) fail("arity", e);
    return eval(args[0], env).b ? eval(args[1], env) : eval(args[2], env);
  }
  if (op == "not" || op == "and" || op == "or" || op == "=>" || op == "=" || op == "distinct") {
    return eval_bool_op(op, args, env, e);
  }
  if (op == "some") {
    if (args.size() != 1) fail("arity", e);
    return SValue::some(eval(args[0], env));
  }
  if (op == "set.singleton") {
    if (args.size() != 1) fail("arity", e);
    return SValue::set({eval(args[0], env)});
  }
  if (op == "set.union" || op == "set.insert") {
    std::vector<SValue> elems;
    for (size_t i = 0; i < args.size(); ++i) {
      SValue v = eval(args[i], env);
      bool is_set_arg = op == "set.union" || i + 1 == args.size();
      if (is_set_arg) {
        if (v.kind != SValue::Kind::Set) fail("expected a set", e);
        elems.insert(elems.end(), v.elems.begin(), v.elems.end());
      } else {
        elems.push_back(std::move(v));
      }
    }
    return SValue::set(std::move(elems));
  }
  if (op == "bvneg" && args.size() == 1) {
    return SValue::bitvec(static_cast<int64_t>(0 - static_cast<uint64_t>(eval(args[0], env).bv)));
  }
  // Anything else applied to arguments is a datatype constructor.
  std::vector<SValue> fields;
  for (const auto& a : args) fields.push_back(eval(a, env));
  return SValue::datatype(symcc::smt_symbol(unquote_symbol(op)), std::move(fields));
}

}  // namespace

Result<Model, ModelParseError> Model::parse(std::string_view text) {
  auto parsed = parse_sexprs(text);
  if (!parsed) return unexpected(ModelParseError{parsed.error(), std::string(text)});
  if (parsed->empty() || (*parsed)[0].kind != SExpr::Kind::List) {
    return unexpected(ModelParseError{"expected a parenthesized model", std::string(text)});
  }
  Model m;
  m.raw_ = std::string(text);
  const auto& items = (*parsed)[0].items;
  size_t start = 0;
  if (!items.empty() && items[0].is_symbol("model")) start = 1;  // older output format
  for (size_t i = start; i < items.size(); ++i) {
    const SExpr& d = items[i];
    if (d.kind != SExpr::Kind::List || d.items.empty()) {
      return unexpected(ModelParseError{"unexpected model entry " + d.to_string(), m.raw_});
    }
    if (d.items[0].is_symbol("declare-sort") || d.items[0].is_symbol("declare-datatype") ||
        d.items[0].is_symbol("declare-datatypes")) {
      continue;
    }
    if (!d.items[0].is_symbol("define-fun") || d.items.size() != 5 || d.items[2].kind != SExpr::Kind::List) {
      return unexpected(ModelParseError{"unexpected model entry " + d.to_string(), m.raw_});
    }
    Definition def;
    for (const auto& p : d.items[2].items) {
      if (p.kind != SExpr::Kind::List || p.items.size() != 2) {
        return unexpected(ModelParseError{"malformed parameter in " + d.to_string(), m.raw_});
      }
      def.params.push_back(unquote_symbol(p.items[0].text));
    }
    def.body = d.items[4];
    m.defs_[unquote_symbol(d.items[1].text)] = std::move(def);
  }
  return m;
}

bool Model::defines(const std::string& symbol) const { return defs_.count(unquote_symbol(symbol)) > 0; }

SValue Model::constant(const std::string& symbol, const symcc::Sort&) const {
  auto it = defs_.find(unquote_symbol(symbol));
  if (it == defs_.end()) throw symcc::EvalTermError{"model does not define " + symbol};
  return eval(it->second.body, {});
}

SValue Model::apply(const std::string& fn, const SValue& arg, const symcc::Sort&) const {
  auto it = defs_.find(unquote_symbol(fn));
  if (it == defs_.end()) throw symcc::EvalTermError{"model does not define " + fn};
  if (it->second.params.size() != 1) throw symcc::EvalTermError{fn + " is not unary in the model"};
  return eval(it->second.body, {{it->second.params[0], arg}});
}

}  // namespace arbiter::smt
