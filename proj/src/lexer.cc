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

#include "lexer.h"

#include <cctype>

#include "arbiter/utf8.h"

namespace arbiter::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_reserved(std::string_view w) {
  return w == "true" || w == "false" || w == "if" || w == "then" || w == "else" || w == "in" ||
         w == "is" || w == "like" || w == "has";
}

std::vector<Token> tokenize(std::string_view src, Diagnostics& diags) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](std::string msg, size_t start, int l, int c) {
    diags.push_back({ParseDiagnostic::Severity::Error, std::move(msg), {start, i, l, c}});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    size_t start = i;
    int l = line, cc = col;
    Token t;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) advance(1);
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(start, i - start));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(start, i - start));
    } else if (c == '"') {
      advance(1);
      while (i < src.size() && src[i] != '"') advance(src[i] == '\\' ? 2 : 1);
      if (i >= src.size()) {
        error("unterminated string literal", start, l, cc);
        break;
      }
      t.kind = Token::Kind::String;
      t.text = std::string(src.substr(start + 1, i - start - 1));
      advance(1);
    } else {
      static const char* two[] = {"::", "==", "!=", "<=", ">=", "&&", "||"};
      t.kind = Token::Kind::Punct;
      for (const char* p : two) {
        if (src.substr(i, 2) == p) t.text = p;
      }
      if (t.text.empty()) {
        if (std::string_view("()[]{},;.:<>!+-*@?=").find(c) == std::string_view::npos) {
          std::string shown = std::isprint(static_cast<unsigned char>(c))
                                  ? std::string(1, c)
                                  : "\\x" + std::string(1, "0123456789abcdef"[(c >> 4) & 0xf]) +
                                        std::string(1, "0123456789abcdef"[c & 0xf]);
          advance(1);
          error("unexpected character '" + shown + "'", start, l, cc);
          break;
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    t.span = {start, i, l, cc};
    out.push_back(std::move(t));
  }
  Token end;
  end.span = {src.size(), src.size(), line, col};
  out.push_back(end);
  return out;
}

std::optional<std::string> decode_string(std::string_view raw, std::string* out, Pattern* pattern) {
  std::string lit;
  auto flush = [&] {
    if (pattern) pattern->push_literal(lit);
    else *out += lit;
    lit.clear();
  };
  for (size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '*' && pattern) {
      flush();
      pattern->push_wildcard();
      continue;
    }
    if (c != '\\') {
      lit += c;
      continue;
    }
    if (++i >= raw.size()) return "dangling backslash in string literal";
    switch (raw[i]) {
      case '"': lit += '"'; break;
      case '\'': lit += '\''; break;
      case '\\': lit += '\\'; break;
      case 'n': lit += '\n'; break;
      case 't': lit += '\t'; break;
      case 'r': lit += '\r'; break;
      case '0': lit += '\0'; break;
      case '*':
        if (!pattern) return "escape \\* is only valid in like patterns";
        lit += '*';
        break;
      case 'u': {
        if (i + 1 >= raw.size() || raw[i + 1] != '{') return "expected '{' after \\u";
        size_t close = raw.find('}', i + 2);
        if (close == std::string_view::npos) return "unterminated \\u{...} escape";
        std::string_view hex = raw.substr(i + 2, close - i - 2);
        if (hex.empty() || hex.size() > 6) return "\\u{...} escape needs 1 to 6 hex digits";
        char32_t cp = 0;
        for (char h : hex) {
          if (!std::isxdigit(static_cast<unsigned char>(h))) return "bad hex digit in \\u{...} escape";
          cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : (std::tolower(h) - 'a' + 10));
        }
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return "\\u{...} escape is not a Unicode scalar value";
        utf8_append(lit, cp);
        i = close;
        break;
      }
      default:
        return std::string("unknown escape \\") + raw[i];
    }
  }
  flush();
  return std::nullopt;
}

}  // namespace arbiter::detail
