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

#include "arbiter/value.h"

#include <algorithm>
#include <cstdio>

namespace arbiter {

std::string EntityRef::to_string() const { return type + "::\"" + escape_string(id) + "\""; }

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return Value(Data(std::in_place_index<4>, std::make_shared<const ValueSet>(std::move(elems))));
}

Value Value::record(ValueRecord attrs) {
  return Value(Data(std::in_place_index<5>, std::make_shared<const ValueRecord>(std::move(attrs))));
}

Value Value::empty_record() {
  static const auto empty = std::make_shared<const ValueRecord>();
  return Value(Data(std::in_place_index<5>, empty));
}

bool Value::set_contains(const Value& v) const {
  const auto& s = as_set();
  return std::binary_search(s.begin(), s.end(), v);
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case Value::Kind::Bool:
      return a.as_bool() <=> b.as_bool();
    case Value::Kind::Long:
      return a.as_long() <=> b.as_long();
    case Value::Kind::String:
      return a.as_string().compare(b.as_string()) <=> 0;
    case Value::Kind::Entity:
      return a.as_entity() <=> b.as_entity();
    case Value::Kind::Set: {
      const auto& x = std::get<4>(a.data_);
      const auto& y = std::get<4>(b.data_);
      if (x == y) return std::strong_ordering::equal;
      return std::lexicographical_compare_three_way(x->begin(), x->end(), y->begin(), y->end());
    }
    case Value::Kind::Record: {
      const auto& x = std::get<5>(a.data_);
      const auto& y = std::get<5>(b.data_);
      if (x == y) return std::strong_ordering::equal;
      auto i = x->begin(), j = y->begin();
      for (; i != x->end() && j != y->end(); ++i, ++j) {
        if (auto c = i->first.compare(j->first) <=> 0; c != 0) return c;
        if (auto c = i->second <=> j->second; c != 0) return c;
      }
      return x->size() <=> y->size();
    }
  }
  return std::strong_ordering::equal;
}

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Long: return "long";
    case Value::Kind::String: return "string";
    case Value::Kind::Entity: return "entity";
    case Value::Kind::Set: return "set";
    case Value::Kind::Record: return "record";
  }
  return "?";
}

std::string escape_string(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[16];
          std::snprintf(buf, sizeof buf, "\\u{%x}", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

}  // namespace arbiter
