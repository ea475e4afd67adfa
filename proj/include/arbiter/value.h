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

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace arbiter {

// A typed entity identifier, rendered `Type::"id"`. The type may be a
// `::`-separated namespace path.
struct EntityRef {
  std::string type;
  std::string id;

  auto operator<=>(const EntityRef&) const = default;
  bool operator==(const EntityRef&) const = default;

  std::string to_string() const;
};

struct EntityRefHash {
  size_t operator()(const EntityRef& r) const noexcept {
    size_t h = std::hash<std::string>{}(r.type);
    return h ^ (std::hash<std::string>{}(r.id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

class Value;
using ValueSet = std::vector<Value>;               // sorted, no duplicates
using ValueRecord = std::map<std::string, Value>;  // attribute -> value

class Value {
 public:
  enum class Kind { Bool, Long, String, Entity, Set, Record };

  Value() : data_(false) {}
  static Value boolean(bool b) { return Value(Data(std::in_place_index<0>, b)); }
  static Value integer(int64_t i) { return Value(Data(std::in_place_index<1>, i)); }
  static Value string(std::string s) { return Value(Data(std::in_place_index<2>, std::move(s))); }
  static Value entity(EntityRef r) { return Value(Data(std::in_place_index<3>, std::move(r))); }
  // Sorts and deduplicates `elems`.
  static Value set(std::vector<Value> elems);
  static Value record(ValueRecord attrs);
  static Value empty_record();

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_long() const { return kind() == Kind::Long; }
  bool is_string() const { return kind() == Kind::String; }
  bool is_entity() const { return kind() == Kind::Entity; }
  bool is_set() const { return kind() == Kind::Set; }
  bool is_record() const { return kind() == Kind::Record; }

  bool as_bool() const { return std::get<0>(data_); }
  int64_t as_long() const { return std::get<1>(data_); }
  const std::string& as_string() const { return std::get<2>(data_); }
  const EntityRef& as_entity() const { return std::get<3>(data_); }
  const ValueSet& as_set() const { return *std::get<4>(data_); }
  const ValueRecord& as_record() const { return *std::get<5>(data_); }

  // Membership in a set value; binary search over the canonical order.
  bool set_contains(const Value& v) const;

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

 private:
  using Data = std::variant<bool, int64_t, std::string, EntityRef, std::shared_ptr<const ValueSet>,
                            std::shared_ptr<const ValueRecord>>;
  explicit Value(Data d) : data_(std::move(d)) {}
  Data data_;
};

const char* kind_name(Value::Kind k);

// Escapes a string for inclusion between double quotes in policy text.
std::string escape_string(const std::string& s);

}  // namespace arbiter
