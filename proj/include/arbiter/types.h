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

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arbiter {

class Type;

struct AttributeType;

// Static types of the policy language. True and False are the singleton
// boolean types; Bool is their common supertype.
class Type {
 public:
  enum class Kind { Bool, True, False, Long, String, Entity, Set, Record };

  Type() : kind_(Kind::Bool) {}
  static Type boolean() { return Type(Kind::Bool); }
  static Type true_type() { return Type(Kind::True); }
  static Type false_type() { return Type(Kind::False); }
  static Type long_type() { return Type(Kind::Long); }
  static Type string_type() { return Type(Kind::String); }
  static Type entity(std::string name);
  static Type set_of(Type elem);
  // Attributes are sorted by name; duplicate names are a caller bug.
  static Type record(std::vector<AttributeType> attrs);
  static Type singleton(bool b) { return b ? true_type() : false_type(); }

  Kind kind() const { return kind_; }
  bool is_boolean() const { return kind_ == Kind::Bool || kind_ == Kind::True || kind_ == Kind::False; }
  bool is_entity() const { return kind_ == Kind::Entity; }
  bool is_set() const { return kind_ == Kind::Set; }
  bool is_record() const { return kind_ == Kind::Record; }

  const std::string& entity_name() const { return name_; }
  const Type& element() const { return *elem_; }
  const std::vector<AttributeType>& attributes() const { return *attrs_; }
  const AttributeType* find_attribute(const std::string& name) const;

  // True and False replaced by Bool, recursively.
  Type erase_singletons() const;

  std::string to_string() const;

  bool operator==(const Type& other) const;

 private:
  explicit Type(Kind k) : kind_(k) {}
  Kind kind_;
  std::string name_;
  std::shared_ptr<const Type> elem_;
  std::shared_ptr<const std::vector<AttributeType>> attrs_;
};

struct AttributeType {
  std::string name;
  bool required = true;
  Type type;
  bool operator==(const AttributeType&) const = default;
};

}  // namespace arbiter
