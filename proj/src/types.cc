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

#include "arbiter/types.h"

#include <algorithm>

namespace arbiter {

Type Type::entity(std::string name) {
  Type t(Kind::Entity);
  t.name_ = std::move(name);
  return t;
}

Type Type::set_of(Type elem) {
  Type t(Kind::Set);
  t.elem_ = std::make_shared<const Type>(std::move(elem));
  return t;
}

Type Type::record(std::vector<AttributeType> attrs) {
  std::sort(attrs.begin(), attrs.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  Type t(Kind::Record);
  t.attrs_ = std::make_shared<const std::vector<AttributeType>>(std::move(attrs));
  return t;
}

const AttributeType* Type::find_attribute(const std::string& name) const {
  auto it = std::lower_bound(attrs_->begin(), attrs_->end(), name,
                             [](const AttributeType& a, const std::string& n) { return a.name < n; });
  return it != attrs_->end() && it->name == name ? &*it : nullptr;
}

Type Type::erase_singletons() const {
  switch (kind_) {
    case Kind::True:
    case Kind::False: return boolean();
    case Kind::Set: return set_of(elem_->erase_singletons());
    case Kind::Record: {
      std::vector<AttributeType> out;
      for (const auto& a : *attrs_) out.push_back({a.name, a.required, a.type.erase_singletons()});
      return record(std::move(out));
    }
    default: return *this;
  }
}

std::string Type::to_string() const {
  switch (kind_) {
    case Kind::Bool: return "Bool";
    case Kind::True: return "True";
    case Kind::False: return "False";
    case Kind::Long: return "Long";
    case Kind::String: return "String";
    case Kind::Entity: return name_;
    case Kind::Set: return "Set<" + elem_->to_string() + ">";
    case Kind::Record: {
      std::string s = "{";
      bool first = true;
      for (const auto& a : *attrs_) {
        if (!first) s += ", ";
        first = false;
        s += a.name + (a.required ? ": " : "?: ") + a.type.to_string();
      }
      return s + "}";
    }
  }
  return "?";
}

bool Type::operator==(const Type& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Entity: return name_ == o.name_;
    case Kind::Set: return *elem_ == *o.elem_;
    case Kind::Record: return attrs_ == o.attrs_ || *attrs_ == *o.attrs_;
    default: return true;
  }
}

}  // namespace arbiter
