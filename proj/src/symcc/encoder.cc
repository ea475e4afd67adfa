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

#include "arbiter/symcc/encoder.h"

#include <cctype>
#include <stdexcept>

#include "arbiter/utf8.h"

namespace arbiter::symcc {

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "Bool", "Int", "Real", "String", "Set", "Option", "RegLan", "Array", "BitVec", "Seq", "Tuple",
      "true", "false", "not", "and", "or", "xor", "=>", "ite", "=", "distinct", "let", "forall", "exists",
      "match", "par", "as", "_", "!", "some", "none", "val", "eid", "NUMERAL", "DECIMAL", "STRING",
      "BINARY", "HEXADECIMAL", "assert", "check-sat", "declare-fun", "declare-const", "declare-datatype",
      "declare-datatypes", "define-fun", "get-model", "set-logic", "set-option", "push", "pop", "exit",
  };
  return r;
}

bool simple_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string smt_symbol(const std::string& s) {
  bool simple = !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0]));
  for (char c : s) simple = simple && simple_char(c);
  return simple ? s : "|" + s + "|";
}

std::string SymbolicEnv::fresh(const std::string& preferred) {
  std::string base;
  for (char c : preferred) base += (c == '|' || c == '\\' || c == '.') ? '_' : c;
  if (base.empty() || base[0] == '_' || base[0] == '@' || std::isdigit(static_cast<unsigned char>(base[0]))) {
    base = "u" + base;
  }
  std::string name = base;
  for (int i = 1; reserved().count(name) || sort_symbols_.count(name) || fun_symbols_.count(name); ++i) {
    name = base + "_" + std::to_string(i);
  }
  fun_symbols_.insert(name);
  return smt_symbol(name);
}

SymbolicEnv::SymbolicEnv(const Schema& schema, const RequestEnv& env) : schema_(&schema), env_(env) {
  // Request constants claim their names first so they read as in the source.
  std::vector<std::pair<Var, std::string>> vars = {{Var::Principal, fresh("principal")},
                                                   {Var::Resource, fresh("resource")}};
  if (!env_.context.attributes().empty()) vars.emplace_back(Var::Context, fresh("context"));

  for (const auto& [name, decl] : schema.entity_types) declare_entity(name);
  for (const auto& [name, decl] : schema.entity_types) {
    Sort self = entity_sort(name);
    if (!decl.attributes.attributes().empty()) {
      size_t idx = declare_record(decl.attributes.erase_singletons(), name + "Record");
      functions_.push_back(FunDecl{FunDecl::Kind::Attrs, fresh(lower_first(name) + "Attrs"), name, {}, self,
                                   Sort::datatype(datatypes_[idx].symbol)});
    }
    for (const auto& anc : decl.ancestor_types) {
      if (!schema.entity_type(anc)) continue;
      functions_.push_back(FunDecl{FunDecl::Kind::Ancestors, fresh(lower_first(name) + "In" + anc), name, anc,
                                   self, Sort::set_of(entity_sort(anc))});
    }
  }
  for (auto& [v, sym] : vars) {
    Sort s = v == Var::Principal  ? entity_sort(env_.principal_type)
             : v == Var::Resource ? entity_sort(env_.resource_type)
                                  : Sort::datatype(datatypes_[declare_record(env_.context.erase_singletons(), "Context")].symbol);
    constants_.push_back(ConstDecl{v, sym, s});
  }
}

size_t SymbolicEnv::declare_entity(const std::string& entity_type) {
  auto it = entity_index_.find(entity_type);
  if (it != entity_index_.end()) return it->second;
  DatatypeDecl d;
  d.symbol = fresh(entity_type);
  sort_symbols_.insert(d.symbol);
  d.is_entity = true;
  d.entity_type = entity_type;
  d.fields.push_back(FieldDecl{"eid", "eid", true, Type::string_type(), Sort::string()});
  datatypes_.push_back(std::move(d));
  entity_index_.emplace(entity_type, datatypes_.size() - 1);
  return datatypes_.size() - 1;
}

size_t SymbolicEnv::declare_record(const Type& record_type, const std::string& preferred) {
  for (const auto& [t, idx] : record_index_) {
    if (t == record_type) return idx;
  }
  std::vector<FieldDecl> fields;
  for (const auto& a : record_type.attributes()) {
    Sort s = sort_of(a.type);
    fields.push_back(FieldDecl{a.name, {}, a.required, a.type, a.required ? s : Sort::option_of(s)});
  }
  DatatypeDecl d;
  d.symbol = fresh(preferred.empty() ? "Record" + std::to_string(anonymous_records_++) : preferred);
  sort_symbols_.insert(d.symbol);
  d.record_type = record_type;
  for (auto& f : fields) {
    std::string raw = f.attr;
    bool taken = reserved().count(raw) || fun_symbols_.count(raw) || sort_symbols_.count(raw);
    f.selector = taken ? fresh(d.symbol + "_" + raw) : fresh(raw);
  }
  d.fields = std::move(fields);
  datatypes_.push_back(std::move(d));
  record_index_.emplace_back(record_type, datatypes_.size() - 1);
  return datatypes_.size() - 1;
}

Sort SymbolicEnv::entity_sort(const std::string& entity_type) {
  return Sort::datatype(datatypes_[declare_entity(entity_type)].symbol);
}

Sort SymbolicEnv::sort_of(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Bool:
    case Type::Kind::True:
    case Type::Kind::False: return Sort::boolean();
    case Type::Kind::Long: return Sort::bitvec();
    case Type::Kind::String: return Sort::string();
    case Type::Kind::Entity: return entity_sort(t.entity_name());
    case Type::Kind::Set: return Sort::set_of(sort_of(t.element()));
    case Type::Kind::Record: return Sort::datatype(record_decl(t).symbol);
  }
  return Sort::boolean();
}

const DatatypeDecl& SymbolicEnv::record_decl(const Type& record_type) {
  return datatypes_[declare_record(record_type.erase_singletons(), {})];
}

TermPtr SymbolicEnv::entity(const EntityRef& r) {
  Sort s = entity_sort(r.type);
  std::string ctor = s.name();
  return term::construct(std::move(ctor), std::move(s), {term::str(utf8_decode(r.id))});
}

TermPtr SymbolicEnv::variable(Var v) {
  if (v == Var::Action) return entity(env_.action);
  for (const auto& c : constants_) {
    if (c.var == v) return term::constant(c.symbol, c.sort);
  }
  // Empty context.
  return record(Type::record({}), {});
}

TermPtr SymbolicEnv::attrs_of(const std::string& entity_type, const TermPtr& e) {
  for (const auto& f : functions_) {
    if (f.kind == FunDecl::Kind::Attrs && f.entity_type == entity_type) return term::app(f.symbol, f.result, e);
  }
  return nullptr;
}

TermPtr SymbolicEnv::ancestors_of(const std::string& entity_type, const std::string& ancestor_type,
                                  const TermPtr& e) {
  for (const auto& f : functions_) {
    if (f.kind == FunDecl::Kind::Ancestors && f.entity_type == entity_type && f.ancestor_type == ancestor_type) {
      return term::app(f.symbol, f.result, e);
    }
  }
  return nullptr;
}

TermPtr SymbolicEnv::field(const Type& record_type, const std::string& attr, const TermPtr& rec) {
  const DatatypeDecl& d = record_decl(record_type);
  for (size_t i = 0; i < d.fields.size(); ++i) {
    if (d.fields[i].attr == attr) return term::select(d.fields[i].selector, i, d.fields[i].sort, rec);
  }
  throw std::logic_error("no field " + attr + " in " + record_type.to_string());
}

TermPtr SymbolicEnv::record(const Type& record_type, std::vector<TermPtr> fields) {
  const DatatypeDecl& d = record_decl(record_type);
  return term::construct(d.symbol, Sort::datatype(d.symbol), std::move(fields));
}

const DatatypeDecl* SymbolicEnv::datatype(const std::string& symbol) const {
  for (const auto& d : datatypes_) {
    if (d.symbol == symbol) return &d;
  }
  return nullptr;
}

const FunDecl* SymbolicEnv::function(const std::string& symbol) const {
  for (const auto& f : functions_) {
    if (f.symbol == symbol) return &f;
  }
  return nullptr;
}

}  // namespace arbiter::symcc
