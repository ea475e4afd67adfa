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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arbiter/authorizer.h"
#include "arbiter/entities.h"
#include "arbiter/parser.h"
#include "arbiter/schema.h"

namespace arbiter::test {

inline std::string fixture_path(const std::string& rel) { return std::string(ARBITER_FIXTURES) + "/" + rel; }

inline std::string read_fixture(const std::string& rel) {
  std::ifstream in(fixture_path(rel), std::ios::binary);
  if (!in) ADD_FAILURE() << "missing fixture " << rel;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Policy> policies_from(std::string_view text) {
  auto r = parse_policies(text);
  if (!r) {
    ADD_FAILURE() << render_diagnostics(r.error(), text, "<test>");
    return {};
  }
  return *r;
}

inline std::vector<Policy> policy_fixture(const std::string& rel) { return policies_from(read_fixture(rel)); }

inline Schema schema_from(std::string_view text) {
  auto r = parse_schema(text);
  if (!r) {
    ADD_FAILURE() << render_diagnostics(r.error(), text, "<schema>");
    return {};
  }
  return *r;
}

inline Schema schema_fixture(const std::string& rel) { return schema_from(read_fixture(rel)); }

inline ExprPtr expr(std::string_view text) {
  auto r = parse_expression(text);
  if (!r) {
    ADD_FAILURE() << render_diagnostics(r.error(), text, "<expr>");
    return Expr::boolean(false);
  }
  return *r;
}

inline EntityStore store_fixture(const std::string& rel) {
  auto r = load_entities(read_fixture(rel));
  if (!r) ADD_FAILURE() << r.error().message;
  return r ? *r : EntityStore{};
}

inline Request request_fixture(const std::string& rel) {
  auto r = load_request(read_fixture(rel));
  if (!r) ADD_FAILURE() << r.error().message;
  return r ? *r : Request{};
}

inline PolicySet policy_set(std::vector<Policy> ps, std::vector<TemplateLink> links = {}) {
  auto r = PolicySet::create(std::move(ps), std::move(links));
  if (!r) ADD_FAILURE() << r.error();
  return r ? *r : PolicySet{};
}

inline EntityRef uid(std::string type, std::string id) { return EntityRef{std::move(type), std::move(id)}; }

}  // namespace arbiter::test
