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

#include "cli.h"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "arbiter/authorizer.h"
#include "arbiter/entities.h"
#include "arbiter/evaluator.h"
#include "arbiter/parser.h"
#include "arbiter/schema.h"
#include "arbiter/smt/solver.h"
#include "arbiter/symcc/equivalence.h"
#include "arbiter/validator.h"

namespace arbiter::cli {
namespace {

using json = nlohmann::ordered_json;

// Input failures unwind to run(), which prints them and exits with kUsage.
struct InputError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Policy> load_policies(const std::string& path) {
  std::string text = read_file(path);
  auto r = parse_policies(text);
  if (!r) throw InputError{render_diagnostics(r.error(), text, path)};
  return std::move(*r);
}

PolicySet load_set(const std::string& path, const std::string& links_path) {
  std::vector<TemplateLink> links;
  if (!links_path.empty()) {
    auto l = parse_links(read_file(links_path));
    if (!l) throw InputError{links_path + ": " + l.error()};
    links = std::move(*l);
  }
  auto s = PolicySet::create(load_policies(path), std::move(links));
  if (!s) throw InputError{path + ": " + s.error()};
  return std::move(*s);
}

Schema load_schema(const std::string& path) {
  std::string text = read_file(path);
  auto r = parse_schema(text);
  if (!r) throw InputError{render_diagnostics(r.error(), text, path)};
  return std::move(*r);
}

EntityStore load_store(const std::string& path) {
  auto r = load_entities(read_file(path));
  if (!r) throw InputError{path + ": " + r.error().message};
  return std::move(*r);
}

Request load_req(const std::string& path) {
  auto r = load_request(read_file(path));
  if (!r) throw InputError{path + ": " + r.error().message};
  return std::move(*r);
}

const char* verdict_text(Decision::Verdict v) { return v == Decision::Verdict::Allow ? "ALLOW" : "DENY"; }

json decision_json(const Decision& d) {
  json errors = json::array();
  for (const auto& [id, e] : d.errors) {
    errors.push_back({{"policy", id}, {"kind", eval_error_name(e.kind)}, {"detail", e.detail}, {"at", e.trace}});
  }
  return {{"decision", verdict_text(d.verdict)},
          {"determining", json(std::vector<std::string>(d.determining.begin(), d.determining.end()))},
          {"errors", errors}};
}

void print_decision(std::ostream& out, const Decision& d, const std::string& indent = "") {
  out << verdict_text(d.verdict) << "\n";
  out << indent << "determining:";
  for (const auto& id : d.determining) out << " " << id;
  out << "\n";
  for (const auto& [id, e] : d.errors) {
    out << indent << "error in " << id << ": " << eval_error_name(e.kind) << ": " << e.detail;
    if (!e.trace.empty()) out << " at " << e.trace;
    out << "\n";
  }
}

int cmd_authorize(const std::string& policies, const std::string& links, const std::string& entities,
                  const std::string& request, const std::string& schema_path, bool no_slicing, bool as_json,
                  std::ostream& out) {
  PolicySet set = load_set(policies, links);
  EntityStore store = load_store(entities);
  if (!schema_path.empty()) store = store.with_actions(load_schema(schema_path));
  Request req = load_req(request);
  Decision d = authorize(set, store, req, !no_slicing);
  if (as_json) {
    out << decision_json(d).dump() << "\n";
  } else {
    print_decision(out, d);
  }
  return d.verdict == Decision::Verdict::Allow ? kOk : kNegative;
}

json report_json(const ValidationReport& report) {
  json policies = json::array();
  for (const auto& p : report.policies) {
    json errors = json::array();
    for (const auto& r : p.results) {
      if (!r.error) continue;
      errors.push_back({{"env", r.env.to_string()},
                        {"kind", type_error_name(r.error->kind)},
                        {"detail", r.error->detail},
                        {"at", r.error->location}});
    }
    json warnings = json::array();
    for (auto w : p.warnings) warnings.push_back(warning_name(w));
    policies.push_back({{"id", p.policy_id},
                        {"template", p.is_template},
                        {"valid", p.valid()},
                        {"errors", errors},
                        {"warnings", warnings}});
  }
  return {{"valid", report.valid()}, {"policies", policies}};
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& p : report.policies) {
    for (const auto& r : p.results) {
      if (!r.error) continue;
      out << p.policy_id << ": error in " << r.env.to_string() << ": " << type_error_name(r.error->kind) << ": "
          << r.error->detail;
      if (!r.error->location.empty()) out << " at " << r.error->location;
      out << "\n";
    }
    for (auto w : p.warnings) out << p.policy_id << ": warning: " << warning_name(w) << "\n";
  }
  out << (report.valid() ? "valid" : "invalid") << "\n";
}

int cmd_validate(const std::string& policies, const std::string& links, const std::string& schema_path,
                 bool as_json, std::ostream& out) {
  PolicySet set = load_set(policies, links);
  ValidationReport report = validate(set, load_schema(schema_path));
  if (as_json) {
    out << report_json(report).dump() << "\n";
  } else {
    print_report(out, report);
  }
  return report.valid() ? kOk : kNegative;
}

int cmd_evaluate(const std::string& text, const std::string& entities, const std::string& request,
                 std::ostream& out) {
  auto e = parse_expression(text);
  if (!e) throw InputError{render_diagnostics(e.error(), text, "<expr>")};
  EntityStore store = entities.empty() ? EntityStore{} : load_store(entities);
  Request req = request.empty() ? Request{} : load_req(request);
  auto v = evaluate(*e, store, req);
  if (!v) {
    out << "error: " << eval_error_name(v.error().kind) << ": " << v.error().detail;
    if (!v.error().trace.empty()) out << " at " << v.error().trace;
    out << "\n";
    return kNegative;
  }
  out << render_value(*v) << "\n";
  return kOk;
}

std::string key_text(const std::optional<EntityRef>& k) { return k ? k->to_string() : std::string("_"); }

int cmd_slice(const std::string& policies, const std::string& links, const std::string& entities,
              const std::string& request, bool as_json, std::ostream& out) {
  PolicySet set = load_set(policies, links);
  EntityStore store = load_store(entities);
  Request req = load_req(request);
  json rows = json::array();
  for (size_t i : slice(set.index(), store, req)) {
    const Policy& p = set.policies()[i];
    IndexKey key = PolicyIndex::key_of(p);
    if (as_json) {
      rows.push_back({{"id", p.id}, {"principal", key_text(key.first)}, {"resource", key_text(key.second)}});
    } else {
      out << p.id << " " << key_text(key.first) << " " << key_text(key.second) << "\n";
    }
  }
  if (as_json) out << json{{"selected", rows}}.dump() << "\n";
  return kOk;
}

// ---- analyze equivalence ----

std::string entity_line(const EntityRef& uid, const EntityData& d) {
  std::string s = uid.to_string();
  if (!d.ancestors.empty()) {
    s += " in [";
    bool first = true;
    for (const auto& a : d.ancestors) {
      if (!first) s += ", ";
      first = false;
      s += a.to_string();
    }
    s += "]";
  }
  if (!d.attrs.as_record().empty()) s += " " + render_value(d.attrs);
  return s;
}

// Entities of the witness, minus the schema's actions.
std::vector<std::pair<EntityRef, const EntityData*>> witness_entities(const EntityStore& store) {
  std::vector<std::pair<EntityRef, const EntityData*>> out;
  for (const auto& [uid, d] : store.entries()) {
    if (!Schema::is_action_type(uid.type)) out.emplace_back(uid, &d);
  }
  return out;
}

json witness_json(const symcc::Counterexample& c) {
  json entities = json::array();
  for (const auto& [uid, d] : witness_entities(c.store)) {
    EntityStore one = EntityStore::from_closed({{uid, *d}});
    entities.push_back(json::parse(entities_to_json(one))[0]);
  }
  return {{"request", json::parse(request_to_json(c.request))},
          {"entities", entities},
          {"old", decision_json(c.decision_old)},
          {"new", decision_json(c.decision_new)}};
}

void print_witness(std::ostream& out, const symcc::Counterexample& c) {
  const Request& r = c.request;
  out << "    request: principal=" << r.principal.to_string() << " action=" << r.action.to_string()
      << " resource=" << r.resource.to_string() << " context=" << render_value(r.context) << "\n";
  out << "    entities:\n";
  for (const auto& [uid, d] : witness_entities(c.store)) out << "      " << entity_line(uid, *d) << "\n";
  out << "    old: ";
  print_decision(out, c.decision_old, "      ");
  out << "    new: ";
  print_decision(out, c.decision_new, "      ");
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
  return out;
}

const char* action_verdict(const std::vector<const symcc::EnvVerdict*>& vs) {
  using K = symcc::EnvVerdict::Kind;
  bool differs = false, unknown = false, timeout = false;
  for (const auto* v : vs) {
    differs |= v->kind == K::Differs;
    unknown |= v->kind == K::Unknown;
    timeout |= v->kind == K::Timeout;
  }
  if (differs) return "Differs";
  if (unknown) return "Unknown";
  if (timeout) return "Timeout";
  return "Equivalent";
}

struct AnalyzeArgs {
  std::string old_path, new_path, old_links, new_links, schema, solver, emit_dir;
  int timeout_ms = 30000;
  unsigned jobs = 0;
  bool as_json = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  Schema schema = load_schema(a.schema);
  PolicySet old_set = load_set(a.old_path, a.old_links);
  PolicySet new_set = load_set(a.new_path, a.new_links);
  for (const auto& [path, set] : {std::pair{a.old_path, &old_set}, std::pair{a.new_path, &new_set}}) {
    ValidationReport report = validate(*set, schema);
    if (!report.valid()) {
      std::ostringstream ss;
      ss << path << " does not validate against " << a.schema << ":\n";
      print_report(ss, report);
      throw InputError{ss.str()};
    }
  }

  symcc::AnalysisOptions opts;
  opts.solver = smt::default_solver_config(a.solver);
  opts.solver.timeout_ms = a.timeout_ms;
  opts.jobs = a.jobs;
  auto result = symcc::analyze_equivalence(old_set, new_set, schema, opts);
  if (!result) {
    err << "error: " << symcc::analysis_error_name(result.error().kind) << ": " << result.error().message << "\n";
    return result.error().kind == symcc::AnalysisError::Kind::IllTyped ? kUsage : kInternal;
  }

  if (!a.emit_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.emit_dir, ec);
    if (ec) throw InputError{"cannot create " + a.emit_dir + ": " + ec.message()};
    size_t i = 0;
    for (const auto& v : *result) {
      ++i;
      if (v.script.empty()) continue;
      std::string name = std::to_string(i) + "-" + file_safe(v.env.action.id) + "-" + file_safe(v.env.principal_type) +
                         "-" + file_safe(v.env.resource_type) + ".smt2";
      std::ofstream f(std::filesystem::path(a.emit_dir) / name, std::ios::binary);
      f << v.script << "(get-model)\n";
      if (!f) throw InputError{"cannot write " + name};
    }
  }

  // Ordered by action name.
  std::map<std::string, std::vector<const symcc::EnvVerdict*>> by_action;
  for (const auto& v : *result) by_action[v.env.action.to_string()].push_back(&v);

  bool any_differs = false, any_inconclusive = false;
  json actions = json::array();
  for (const auto& [action, vs] : by_action) {
    std::string verdict = action_verdict(vs);
    any_differs |= verdict == "Differs";
    any_inconclusive |= verdict == "Unknown" || verdict == "Timeout";
    if (a.as_json) {
      json envs = json::array();
      for (const auto* v : vs) {
        json e = {{"env", v->env.to_string()}, {"verdict", symcc::verdict_name(v->kind)}};
        if (!v->reason.empty()) e["reason"] = v->reason;
        if (v->counterexample) e["counterexample"] = witness_json(*v->counterexample);
        envs.push_back(e);
      }
      actions.push_back({{"action", action}, {"verdict", verdict}, {"envs", envs}});
      continue;
    }
    out << action << ": " << verdict << "\n";
    for (const auto* v : vs) {
      if (v->kind == symcc::EnvVerdict::Kind::Equivalent) continue;
      out << "  " << v->env.to_string() << ": " << symcc::verdict_name(v->kind);
      if (!v->reason.empty()) out << " (" << v->reason << ")";
      out << "\n";
      if (v->counterexample) print_witness(out, *v->counterexample);
    }
  }
  const char* overall = any_differs ? "differs" : any_inconclusive ? "inconclusive" : "equivalent";
  if (a.as_json) {
    out << json{{"result", overall}, {"actions", actions}}.dump() << "\n";
  } else {
    out << overall << "\n";
  }
  if (any_differs) return kNegative;
  return any_inconclusive ? kInternal : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy evaluation, validation and equivalence analysis", "arbiter"};
  app.require_subcommand(1);

  std::string policies, links, entities, request, schema, expr_text;
  bool no_slicing = false, as_json = false;

  auto* authorize_cmd = app.add_subcommand("authorize", "Decide one request");
  authorize_cmd->add_option("--policies", policies)->required();
  authorize_cmd->add_option("--links", links, "template links (JSON)");
  authorize_cmd->add_option("--entities", entities)->required();
  authorize_cmd->add_option("--request", request)->required();
  authorize_cmd->add_option("--schema", schema, "adds the schema's actions to the store");
  authorize_cmd->add_flag("--no-slicing", no_slicing);
  authorize_cmd->add_flag("--json", as_json);

  auto* validate_cmd = app.add_subcommand("validate", "Typecheck policies against a schema");
  validate_cmd->add_option("--policies", policies)->required();
  validate_cmd->add_option("--links", links);
  validate_cmd->add_option("--schema", schema)->required();
  validate_cmd->add_flag("--json", as_json);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate one expression");
  evaluate_cmd->add_option("--expr", expr_text)->required();
  evaluate_cmd->add_option("--entities", entities);
  evaluate_cmd->add_option("--request", request);

  auto* slice_cmd = app.add_subcommand("slice", "List the policies slicing keeps for a request");
  slice_cmd->add_option("--policies", policies)->required();
  slice_cmd->add_option("--links", links);
  slice_cmd->add_option("--entities", entities)->required();
  slice_cmd->add_option("--request", request)->required();
  slice_cmd->add_flag("--json", as_json);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Symbolic analyses");
  analyze_cmd->require_subcommand(1);
  auto* equiv_cmd = analyze_cmd->add_subcommand("equivalence", "Compare two policy sets on every input");
  equiv_cmd->add_option("--old", an.old_path)->required();
  equiv_cmd->add_option("--new", an.new_path)->required();
  equiv_cmd->add_option("--old-links", an.old_links);
  equiv_cmd->add_option("--new-links", an.new_links);
  equiv_cmd->add_option("--schema", an.schema)->required();
  equiv_cmd->add_option("--solver", an.solver, "SMT solver executable (default: $SOLVER_BIN, then cvc5 on PATH)");
  equiv_cmd->add_option("--emit-smt", an.emit_dir, "write each query to this directory");
  equiv_cmd->add_option("--timeout-ms", an.timeout_ms)->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--jobs", an.jobs);
  equiv_cmd->add_flag("--json", an.as_json);

  std::vector<std::string> argv_store = {"arbiter"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run `arbiter --help` for usage\n";
    return kUsage;
  }

  try {
    if (*authorize_cmd) return cmd_authorize(policies, links, entities, request, schema, no_slicing, as_json, out);
    if (*validate_cmd) return cmd_validate(policies, links, schema, as_json, out);
    if (*evaluate_cmd) return cmd_evaluate(expr_text, entities, request, out);
    if (*slice_cmd) return cmd_slice(policies, links, entities, request, as_json, out);
    if (*equiv_cmd) return cmd_analyze(an, out, err);
  } catch (const InputError& e) {
    err << e.message;
    if (e.message.empty() || e.message.back() != '\n') err << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace arbiter::cli
