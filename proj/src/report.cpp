#include "bi/report.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace bi {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kReportVersion = 1;

std::string mode_name(CheckMode mode) {
  return mode == CheckMode::Blocking ? "blocking" : "nonblocking";
}

std::vector<std::string> relax_names(const CheckConfig& config) {
  std::vector<std::string> names;
  if (config.relax_virtual_ops) names.push_back("virtual-ops");
  if (config.relax_abstract_classes) names.push_back("abstract-classes");
  return names;
}

Json config_json(const CheckConfig& config) {
  Json j;
  j["mode"] = mode_name(config.mode);
  j["relax"] = relax_names(config);
  j["stateCap"] = config.state_cap;
  return j;
}

Json named_binding_json(const NamedBinding& nb) {
  Json j = Json::object();
  for (const auto& [name, value] : nb.entries) j[name] = value.str();
  return j;
}

Json finding_json(const std::string& sub, const std::string& super, const Finding& f) {
  Json j;
  j["type"] = "obligation";
  j["subclass"] = sub;
  j["superclass"] = super;
  j["kind"] = obligation_kind_name(f.obligation.kind);
  j["rule"] = rule_tag(f.obligation.kind);
  if (f.obligation.op) j["op"] = *f.obligation.op;
  if (f.obligation.aspect) j["aspect"] = *f.obligation.aspect;
  j["verdict"] = verdict_name(f.verdict);
  if (f.witness) {
    Json w = Json::object();
    if (f.witness->state) w["state"] = named_binding_json(*f.witness->state);
    if (f.witness->post_state) w["postState"] = named_binding_json(*f.witness->post_state);
    if (f.witness->input) w["input"] = named_binding_json(*f.witness->input);
    if (f.witness->output) w["output"] = named_binding_json(*f.witness->output);
    j["witness"] = std::move(w);
  }
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

Json lint_json(const LintFinding& f) {
  Json j;
  j["type"] = "lint";
  j["class"] = f.class_name;
  j["severity"] = f.severity == LintSeverity::Error ? "error" : "warning";
  j["message"] = f.message;
  j["constraint"] = print_expr(f.constraint);
  return j;
}

void render_finding_text(const std::string& op_prefix, const Finding& f,
                         std::ostream& out) {
  out << "  " << rule_tag(f.obligation.kind) << " / "
      << obligation_kind_name(f.obligation.kind);
  if (f.obligation.op) {
    out << " (" << *f.obligation.op;
    if (f.obligation.aspect) out << ", " << *f.obligation.aspect;
    out << ")";
  }
  out << ": " << verdict_name(f.verdict) << "\n";
  if (f.witness) {
    out << "    witness:";
    if (f.witness->state) out << " state " << f.witness->state->str();
    if (f.witness->input) out << " input " << f.witness->input->str();
    if (f.witness->post_state) out << " post " << f.witness->post_state->str();
    if (f.witness->output) out << " output " << f.witness->output->str();
    out << "\n";
  }
  if (!f.note.empty()) out << "    note: " << f.note << "\n";
  (void)op_prefix;
}

std::string read_file(const std::string& path, std::string& error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = "cannot open '" + path + "'";
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct LoadedSpec {
  Hierarchy hierarchy;
  std::vector<std::string> diagnostics;  // parse/validation errors, in order
};

/// Parse, structurally validate, and run the init-establishes-invariant
/// check. Any diagnostic makes the input invalid (exit 2).
std::optional<LoadedSpec> load_spec(const CliInvocation& inv, std::ostream& err,
                                    std::vector<std::string>& diagnostics) {
  std::string io_error;
  const std::string source = read_file(inv.spec_path, io_error);
  if (!io_error.empty()) {
    diagnostics.push_back(io_error);
    return std::nullopt;
  }

  ParseResult parsed = parse(source, inv.spec_path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) diagnostics.push_back(e.str());
    return std::nullopt;
  }

  LoadedSpec spec;
  spec.hierarchy = std::move(*parsed.hierarchy);

  const auto structural = validate(spec.hierarchy);
  if (!structural.empty()) {
    for (const auto& e : structural) {
      std::string where = e.class_name;
      if (!e.member.empty()) where += "." + e.member;
      diagnostics.push_back(std::string(structural_error_code_name(e.code)) +
                            (where.empty() ? "" : " at " + where) + ": " + e.message);
    }
    return std::nullopt;
  }

  // Initialisation must establish the invariant (checked, not assumed).
  Workspace ws(spec.hierarchy, inv.config.state_cap);
  for (const auto& cls : spec.hierarchy.classes) {
    if (auto w = ws.init_entailment_witness(cls.name)) {
      diagnostics.push_back(
          "class " + cls.name + ": init admits a state violating the invariant: " +
          name_binding(FieldSig::of(spec.hierarchy.effective_fields(cls.name)), *w)
              .str());
    }
  }
  if (!diagnostics.empty()) return std::nullopt;

  (void)err;
  return spec;
}

void emit_error_report(const CliInvocation& inv, const std::vector<std::string>& diags,
                       std::ostream& out, std::ostream& err) {
  if (inv.format == ReportFormat::Json) {
    Json j;
    j["version"] = kReportVersion;
    j["command"] = "error";
    j["config"] = config_json(inv.config);
    j["findings"] = Json::array();
    j["errors"] = diags;
    out << j.dump(2) << "\n";
  }
  for (const auto& d : diags) err << d << "\n";
}

/* ---- commands ------------------------------------------------------------- */

int run_check(const CliInvocation& inv, LoadedSpec& spec, std::ostream& out) {
  Workspace ws(spec.hierarchy, inv.config.state_cap);
  const CheckReport report = check_hierarchy(ws, inv.config);

  if (!inv.dump_dir.empty()) dump_relations(ws, inv.dump_dir);

  if (inv.format == ReportFormat::Json) {
    Json j;
    j["version"] = kReportVersion;
    j["command"] = "check";
    j["config"] = config_json(inv.config);
    Json findings = Json::array();
    for (const auto& edge : report.edges)
      for (const auto& f : edge.findings)
        findings.push_back(finding_json(edge.subclass, edge.superclass, f));
    j["findings"] = std::move(findings);
    j["overall"] =
        report.overall == OverallVerdict::Conformant ? "Conformant" : "NonConformant";
    j["errors"] = Json::array();
    out << j.dump(2) << "\n";
  } else {
    out << "check " << inv.spec_path << "\n";
    out << "mode: " << mode_name(inv.config.mode) << "  relaxations: ";
    const auto relax = relax_names(inv.config);
    if (relax.empty()) {
      out << "none";
    } else {
      for (std::size_t i = 0; i < relax.size(); ++i) out << (i ? "," : "") << relax[i];
    }
    out << "  state cap: " << inv.config.state_cap << "\n";
    for (const auto& edge : report.edges) {
      out << "edge " << edge.subclass << " extends " << edge.superclass << ":\n";
      for (const auto& f : edge.findings) render_finding_text("", f, out);
    }
    out << "overall: "
        << (report.overall == OverallVerdict::Conformant ? "Conformant"
                                                         : "NonConformant")
        << "\n";
  }
  return check_exit_code(report);
}

int run_lint(const CliInvocation& inv, LoadedSpec& spec, std::ostream& out) {
  const auto findings = lint_freeness(spec.hierarchy, inv.strict_freeness);

  if (inv.format == ReportFormat::Json) {
    Json j;
    j["version"] = kReportVersion;
    j["command"] = "lint";
    j["config"] = config_json(inv.config);
    Json arr = Json::array();
    for (const auto& f : findings) arr.push_back(lint_json(f));
    j["findings"] = std::move(arr);
    j["errors"] = Json::array();
    out << j.dump(2) << "\n";
  } else {
    out << "lint " << inv.spec_path << "\n";
    for (const auto& f : findings)
      out << (f.severity == LintSeverity::Error ? "error: " : "warning: ") << f.message
          << "\n    constraint: forall o : ext . " << print_expr(f.constraint) << "\n";
    if (findings.empty()) out << "clean: no global-constraint placements flagged\n";
  }
  return lint_exit_code(findings);
}

int run_trace(const CliInvocation& inv, LoadedSpec& spec, std::ostream& out) {
  Workspace ws(spec.hierarchy, inv.config.state_cap);
  const ComparisonResult result = compare_substitutability(
      ws, inv.class_a, inv.class_b, inv.depth, inv.config.mode, inv.max_depth);

  if (inv.format == ReportFormat::Json) {
    Json j;
    j["version"] = kReportVersion;
    j["command"] = "trace";
    j["config"] = config_json(inv.config);
    j["findings"] = Json::array();
    Json d;
    d["classA"] = result.class_a;
    d["classB"] = result.class_b;
    d["depth"] = result.depth;
    if (result.divergence) {
      const auto& div = *result.divergence;
      d["result"] = "divergence";
      d["step"] = div.step;
      d["reason"] = divergence_reason_name(div.reason);
      d["detail"] = div.detail;
      Json trace = Json::array();
      for (const auto& ev : div.trace) trace.push_back(ev.str());
      d["trace"] = std::move(trace);
      d["transcriptA"] = div.transcript_a;
      d["transcriptB"] = div.transcript_b;
    } else {
      d["result"] = "no-divergence";
    }
    j["divergence"] = std::move(d);
    j["errors"] = Json::array();
    out << j.dump(2) << "\n";
  } else {
    out << "trace " << inv.spec_path << " " << result.class_a << " vs "
        << result.class_b << " depth " << result.depth << " ("
        << mode_name(inv.config.mode) << ")\n";
    if (result.divergence) {
      const auto& div = *result.divergence;
      out << "divergence at step " << div.step + 1 << ": "
          << divergence_reason_name(div.reason) << "\n";
      out << "  trace:";
      for (const auto& ev : div.trace) out << " " << ev.str() << ";";
      out << "\n  detail: " << div.detail << "\n";
      out << "  system A (" << result.class_a << "):\n";
      for (const auto& line : div.transcript_a) out << "  " << line << "\n";
      out << "  system B (" << result.class_b << "):\n";
      for (const auto& line : div.transcript_b) out << "  " << line << "\n";
    } else {
      out << "no divergence up to depth " << result.depth << "\n";
    }
  }
  return trace_exit_code(result);
}

int run_dump(const CliInvocation& inv, LoadedSpec& spec, std::ostream& out) {
  Workspace ws(spec.hierarchy, inv.config.state_cap);
  dump_relations(ws, inv.dump_dir);
  out << "relations written to " << inv.dump_dir << "\n";
  return kExitOk;
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* Exit codes                                                                  */
/* -------------------------------------------------------------------------- */

int check_exit_code(const CheckReport& report) {
  return report.overall == OverallVerdict::Conformant ? kExitOk : kExitFindings;
}

int lint_exit_code(const std::vector<LintFinding>& findings) {
  for (const auto& f : findings)
    if (f.severity == LintSeverity::Error) return kExitFindings;
  return kExitOk;
}

int trace_exit_code(const ComparisonResult& result) {
  return result.no_divergence() ? kExitOk : kExitFindings;
}

/* -------------------------------------------------------------------------- */
/* Relation dumps                                                              */
/* -------------------------------------------------------------------------- */

void dump_relations(Workspace& ws, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const Hierarchy& h = ws.hierarchy();
  for (const auto& cls : h.classes) {
    for (const std::string& op_name : h.effective_op_names(cls.name)) {
      auto rel = ws.relation(cls.name, op_name);
      std::ofstream out(std::filesystem::path(dir) /
                        (cls.name + "." + op_name + ".rel"));
      for (const auto& t : rel->tuples) {
        out << binding_str(rel->space->fields, rel->space->states[t.s]) << " | "
            << binding_str(rel->inputs->sig, rel->inputs->all[t.i]) << " -> "
            << binding_str(rel->space->fields, rel->space->states[t.s2]) << " | "
            << binding_str(rel->outputs->sig, rel->outputs->all[t.o]) << "\n";
      }
    }
  }
}

/* -------------------------------------------------------------------------- */
/* Driver                                                                      */
/* -------------------------------------------------------------------------- */

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> diagnostics;
  try {
    auto spec = load_spec(inv, err, diagnostics);
    if (!spec) {
      emit_error_report(inv, diagnostics, out, err);
      return kExitInputError;
    }
    switch (inv.command) {
      case CliInvocation::Command::Check: return run_check(inv, *spec, out);
      case CliInvocation::Command::Lint: return run_lint(inv, *spec, out);
      case CliInvocation::Command::Trace: return run_trace(inv, *spec, out);
      case CliInvocation::Command::Dump: return run_dump(inv, *spec, out);
    }
    return kExitInputError;
  } catch (const StateSpaceTooLarge& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const DepthTooLarge& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const SystemError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"behavioural-inheritance conformance checker"};
  app.require_subcommand(1);

  CliInvocation inv;
  std::string mode = "nonblocking";
  std::string relax;
  std::string format = "text";

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    cmd->add_option("spec", inv.spec_path, "specification file (.bi)")->required();
    cmd->add_option("--format", format, "report format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    if (with_config) {
      cmd->add_option("--mode", mode, "refinement setting: nonblocking|blocking")
          ->check(CLI::IsMember({"nonblocking", "blocking"}));
      cmd->add_option("--state-cap", inv.config.state_cap,
                      "largest enumerable state space");
    }
  };

  CLI::App* check = app.add_subcommand("check", "discharge the conformance obligations");
  add_common(check, true);
  check->add_option("--relax", relax,
                    "comma list of relaxations: virtual-ops,abstract-classes");
  check->add_option("--dump-relations", inv.dump_dir,
                    "also write relation files to this directory");

  CLI::App* lint = app.add_subcommand("lint", "flag global-constraint placements");
  add_common(lint, false);
  lint->add_flag("--strict-freeness", inv.strict_freeness,
                 "constraints below a non-abstract ancestor become errors");

  CLI::App* trace = app.add_subcommand("trace", "bounded substitutability comparison");
  add_common(trace, true);
  trace->add_option("classA", inv.class_a, "reference class")->required();
  trace->add_option("classB", inv.class_b, "substituted class")->required();
  trace->add_option("--depth", inv.depth, "trace length bound");
  trace->add_option("--max-depth", inv.max_depth, "cap on --depth");

  CLI::App* dump = app.add_subcommand("dump", "write enumerated relations");
  add_common(dump, true);
  dump->add_option("--out", inv.dump_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }

  if (check->parsed()) inv.command = CliInvocation::Command::Check;
  if (lint->parsed()) inv.command = CliInvocation::Command::Lint;
  if (trace->parsed()) inv.command = CliInvocation::Command::Trace;
  if (dump->parsed()) inv.command = CliInvocation::Command::Dump;

  inv.config.mode = mode == "blocking" ? CheckMode::Blocking : CheckMode::NonBlocking;
  inv.format = format == "json" ? ReportFormat::Json : ReportFormat::Text;

  std::stringstream ss(relax);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "virtual-ops") {
      inv.config.relax_virtual_ops = true;
    } else if (item == "abstract-classes") {
      inv.config.relax_abstract_classes = true;
    } else if (!item.empty()) {
      err << "unknown relaxation '" << item << "'\n";
      return kExitInputError;
    }
  }

  return run(inv, out, err);
}

}  // namespace bi
