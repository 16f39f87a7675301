#pragma once

#include <iosfwd>
#include <string>

#include "bi/parser.hpp"
#include "bi/refinement.hpp"
#include "bi/system.hpp"

namespace bi {

enum class ReportFormat { Text, Json };

/// Exit status contract: 0 success/conformant, 1 findings (non-conformance,
/// lint errors, divergence), 2 unreadable/invalid input, 3 resource caps.
constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitInputError = 2;
constexpr int kExitResource = 3;

struct CliInvocation {
  enum class Command { Check, Lint, Trace, Dump };

  Command command = Command::Check;
  std::string spec_path;
  CheckConfig config;
  ReportFormat format = ReportFormat::Text;

  // trace
  std::string class_a;
  std::string class_b;
  std::uint32_t depth = 6;
  std::uint32_t max_depth = 6;

  // lint
  bool strict_freeness = false;

  // dump (required for the dump command, optional for check)
  std::string dump_dir;
};

/// Exit codes as pure functions of the findings.
int check_exit_code(const CheckReport& report);
int lint_exit_code(const std::vector<LintFinding>& findings);
int trace_exit_code(const ComparisonResult& result);

/// Executes one invocation; reports go to `out`, diagnostics to `err`.
int run(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Full command line entry point (argument parsing plus run()).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes one relation file per (class, operation) pair under `dir`, lines
/// "state | input -> state' | output" in canonical enumeration order.
void dump_relations(Workspace& ws, const std::string& dir);

}  // namespace bi
