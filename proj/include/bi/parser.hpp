#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bi/model.hpp"
#include "bi/source.hpp"

namespace bi {

struct ParseError {
  SourceSpan span;
  std::string message;                 // non-empty
  std::vector<std::string> expected;   // token descriptions, when syntactic

  std::string str() const;  // "file:line:col: message"
};

struct ParseResult {
  std::optional<Hierarchy> hierarchy;  // present iff errors is empty
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty() && hierarchy.has_value(); }
};

/// Parses one specification file into a Hierarchy. Total: every failure mode
/// (lexical, syntactic, name resolution, typing) is reported as a ParseError
/// with a span inside the source. On success all names are resolved --
/// constants are inlined as literals -- and every expression type-checks.
///
/// Classes must be declared before they are named as parents.
ParseResult parse(std::string_view source, std::string filename = "<input>");

/// Canonical pretty-printer; parse(print(h)) is structurally equal to h for
/// every valid hierarchy.
std::string print(const Hierarchy& h);

/// Canonical rendering of one expression (useful in reports and dumps).
std::string print_expr(const ExprPtr& e);

}  // namespace bi
