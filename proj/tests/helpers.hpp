#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bi/model.hpp"
#include "bi/parser.hpp"
#include "bi/refinement.hpp"

namespace bi::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(BI_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Hierarchy parse_fixture(const std::string& name) {
  ParseResult r = parse(read_file(fixture_path(name)), name);
  if (!r.ok()) {
    std::string msg = "fixture " + name + " failed to parse:";
    for (const auto& e : r.errors) msg += "\n  " + e.str();
    throw std::runtime_error(msg);
  }
  return std::move(*r.hierarchy);
}

inline Hierarchy parse_ok(const std::string& source) {
  ParseResult r = parse(source, "<test>");
  if (!r.ok()) {
    std::string msg = "test source failed to parse:";
    for (const auto& e : r.errors) msg += "\n  " + e.str();
    throw std::runtime_error(msg);
  }
  return std::move(*r.hierarchy);
}

/* ---- expression shorthands ---- */

inline ExprPtr sv(const std::string& n) { return Expr::var(n, VarKind::State); }
inline ExprPtr pv(const std::string& n) { return Expr::var(n, VarKind::PrimedState); }
inline ExprPtr iv(const std::string& n) { return Expr::var(n, VarKind::Input); }
inline ExprPtr ov(const std::string& n) { return Expr::var(n, VarKind::Output); }
inline ExprPtr num(std::int64_t i) { return Expr::literal(Value::integer(i)); }
inline ExprPtr blit(bool b) { return Expr::literal(Value::boolean(b)); }
inline ExprPtr eq(ExprPtr a, ExprPtr b) {
  return Expr::binary(Expr::Kind::Eq, std::move(a), std::move(b));
}
inline ExprPtr band(ExprPtr a, ExprPtr b) {
  return Expr::binary(Expr::Kind::And, std::move(a), std::move(b));
}
inline ExprPtr lt(ExprPtr a, ExprPtr b) {
  return Expr::binary(Expr::Kind::Lt, std::move(a), std::move(b));
}

/* ---- reflexive edge ---- */

/// Flattens `cls` into a standalone base class and rechecks it against an
/// identical child: the refinement of a class by itself. Every operation of
/// the child specialises its twin.
inline Hierarchy reflexive_hierarchy(const Hierarchy& h, const std::string& cls_name) {
  const ClassSpec* cls = h.find(cls_name);
  Hierarchy out;

  ClassSpec base;
  base.name = cls_name + "Base";
  base.abstract = false;
  base.own_fields = h.effective_fields(cls_name);
  base.own_invariant = h.effective_invariant(cls_name);
  base.init = cls->init;
  base.final_cond = cls->final_cond;
  for (const std::string& op_name : h.effective_op_names(cls_name)) {
    OperationSpec op = *h.find_op_at_or_above(cls_name, op_name);
    op.mode = OpMode::Introduces;
    base.operations.push_back(std::move(op));
  }

  ClassSpec twin;
  twin.name = cls_name;
  twin.parent = base.name;
  twin.init = cls->init;
  twin.final_cond = cls->final_cond;
  for (const auto& op : base.operations) {
    OperationSpec spec = op;
    spec.mode = OpMode::Specializes;
    twin.operations.push_back(std::move(spec));
  }

  out.classes.push_back(std::move(base));
  out.classes.push_back(std::move(twin));
  return out;
}

/* ---- finding lookups ---- */

inline const Finding* find_finding(const std::vector<Finding>& findings,
                                   ObligationKind kind,
                                   const std::string& op = std::string(),
                                   const std::string& aspect = std::string()) {
  for (const auto& f : findings) {
    if (f.obligation.kind != kind) continue;
    if (!op.empty() && f.obligation.op.value_or("") != op) continue;
    if (!aspect.empty() && f.obligation.aspect.value_or("") != aspect) continue;
    return &f;
  }
  return nullptr;
}

/// The (subclass, kind, op) triples of every Fails finding in a report.
inline std::set<std::string> fails_keys(const CheckReport& report) {
  std::set<std::string> keys;
  for (const auto& edge : report.edges)
    for (const auto& f : edge.findings)
      if (f.verdict == Verdict::Fails)
        keys.insert(edge.subclass + "/" + obligation_kind_name(f.obligation.kind) +
                    "/" + f.obligation.op.value_or("-"));
  return keys;
}

inline std::vector<const Finding*> all_fails(const CheckReport& report) {
  std::vector<const Finding*> out;
  for (const auto& edge : report.edges)
    for (const auto& f : edge.findings)
      if (f.verdict == Verdict::Fails) out.push_back(&f);
  return out;
}

}  // namespace bi::test
