#include "typecheck.hpp"

namespace bi {

bool Type::same(const Type& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Bool:
    case Kind::Int:
    case Kind::EmptySeq:
      return true;
    case Kind::Enum:
      return enum_domain && other.enum_domain && *enum_domain == *other.enum_domain;
    case Kind::Seq:
      return elem && other.elem && elem->same(*other.elem);
  }
  return false;
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Bool:
      return "bool";
    case Kind::Int:
      return "int";
    case Kind::Enum:
      return enum_domain ? enum_domain->str() : "enum";
    case Kind::Seq:
      return "seq of " + (elem ? elem->str() : "?");
    case Kind::EmptySeq:
      return "empty sequence";
  }
  return "?";
}

std::optional<Type> unify(const Type& a, const Type& b) {
  if (a.same(b)) return a;
  if (a.kind == Type::Kind::EmptySeq && b.kind == Type::Kind::Seq) return b;
  if (b.kind == Type::Kind::EmptySeq && a.kind == Type::Kind::Seq) return a;
  return std::nullopt;
}

Type type_of_domain(const Domain& d) {
  switch (d.kind) {
    case Domain::Kind::Bool:
      return Type::boolean();
    case Domain::Kind::Int:
      return Type::integer();
    case Domain::Kind::Enum:
      // Share the original domain object so literal values print correctly.
      return Type::enumeration(std::make_shared<Domain>(d));
    case Domain::Kind::Seq:
      return Type::seq(d.elem ? type_of_domain(*d.elem) : Type::boolean());
  }
  return Type::boolean();
}

namespace {

const char* var_kind_word(VarKind k) {
  switch (k) {
    case VarKind::State: return "state variable";
    case VarKind::PrimedState: return "primed state variable";
    case VarKind::Input: return "input";
    case VarKind::Output: return "output";
  }
  return "variable";
}

std::string decorate(const std::string& name, VarKind k) {
  switch (k) {
    case VarKind::State: return name;
    case VarKind::PrimedState: return name + "'";
    case VarKind::Input: return name + "?";
    case VarKind::Output: return name + "!";
  }
  return name;
}

class Checker {
 public:
  Checker(const ExprScope& scope, std::vector<TypeIssue>& issues)
      : scope_(scope), issues_(issues) {}

  std::optional<Type> check(const ExprPtr& e) {
    if (!e) {
      report({}, "missing expression");
      return std::nullopt;
    }
    using K = Expr::Kind;
    switch (e->kind) {
      case K::Var:
        return check_var(*e);
      case K::Lit:
        return type_of_value(e->lit, e->span);
      case K::EmptySeq:
        return Type::empty_seq();
      case K::Not: {
        auto t = expect(e->lhs, Type::boolean(), "~");
        return t ? std::optional<Type>(Type::boolean()) : std::nullopt;
      }
      case K::Head:
      case K::Tail: {
        auto t = check(e->lhs);
        if (!t) return std::nullopt;
        if (t->kind == Type::Kind::Seq)
          return e->kind == K::Head ? *t->elem : *t;
        if (t->kind == Type::Kind::EmptySeq) {
          if (e->kind == K::Tail) return Type::empty_seq();
          report(e->span, "cannot infer the element type of 'head <>'");
          return std::nullopt;
        }
        report(e->span, std::string(e->kind == K::Head ? "head" : "tail") +
                            " applied to " + t->str());
        return std::nullopt;
      }
      case K::Len: {
        auto t = check(e->lhs);
        if (!t) return std::nullopt;
        if (t->kind != Type::Kind::Seq && t->kind != Type::Kind::EmptySeq) {
          report(e->span, "# applied to " + t->str());
          return std::nullopt;
        }
        return Type::integer();
      }
      case K::IsEmpty: {
        auto t = check(e->lhs);
        if (!t) return std::nullopt;
        if (t->kind != Type::Kind::Seq && t->kind != Type::Kind::EmptySeq) {
          report(e->span, "isEmpty applied to " + t->str());
          return std::nullopt;
        }
        return Type::boolean();
      }
      case K::Eq:
      case K::Ne: {
        auto l = check(e->lhs);
        auto r = check(e->rhs);
        if (!l || !r) return std::nullopt;
        if (!unify(*l, *r)) {
          report(e->span, "cannot compare " + l->str() + " with " + r->str());
          return std::nullopt;
        }
        return Type::boolean();
      }
      case K::Lt:
      case K::Le:
      case K::Gt:
      case K::Ge: {
        bool ok = expect(e->lhs, Type::integer(), "comparison").has_value();
        ok = expect(e->rhs, Type::integer(), "comparison").has_value() && ok;
        return ok ? std::optional<Type>(Type::boolean()) : std::nullopt;
      }
      case K::Add:
      case K::Sub: {
        bool ok = expect(e->lhs, Type::integer(), "arithmetic").has_value();
        ok = expect(e->rhs, Type::integer(), "arithmetic").has_value() && ok;
        return ok ? std::optional<Type>(Type::integer()) : std::nullopt;
      }
      case K::And:
      case K::Or:
      case K::Implies: {
        bool ok = expect(e->lhs, Type::boolean(), "logical operator").has_value();
        ok = expect(e->rhs, Type::boolean(), "logical operator").has_value() && ok;
        return ok ? std::optional<Type>(Type::boolean()) : std::nullopt;
      }
      case K::SeqAppend: {
        auto s = check(e->lhs);
        auto x = check(e->rhs);
        if (!s || !x) return std::nullopt;
        if (s->kind == Type::Kind::EmptySeq) return Type::seq(*x);
        if (s->kind != Type::Kind::Seq) {
          report(e->span, "cannot append to " + s->str());
          return std::nullopt;
        }
        if (!unify(*s->elem, *x)) {
          report(e->span, "appending " + x->str() + " to " + s->str());
          return std::nullopt;
        }
        return *s;
      }
      case K::SeqConcat: {
        auto l = check(e->lhs);
        auto r = check(e->rhs);
        if (!l || !r) return std::nullopt;
        const bool l_seq =
            l->kind == Type::Kind::Seq || l->kind == Type::Kind::EmptySeq;
        const bool r_seq =
            r->kind == Type::Kind::Seq || r->kind == Type::Kind::EmptySeq;
        if (!l_seq || !r_seq) {
          report(e->span, "cannot concatenate " + l->str() + " with " + r->str());
          return std::nullopt;
        }
        if (auto u = unify(*l, *r)) return *u;
        report(e->span, "cannot concatenate " + l->str() + " with " + r->str());
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<Type> check_var(const Expr& e) {
    const std::vector<Param>* sig = nullptr;
    switch (e.var_kind) {
      case VarKind::State: sig = scope_.state; break;
      case VarKind::PrimedState: sig = scope_.primed; break;
      case VarKind::Input: sig = scope_.inputs; break;
      case VarKind::Output: sig = scope_.outputs; break;
    }
    if (!sig) {
      report(e.span, std::string(var_kind_word(e.var_kind)) + " '" +
                         decorate(e.name, e.var_kind) + "' is not allowed here");
      return std::nullopt;
    }
    for (const auto& p : *sig)
      if (p.name == e.name) return type_of_domain(*p.domain);
    report(e.span, std::string("unknown ") + var_kind_word(e.var_kind) + " '" +
                       decorate(e.name, e.var_kind) + "'");
    return std::nullopt;
  }

  std::optional<Type> type_of_value(const Value& v, const SourceSpan& span) {
    if (v.is_bool()) return Type::boolean();
    if (v.is_int()) return Type::integer();
    if (v.is_enum()) return Type::enumeration(v.as_enum().domain);
    const auto& s = v.as_seq();
    if (s.empty()) return Type::empty_seq();
    auto t = type_of_value(s[0], span);
    for (std::size_t i = 1; t && i < s.size(); ++i) {
      auto ti = type_of_value(s[i], span);
      if (!ti || !unify(*t, *ti)) {
        report(span, "mixed element types in sequence literal");
        return std::nullopt;
      }
    }
    return t ? std::optional<Type>(Type::seq(*t)) : std::nullopt;
  }

  std::optional<Type> expect(const ExprPtr& e, const Type& want, const char* where) {
    auto t = check(e);
    if (!t) return std::nullopt;
    if (auto u = unify(*t, want)) return u;
    report(e->span,
           std::string(where) + " expects " + want.str() + ", got " + t->str());
    return std::nullopt;
  }

  void report(const SourceSpan& span, std::string message) {
    issues_.push_back({span, scope_.member, std::move(message)});
  }

  const ExprScope& scope_;
  std::vector<TypeIssue>& issues_;
};

}  // namespace

std::vector<TypeIssue> typecheck_predicate(const ExprPtr& e, const ExprScope& scope) {
  std::vector<TypeIssue> issues;
  Checker checker(scope, issues);
  if (auto t = checker.check(e)) {
    if (t->kind != Type::Kind::Bool)
      issues.push_back({e ? e->span : SourceSpan{}, scope.member,
                        "expected a boolean predicate, got " + t->str()});
  }
  return issues;
}

std::vector<TypeIssue> typecheck_class(const Hierarchy& h, const ClassSpec& c) {
  std::vector<TypeIssue> issues;
  const std::vector<Param> fields = h.effective_fields(c.name);

  auto run = [&](const ExprPtr& e, ExprScope scope) {
    auto got = typecheck_predicate(e, scope);
    issues.insert(issues.end(), got.begin(), got.end());
  };

  run(c.own_invariant, {&fields, nullptr, nullptr, nullptr, "invariant"});
  run(c.init, {nullptr, &fields, nullptr, nullptr, "init"});
  run(c.final_cond, {&fields, nullptr, nullptr, nullptr, "final"});
  for (const auto& op : c.operations)
    run(op.body, {&fields, &fields, &op.inputs, &op.outputs, op.name});
  return issues;
}

std::vector<TypeIssue> typecheck_constraint(const Hierarchy& h, const ClassSpec& c,
                                            const ExprPtr& body) {
  const std::vector<Param> fields = h.effective_fields(c.name);
  return typecheck_predicate(body, {&fields, nullptr, nullptr, nullptr, "constraint"});
}

}  // namespace bi
