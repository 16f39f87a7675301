#include <sstream>

#include "bi/parser.hpp"

namespace bi {

namespace {

// Binding strength, loosest first. Parenthesisation rules mirror the parser:
// => is right-associative, comparisons are non-associative, everything else
// groups to the left.
enum Level : int {
  kImplies = 1,
  kOr = 2,
  kAnd = 3,
  kCmp = 4,
  kConcat = 5,
  kAdd = 6,
  kUnary = 7,
  kAtom = 9,
};

int level_of(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Implies: return kImplies;
    case K::Or: return kOr;
    case K::And: return kAnd;
    case K::Eq:
    case K::Ne:
    case K::Lt:
    case K::Le:
    case K::Gt:
    case K::Ge: return kCmp;
    case K::SeqAppend:
    case K::SeqConcat: return kConcat;
    case K::Add:
    case K::Sub: return kAdd;
    case K::Not:
    case K::Head:
    case K::Tail:
    case K::Len:
    case K::IsEmpty: return kUnary;
    default: return kAtom;
  }
}

/// A chain of appends rooted in the empty sequence prints as a display.
bool is_display(const Expr& e) {
  if (e.kind == Expr::Kind::EmptySeq) return true;
  return e.kind == Expr::Kind::SeqAppend && e.lhs && is_display(*e.lhs);
}

void render(const Expr& e, int min_level, std::ostream& os);

void render_display(const Expr& e, std::ostream& os) {
  std::vector<const Expr*> elems;
  const Expr* cur = &e;
  while (cur->kind == Expr::Kind::SeqAppend) {
    elems.push_back(cur->rhs.get());
    cur = cur->lhs.get();
  }
  if (elems.empty()) {
    os << "<>";
    return;
  }
  os << "<";
  for (std::size_t i = elems.size(); i-- > 0;) {
    render(*elems[i], kConcat, os);  // keep comparisons parenthesised
    if (i) os << ", ";
  }
  os << ">";
}

void render(const Expr& e, int min_level, std::ostream& os) {
  using K = Expr::Kind;
  const int lvl = level_of(e);
  const bool parens = lvl < min_level;
  if (parens) os << "(";

  switch (e.kind) {
    case K::Var: {
      os << e.name;
      switch (e.var_kind) {
        case VarKind::State: break;
        case VarKind::PrimedState: os << "'"; break;
        case VarKind::Input: os << "?"; break;
        case VarKind::Output: os << "!"; break;
      }
      break;
    }
    case K::Lit:
      os << e.lit.str();
      break;
    case K::EmptySeq:
      os << "<>";
      break;
    case K::Not:
      os << "~";
      render(*e.lhs, kUnary, os);
      break;
    case K::Len:
      os << "#";
      render(*e.lhs, kUnary, os);
      break;
    case K::Head:
      os << "head ";
      render(*e.lhs, kUnary, os);
      break;
    case K::Tail:
      os << "tail ";
      render(*e.lhs, kUnary, os);
      break;
    case K::IsEmpty:
      os << "isEmpty ";
      render(*e.lhs, kUnary, os);
      break;
    case K::Implies:
      render(*e.lhs, kOr, os);
      os << " => ";
      render(*e.rhs, kImplies, os);
      break;
    case K::Or:
      render(*e.lhs, kOr, os);
      os << " \\/ ";
      render(*e.rhs, kAnd, os);
      break;
    case K::And:
      render(*e.lhs, kAnd, os);
      os << " /\\ ";
      render(*e.rhs, kCmp, os);
      break;
    case K::Eq:
    case K::Ne:
    case K::Lt:
    case K::Le:
    case K::Gt:
    case K::Ge: {
      render(*e.lhs, kConcat, os);
      switch (e.kind) {
        case K::Eq: os << " = "; break;
        case K::Ne: os << " /= "; break;
        case K::Lt: os << " < "; break;
        case K::Le: os << " <= "; break;
        case K::Gt: os << " > "; break;
        default: os << " >= "; break;
      }
      render(*e.rhs, kConcat, os);
      break;
    }
    case K::SeqAppend: {
      if (is_display(e)) {
        render_display(e, os);
        break;
      }
      // Fold a run of appends onto one display: base ++ <x, y, z>.
      std::vector<const Expr*> elems;
      const Expr* base = &e;
      while (base->kind == K::SeqAppend && !is_display(*base)) {
        elems.push_back(base->rhs.get());
        base = base->lhs.get();
      }
      render(*base, kConcat, os);
      os << " ++ <";
      for (std::size_t i = elems.size(); i-- > 0;) {
        render(*elems[i], kConcat, os);
        if (i) os << ", ";
      }
      os << ">";
      break;
    }
    case K::SeqConcat: {
      render(*e.lhs, kConcat, os);
      os << " ++ ";
      // A display on the right would re-parse as an append chain, and a
      // sequence literal as element appends; parenthesise both.
      if ((is_display(*e.rhs) && e.rhs->kind == K::SeqAppend) ||
          (e.rhs->kind == K::Lit && e.rhs->lit.is_seq() &&
           !e.rhs->lit.as_seq().empty())) {
        os << "(";
        render(*e.rhs, 0, os);
        os << ")";
      } else {
        render(*e.rhs, kAdd, os);
      }
      break;
    }
    case K::Add:
      render(*e.lhs, kAdd, os);
      os << " + ";
      render(*e.rhs, kUnary, os);
      break;
    case K::Sub:
      render(*e.lhs, kAdd, os);
      os << " - ";
      render(*e.rhs, kUnary, os);
      break;
  }

  if (parens) os << ")";
}

void render_params(const std::vector<Param>& params, std::ostream& os) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ", ";
    os << params[i].name << " : " << params[i].domain->str();
  }
}

void render_class(const ClassSpec& c, std::ostream& os) {
  os << "class " << c.name;
  if (c.parent) os << " extends " << *c.parent;
  if (c.abstract) os << " abstract";
  os << " {\n";

  for (const auto& k : c.constants)
    os << "  const " << k.name << " : " << k.domain->str() << " = " << k.value.str()
       << ";\n";
  for (const auto& f : c.own_fields)
    os << "  var " << f.name << " : " << f.domain->str() << ";\n";
  if (!is_trivially_true(c.own_invariant))
    os << "  invariant " << print_expr(c.own_invariant) << ";\n";
  if (!is_trivially_true(c.init))
    os << "  init " << print_expr(c.init) << ";\n";
  if (!is_trivially_true(c.final_cond))
    os << "  final " << print_expr(c.final_cond) << ";\n";

  for (const auto& op : c.operations) {
    os << "  " << (op.mode == OpMode::Specializes ? "override op " : "op ")
       << op.name << "(";
    render_params(op.inputs, os);
    os << ")";
    if (!op.outputs.empty()) {
      os << " -> ";
      render_params(op.outputs, os);
    }
    os << " {\n    " << print_expr(op.body) << "\n  }\n";
  }

  os << "}\n";
}

}  // namespace

std::string print_expr(const ExprPtr& e) {
  if (!e) return "true";
  std::ostringstream os;
  render(*e, 0, os);
  return os.str();
}

std::string print(const Hierarchy& h) {
  std::ostringstream os;
  for (std::size_t i = 0; i < h.classes.size(); ++i) {
    if (i) os << "\n";
    render_class(h.classes[i], os);
  }
  if (!h.global_constraints.empty()) {
    os << "\nsystem {\n";
    for (const auto& gc : h.global_constraints)
      os << "  constraint on " << gc.class_name << " : forall o : ext . "
         << print_expr(gc.body) << ";\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace bi
