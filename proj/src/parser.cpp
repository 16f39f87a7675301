#include "bi/parser.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "lexer.hpp"
#include "typecheck.hpp"

namespace bi {

std::string ParseError::str() const {
  std::ostringstream os;
  os << span.file << ":" << span.start_line << ":" << span.start_col << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i)
      os << (i ? " or " : "") << expected[i];
    os << ")";
  }
  return os.str();
}

namespace {

constexpr std::size_t kMaxErrors = 50;

SourceSpan join_spans(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end_line = b.end_line;
  s.end_col = b.end_col;
  return s;
}

/// Name-resolution environment for one class context.
struct ResolveScope {
  std::map<std::string, DomainPtr> fields;                          // effective
  std::map<std::string, std::pair<DomainPtr, Value>> constants;     // chain
  std::vector<DomainPtr> enums;                                     // visible
};

void add_visible_enum(std::vector<DomainPtr>& enums, const DomainPtr& d) {
  if (!d) return;
  if (d->kind == Domain::Kind::Seq) {
    add_visible_enum(enums, d->elem);
    return;
  }
  if (d->kind != Domain::Kind::Enum) return;
  for (const auto& e : enums)
    if (*e == *d) return;
  enums.push_back(d);
}

class Parser {
 public:
  Parser(std::string_view source, std::string filename)
      : filename_(std::move(filename)) {
    tokens_ = lex(source, filename_, errors_);
  }

  ParseResult run() {
    parse_spec();
    ParseResult result;
    result.errors = std::move(errors_);
    if (result.errors.empty()) result.hierarchy = std::move(h_);
    return result;
  }

 private:
  /* ---- token plumbing ---- */

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    take();
    return true;
  }

  void error_at(const SourceSpan& span, std::string message,
                std::vector<std::string> expected = {}) {
    if (errors_.size() < kMaxErrors)
      errors_.push_back({span, std::move(message), std::move(expected)});
  }

  const Token* expect(Tok kind, const char* context) {
    if (at(kind)) return &take();
    error_at(peek().span,
             std::string("unexpected ") + token_description(peek().kind) +
                 (context ? std::string(" in ") + context : std::string()),
             {token_description(kind)});
    return nullptr;
  }

  /// Skips to the next plausible member/declaration boundary.
  void sync_member() {
    while (!at(Tok::Eof) && !at(Tok::RBrace)) {
      if (accept(Tok::Semi)) return;
      take();
    }
  }
  void sync_class() {
    while (!at(Tok::Eof) && !at(Tok::KwClass) && !at(Tok::KwSystem)) take();
  }

  /* ---- grammar ---- */

  void parse_spec() {
    if (!at(Tok::KwClass)) {
      error_at(peek().span, "expected 'class'", {token_description(Tok::KwClass)});
      if (at(Tok::Eof)) return;
    }
    while (!at(Tok::Eof)) {
      if (at(Tok::KwClass)) {
        parse_class();
      } else if (at(Tok::KwSystem)) {
        parse_system();
        break;
      } else {
        error_at(peek().span,
                 std::string("unexpected ") + token_description(peek().kind),
                 {token_description(Tok::KwClass), token_description(Tok::KwSystem)});
        sync_class();
      }
    }
    if (!at(Tok::Eof))
      error_at(peek().span, "trailing input after system block",
               {token_description(Tok::Eof)});
  }

  void parse_class() {
    take();  // 'class'
    const Token* name = expect(Tok::Ident, "class declaration");
    if (!name) {
      sync_class();
      return;
    }
    ClassSpec cls;
    cls.name = name->text;

    if (accept(Tok::KwExtends)) {
      const Token* parent = expect(Tok::Ident, "class declaration");
      if (!parent) {
        sync_class();
        return;
      }
      if (!h_.find(parent->text)) {
        error_at(parent->span, "unknown parent class '" + parent->text +
                                   "' (classes must be declared before use)");
      }
      cls.parent = parent->text;
    }
    cls.abstract = accept(Tok::KwAbstract);

    if (!expect(Tok::LBrace, "class declaration")) {
      sync_class();
      return;
    }

    // Expression bodies are resolved and type-checked once the whole block
    // has been read, so member order inside a class does not matter.
    struct Pending {
      enum What { Invariant, Init, Final, OpBody } what;
      std::size_t op_index = 0;
      ExprPtr expr;
    };
    std::vector<Pending> pending;

    while (!at(Tok::RBrace) && !at(Tok::Eof)) {
      switch (peek().kind) {
        case Tok::KwVar: {
          take();
          const Token* fname = expect(Tok::Ident, "field declaration");
          if (!fname || !expect(Tok::Colon, "field declaration")) {
            sync_member();
            break;
          }
          DomainPtr d = parse_domain();
          if (!d) {
            sync_member();
            break;
          }
          expect(Tok::Semi, "field declaration");
          cls.own_fields.push_back({fname->text, d});
          break;
        }
        case Tok::KwConst: {
          take();
          const Token* kname = expect(Tok::Ident, "constant declaration");
          if (!kname || !expect(Tok::Colon, "constant declaration")) {
            sync_member();
            break;
          }
          DomainPtr d = parse_domain();
          if (!d) {
            sync_member();
            break;
          }
          if (!expect(Tok::EqOp, "constant declaration")) {
            sync_member();
            break;
          }
          const SourceSpan value_span = peek().span;
          auto v = parse_const_literal(d);
          if (!v) {
            sync_member();
            break;
          }
          if (!value_in_domain(*v, *d))
            error_at(value_span, "constant value " + v->str() + " is outside " +
                                     d->str());
          expect(Tok::Semi, "constant declaration");
          cls.constants.push_back({kname->text, d, *v});
          break;
        }
        case Tok::KwInvariant:
        case Tok::KwInit:
        case Tok::KwFinal: {
          Tok kw = take().kind;
          ExprPtr e = parse_expr();
          if (!e) {
            sync_member();
            break;
          }
          expect(Tok::Semi, "clause");
          Pending::What what = kw == Tok::KwInvariant ? Pending::Invariant
                               : kw == Tok::KwInit    ? Pending::Init
                                                      : Pending::Final;
          pending.push_back({what, 0, std::move(e)});
          break;
        }
        case Tok::KwOp:
        case Tok::KwOverride: {
          bool overrides = accept(Tok::KwOverride);
          if (!expect(Tok::KwOp, "operation declaration")) {
            sync_member();
            break;
          }
          const Token* oname = expect(Tok::Ident, "operation declaration");
          if (!oname || !expect(Tok::LParen, "operation declaration")) {
            sync_member();
            break;
          }
          OperationSpec op;
          op.name = oname->text;
          op.mode = overrides ? OpMode::Specializes : OpMode::Introduces;
          if (!at(Tok::RParen) && !parse_params(op.inputs)) {
            sync_member();
            break;
          }
          if (!expect(Tok::RParen, "operation declaration")) {
            sync_member();
            break;
          }
          if (accept(Tok::Arrow) && !parse_params(op.outputs)) {
            sync_member();
            break;
          }
          if (!expect(Tok::LBrace, "operation body")) {
            sync_member();
            break;
          }
          ExprPtr body = parse_expr();
          if (!body) {
            // Recover to the op's closing brace.
            while (!at(Tok::Eof) && !at(Tok::RBrace)) take();
            accept(Tok::RBrace);
            break;
          }
          expect(Tok::RBrace, "operation body");
          op.body = Expr::truth();  // replaced after resolution
          cls.operations.push_back(std::move(op));
          pending.push_back({Pending::OpBody, cls.operations.size() - 1, std::move(body)});
          break;
        }
        default:
          error_at(peek().span,
                   std::string("unexpected ") + token_description(peek().kind) +
                       " in class body",
                   {"'var'", "'const'", "'invariant'", "'init'", "'final'", "'op'",
                    "'override'", "'}'"});
          sync_member();
          break;
      }
    }
    expect(Tok::RBrace, "class declaration");

    // Resolve and type-check all pending expressions against the finished
    // class, then fold repeated clauses into conjunctions.
    const std::vector<Param> parent_fields =
        cls.parent && h_.find(*cls.parent) ? h_.effective_fields(*cls.parent)
                                           : std::vector<Param>{};
    std::vector<Param> fields = parent_fields;
    fields.insert(fields.end(), cls.own_fields.begin(), cls.own_fields.end());

    ResolveScope rs = make_scope(cls, fields);

    for (auto& p : pending) {
      const OperationSpec* op =
          p.what == Pending::OpBody ? &cls.operations[p.op_index] : nullptr;
      ResolveScope scoped = rs;
      if (op) {
        for (const auto& prm : op->inputs) add_visible_enum(scoped.enums, prm.domain);
        for (const auto& prm : op->outputs) add_visible_enum(scoped.enums, prm.domain);
      }
      ExprPtr resolved = canonicalize(resolve_expr(p.expr, scoped));

      ExprScope ts;
      switch (p.what) {
        case Pending::Invariant:
          ts = {&fields, nullptr, nullptr, nullptr, "invariant"};
          break;
        case Pending::Init:
          ts = {nullptr, &fields, nullptr, nullptr, "init"};
          break;
        case Pending::Final:
          ts = {&fields, nullptr, nullptr, nullptr, "final"};
          break;
        case Pending::OpBody:
          ts = {&fields, &fields, &op->inputs, &op->outputs, op->name};
          break;
      }
      for (const auto& issue : typecheck_predicate(resolved, ts))
        error_at(issue.span.file.empty() ? resolved->span : issue.span, issue.message);

      switch (p.what) {
        case Pending::Invariant:
          cls.own_invariant = conjoin(cls.own_invariant, resolved);
          break;
        case Pending::Init:
          cls.init = conjoin(cls.init, resolved);
          break;
        case Pending::Final:
          cls.final_cond = conjoin(cls.final_cond, resolved);
          break;
        case Pending::OpBody:
          cls.operations[p.op_index].body = resolved;
          break;
      }
    }

    h_.classes.push_back(std::move(cls));
  }

  void parse_system() {
    take();  // 'system'
    if (!expect(Tok::LBrace, "system block")) return;
    while (!at(Tok::RBrace) && !at(Tok::Eof)) {
      if (!at(Tok::KwConstraint)) {
        error_at(peek().span,
                 std::string("unexpected ") + token_description(peek().kind) +
                     " in system block",
                 {"'constraint'", "'}'"});
        sync_member();
        continue;
      }
      take();
      if (!expect(Tok::KwOn, "constraint")) {
        sync_member();
        continue;
      }
      const Token* cname = expect(Tok::Ident, "constraint");
      if (!cname || !expect(Tok::Colon, "constraint")) {
        sync_member();
        continue;
      }
      if (!expect(Tok::KwForall, "constraint")) {
        sync_member();
        continue;
      }
      // The bound variable name is documentation; the body refers to the
      // member object's state fields directly.
      if (!expect(Tok::Ident, "constraint") || !expect(Tok::Colon, "constraint") ||
          !expect(Tok::KwExt, "constraint") || !expect(Tok::Dot, "constraint")) {
        sync_member();
        continue;
      }
      ExprPtr body = parse_expr();
      if (!body) {
        sync_member();
        continue;
      }
      expect(Tok::Semi, "constraint");

      const ClassSpec* cls = h_.find(cname->text);
      if (!cls) {
        error_at(cname->span, "constraint on unknown class '" + cname->text + "'");
        continue;
      }
      const std::vector<Param> fields = h_.effective_fields(cls->name);
      ResolveScope rs = make_scope(*cls, fields);
      ExprPtr resolved = canonicalize(resolve_expr(body, rs));
      for (const auto& issue : typecheck_predicate(
               resolved, {&fields, nullptr, nullptr, nullptr, "constraint"}))
        error_at(issue.span.file.empty() ? resolved->span : issue.span, issue.message);
      h_.global_constraints.push_back({cname->text, resolved});
    }
    expect(Tok::RBrace, "system block");
  }

  bool parse_params(std::vector<Param>& out) {
    while (true) {
      const Token* pname = expect(Tok::Ident, "parameter list");
      if (!pname || !expect(Tok::Colon, "parameter list")) return false;
      DomainPtr d = parse_domain();
      if (!d) return false;
      out.push_back({pname->text, d});
      if (!accept(Tok::Comma)) return true;
    }
  }

  DomainPtr parse_domain() {
    switch (peek().kind) {
      case Tok::KwBool:
        take();
        return Domain::boolean();
      case Tok::KwInt: {
        take();
        auto lo = parse_signed_int();
        if (!lo || !expect(Tok::DotDot, "integer domain")) return nullptr;
        auto hi = parse_signed_int();
        if (!hi) return nullptr;
        return Domain::int_range(*lo, *hi);
      }
      case Tok::KwEnum: {
        take();
        if (!expect(Tok::LBrace, "enum domain")) return nullptr;
        std::vector<std::string> lits;
        while (true) {
          const Token* lit = expect(Tok::Ident, "enum domain");
          if (!lit) return nullptr;
          lits.push_back(lit->text);
          if (!accept(Tok::Comma)) break;
        }
        if (!expect(Tok::RBrace, "enum domain")) return nullptr;
        return Domain::enumeration("", std::move(lits));
      }
      case Tok::KwSeq: {
        take();
        if (!expect(Tok::LParen, "sequence domain")) return nullptr;
        DomainPtr elem = parse_domain();
        if (!elem || !expect(Tok::Comma, "sequence domain")) return nullptr;
        const Token* len = expect(Tok::IntLit, "sequence domain");
        if (!len || !expect(Tok::RParen, "sequence domain")) return nullptr;
        if (elem->kind == Domain::Kind::Seq)
          error_at(peek().span, "nested sequence domains are not supported");
        return Domain::bounded_seq(elem, static_cast<std::uint32_t>(len->int_value));
      }
      default:
        error_at(peek().span,
                 std::string("unexpected ") + token_description(peek().kind) +
                     " in domain",
                 {"'bool'", "'int'", "'enum'", "'seq'"});
        return nullptr;
    }
  }

  std::optional<std::int64_t> parse_signed_int() {
    bool neg = accept(Tok::Minus);
    const Token* t = expect(Tok::IntLit, "integer");
    if (!t) return std::nullopt;
    return neg ? -t->int_value : t->int_value;
  }

  /// A literal value of the given domain (constant initialisers).
  std::optional<Value> parse_const_literal(const DomainPtr& d) {
    switch (peek().kind) {
      case Tok::KwTrue:
        take();
        return Value::boolean(true);
      case Tok::KwFalse:
        take();
        return Value::boolean(false);
      case Tok::Minus:
      case Tok::IntLit: {
        auto i = parse_signed_int();
        if (!i) return std::nullopt;
        return Value::integer(*i);
      }
      case Tok::Ident: {
        const Token& t = take();
        const Domain* target = d.get();
        if (target && target->kind == Domain::Kind::Seq && target->elem)
          target = target->elem.get();
        if (target && target->kind == Domain::Kind::Enum) {
          for (std::uint32_t i = 0; i < target->literals.size(); ++i)
            if (target->literals[i] == t.text)
              return Value::enum_lit(
                  target == d.get() ? d : d->elem, i);
        }
        error_at(t.span, "'" + t.text + "' is not a literal of " +
                             (d ? d->str() : std::string("the declared domain")));
        return std::nullopt;
      }
      case Tok::EmptySeqTok:
        take();
        return Value::seq({});
      case Tok::Lt: {
        take();
        Value::SeqV elems;
        DomainPtr elem_domain = d && d->kind == Domain::Kind::Seq ? d->elem : nullptr;
        while (true) {
          auto v = parse_const_literal(elem_domain ? elem_domain : d);
          if (!v) return std::nullopt;
          elems.push_back(*v);
          if (!accept(Tok::Comma)) break;
        }
        if (!expect(Tok::Gt, "sequence literal")) return std::nullopt;
        return Value::seq(std::move(elems));
      }
      default:
        error_at(peek().span,
                 std::string("unexpected ") + token_description(peek().kind) +
                     " in literal",
                 {"'true'", "'false'", "integer", "identifier", "'<>'", "'<'"});
        return std::nullopt;
    }
  }

  /* ---- expressions ---- */

  // Precedence, loosest first: => | \/ | /\ | comparisons | ++ | + - | unary.

  static constexpr int kMaxExprDepth = 200;

  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (!lhs) return nullptr;
    if (accept(Tok::ImpliesOp)) {
      ExprPtr rhs = parse_implies();  // right associative
      if (!rhs) return nullptr;
      return Expr::binary(Expr::Kind::Implies, lhs, rhs, join_spans(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    if (!lhs) return nullptr;
    while (accept(Tok::OrOp)) {
      ExprPtr rhs = parse_and();
      if (!rhs) return nullptr;
      lhs = Expr::binary(Expr::Kind::Or, lhs, rhs, join_spans(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_cmp();
    if (!lhs) return nullptr;
    while (accept(Tok::AndOp)) {
      ExprPtr rhs = parse_cmp();
      if (!rhs) return nullptr;
      lhs = Expr::binary(Expr::Kind::And, lhs, rhs, join_spans(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_concat();
    if (!lhs) return nullptr;
    Expr::Kind k;
    switch (peek().kind) {
      case Tok::EqOp: k = Expr::Kind::Eq; break;
      case Tok::NeOp: k = Expr::Kind::Ne; break;
      case Tok::Lt: k = Expr::Kind::Lt; break;
      case Tok::Le: k = Expr::Kind::Le; break;
      case Tok::Gt: k = Expr::Kind::Gt; break;
      case Tok::Ge: k = Expr::Kind::Ge; break;
      default: return lhs;
    }
    take();
    ExprPtr rhs = parse_concat();
    if (!rhs) return nullptr;
    return Expr::binary(k, lhs, rhs, join_spans(lhs->span, rhs->span));
  }

  ExprPtr parse_concat() {
    ExprPtr lhs = parse_add();
    if (!lhs) return nullptr;
    while (accept(Tok::ConcatOp)) {
      // `xs ++ <e1, ..., en>` appends the listed elements one by one;
      // any other right-hand side is a general concatenation.
      if (at(Tok::Lt)) {
        take();
        while (true) {
          ExprPtr elem = parse_concat();  // below comparisons: '>' closes
          if (!elem) return nullptr;
          lhs = Expr::binary(Expr::Kind::SeqAppend, lhs, elem,
                             join_spans(lhs->span, elem->span));
          if (!accept(Tok::Comma)) break;
        }
        if (!expect(Tok::Gt, "sequence display")) return nullptr;
      } else if (at(Tok::EmptySeqTok)) {
        const Token& t = take();
        lhs = Expr::binary(Expr::Kind::SeqConcat, lhs, Expr::empty_seq(t.span),
                           join_spans(lhs->span, t.span));
      } else {
        ExprPtr rhs = parse_add();
        if (!rhs) return nullptr;
        lhs = Expr::binary(Expr::Kind::SeqConcat, lhs, rhs,
                           join_spans(lhs->span, rhs->span));
      }
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_unary();
    if (!lhs) return nullptr;
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Expr::Kind k = take().kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      ExprPtr rhs = parse_unary();
      if (!rhs) return nullptr;
      lhs = Expr::binary(k, lhs, rhs, join_spans(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (expr_depth_ >= kMaxExprDepth) {
      error_at(peek().span, "expression nests too deeply");
      return nullptr;
    }
    ++expr_depth_;
    ExprPtr e = parse_unary_inner();
    --expr_depth_;
    return e;
  }

  ExprPtr parse_unary_inner() {
    Expr::Kind k;
    switch (peek().kind) {
      case Tok::NotOp: k = Expr::Kind::Not; break;
      case Tok::Hash: k = Expr::Kind::Len; break;
      case Tok::KwHead: k = Expr::Kind::Head; break;
      case Tok::KwTail: k = Expr::Kind::Tail; break;
      case Tok::KwIsEmpty: k = Expr::Kind::IsEmpty; break;
      default: return parse_atom();
    }
    const Token& t = take();
    ExprPtr operand = parse_unary();
    if (!operand) return nullptr;
    return Expr::unary(k, operand, join_spans(t.span, operand->span));
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwTrue:
        take();
        return Expr::literal(Value::boolean(true), t.span);
      case Tok::KwFalse:
        take();
        return Expr::literal(Value::boolean(false), t.span);
      case Tok::IntLit:
        take();
        return Expr::literal(Value::integer(t.int_value), t.span);
      case Tok::Minus: {
        take();
        const Token* i = expect(Tok::IntLit, "negative literal");
        if (!i) return nullptr;
        return Expr::literal(Value::integer(-i->int_value), join_spans(t.span, i->span));
      }
      case Tok::Ident: {
        take();
        VarKind k = VarKind::State;
        switch (t.dec) {
          case Decoration::None: k = VarKind::State; break;
          case Decoration::Prime: k = VarKind::PrimedState; break;
          case Decoration::Question: k = VarKind::Input; break;
          case Decoration::Bang: k = VarKind::Output; break;
        }
        return Expr::var(t.text, k, t.span);
      }
      case Tok::EmptySeqTok:
        take();
        return Expr::empty_seq(t.span);
      case Tok::Lt: {
        // Sequence display: a chain of appends to the empty sequence. A
        // later pass collapses all-literal chains into sequence literals.
        take();
        ExprPtr acc = Expr::empty_seq(t.span);
        while (true) {
          ExprPtr e = parse_concat();  // below comparisons: '>' closes
          if (!e) return nullptr;
          acc = Expr::binary(Expr::Kind::SeqAppend, acc, e, join_spans(t.span, e->span));
          if (!accept(Tok::Comma)) break;
        }
        if (!expect(Tok::Gt, "sequence display")) return nullptr;
        return acc;
      }
      case Tok::LParen: {
        take();
        ExprPtr e = parse_expr();
        if (!e) return nullptr;
        if (!expect(Tok::RParen, "parenthesised expression")) return nullptr;
        return e;
      }
      default:
        error_at(t.span,
                 std::string("unexpected ") + token_description(t.kind) +
                     " in expression",
                 {"identifier", "literal", "'('", "'<'", "'<>'", "'~'", "'#'",
                  "'head'", "'tail'", "'isEmpty'"});
        return nullptr;
    }
  }

  /* ---- name resolution ---- */

  ResolveScope make_scope(const ClassSpec& cls, const std::vector<Param>& fields) {
    ResolveScope rs;
    for (const auto& f : fields) {
      rs.fields[f.name] = f.domain;
      add_visible_enum(rs.enums, f.domain);
    }
    // Own constants plus every ancestor's.
    auto add_consts = [&](const ClassSpec& c) {
      for (const auto& k : c.constants) {
        if (!rs.constants.count(k.name)) rs.constants[k.name] = {k.domain, k.value};
        add_visible_enum(rs.enums, k.domain);
      }
    };
    add_consts(cls);
    const ClassSpec* p = cls.parent ? h_.find(*cls.parent) : nullptr;
    while (p) {
      add_consts(*p);
      p = p->parent ? h_.find(*p->parent) : nullptr;
    }
    return rs;
  }

  /// Rewrites undecorated identifiers: field reference, inlined constant, or
  /// enum literal, in that precedence order. Unknown names are left for the
  /// type checker to report.
  ExprPtr resolve_expr(const ExprPtr& e, const ResolveScope& rs) {
    if (!e) return e;
    switch (e->kind) {
      case Expr::Kind::Var: {
        if (e->var_kind != VarKind::State) return e;
        if (rs.fields.count(e->name)) return e;
        auto k = rs.constants.find(e->name);
        if (k != rs.constants.end()) {
          const Value& v = k->second.second;
          if (v.is_seq() && v.as_seq().empty()) return Expr::empty_seq(e->span);
          return Expr::literal(v, e->span);
        }
        DomainPtr found;
        std::uint32_t found_index = 0;
        bool ambiguous = false;
        for (const auto& d : rs.enums) {
          for (std::uint32_t i = 0; i < d->literals.size(); ++i) {
            if (d->literals[i] != e->name) continue;
            if (found && !(*found == *d)) ambiguous = true;
            found = d;
            found_index = i;
          }
        }
        if (ambiguous) {
          error_at(e->span, "'" + e->name + "' is a literal of several enum domains");
          return e;
        }
        if (found) return Expr::literal(Value::enum_lit(found, found_index), e->span);
        return e;
      }
      case Expr::Kind::Lit:
      case Expr::Kind::EmptySeq:
        return e;
      default: {
        ExprPtr lhs = resolve_expr(e->lhs, rs);
        ExprPtr rhs = e->is_binary() ? resolve_expr(e->rhs, rs) : nullptr;
        if (lhs == e->lhs && rhs == e->rhs) return e;
        auto copy = std::make_shared<Expr>(*e);
        copy->lhs = lhs;
        copy->rhs = rhs ? rhs : e->rhs;
        return copy;
      }
    }
  }

  /// Collapses append chains of literals rooted in the empty sequence into
  /// one sequence literal, so displays of values have a single reading.
  ExprPtr canonicalize(const ExprPtr& e) {
    if (!e) return e;
    if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Lit ||
        e->kind == Expr::Kind::EmptySeq)
      return e;
    ExprPtr lhs = canonicalize(e->lhs);
    ExprPtr rhs = e->is_binary() ? canonicalize(e->rhs) : nullptr;
    if (e->kind == Expr::Kind::SeqAppend && rhs && rhs->kind == Expr::Kind::Lit) {
      if (lhs->kind == Expr::Kind::EmptySeq)
        return Expr::literal(Value::seq({rhs->lit}), e->span);
      if (lhs->kind == Expr::Kind::Lit && lhs->lit.is_seq()) {
        Value::SeqV vals = lhs->lit.as_seq();
        vals.push_back(rhs->lit);
        return Expr::literal(Value::seq(std::move(vals)), e->span);
      }
    }
    if (lhs == e->lhs && rhs == e->rhs) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->lhs = lhs;
    copy->rhs = rhs ? rhs : e->rhs;
    return copy;
  }

  std::string filename_;
  std::vector<Token> tokens_;
  int expr_depth_ = 0;
  std::size_t pos_ = 0;
  std::vector<ParseError> errors_;
  Hierarchy h_;
};

}  // namespace

ParseResult parse(std::string_view source, std::string filename) {
  return Parser(source, std::move(filename)).run();
}

}  // namespace bi
