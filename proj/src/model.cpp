#include "bi/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "typecheck.hpp"

namespace bi {

/* -------------------------------------------------------------------------- */
/* Domain                                                                      */
/* -------------------------------------------------------------------------- */

namespace {

constexpr std::uint64_t kCardinalitySaturation = std::uint64_t{1} << 63;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  if (a >= kCardinalitySaturation || b >= kCardinalitySaturation ||
      a + b >= kCardinalitySaturation)
    return kCardinalitySaturation;
  return a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a >= kCardinalitySaturation / b) return kCardinalitySaturation;
  return a * b;
}

}  // namespace

DomainPtr Domain::boolean() {
  auto d = std::make_shared<Domain>();
  d->kind = Kind::Bool;
  return d;
}

DomainPtr Domain::int_range(std::int64_t lo, std::int64_t hi) {
  auto d = std::make_shared<Domain>();
  d->kind = Kind::Int;
  d->lo = lo;
  d->hi = hi;
  return d;
}

DomainPtr Domain::enumeration(std::string name, std::vector<std::string> literals) {
  auto d = std::make_shared<Domain>();
  d->kind = Kind::Enum;
  d->enum_name = std::move(name);
  d->literals = std::move(literals);
  return d;
}

DomainPtr Domain::bounded_seq(DomainPtr elem, std::uint32_t max_len) {
  auto d = std::make_shared<Domain>();
  d->kind = Kind::Seq;
  d->elem = std::move(elem);
  d->max_len = max_len;
  return d;
}

std::uint64_t Domain::cardinality() const {
  switch (kind) {
    case Kind::Bool:
      return 2;
    case Kind::Int:
      return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
    case Kind::Enum:
      return literals.size();
    case Kind::Seq: {
      const std::uint64_t base = elem ? elem->cardinality() : 0;
      std::uint64_t total = 0;
      std::uint64_t power = 1;  // base^0
      for (std::uint32_t k = 0; k <= max_len; ++k) {
        total = sat_add(total, power);
        power = sat_mul(power, base);
      }
      return total;
    }
  }
  return 0;
}

bool Domain::operator==(const Domain& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Bool:
      return true;
    case Kind::Int:
      return lo == other.lo && hi == other.hi;
    case Kind::Enum:
      return enum_name == other.enum_name && literals == other.literals;
    case Kind::Seq:
      return max_len == other.max_len && elem && other.elem && *elem == *other.elem;
  }
  return false;
}

std::string Domain::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Bool:
      os << "bool";
      break;
    case Kind::Int:
      os << "int " << lo << ".." << hi;
      break;
    case Kind::Enum: {
      os << "enum {";
      for (std::size_t i = 0; i < literals.size(); ++i)
        os << (i ? ", " : "") << literals[i];
      os << "}";
      break;
    }
    case Kind::Seq:
      os << "seq(" << (elem ? elem->str() : "?") << ", " << max_len << ")";
      break;
  }
  return os.str();
}

/* -------------------------------------------------------------------------- */
/* Value                                                                       */
/* -------------------------------------------------------------------------- */

Value Value::integer(std::int64_t i) {
  Value v;
  v.v = i;
  return v;
}

Value Value::enum_lit(DomainPtr domain, std::uint32_t index) {
  Value v;
  v.v = EnumV{std::move(domain), index};
  return v;
}

Value Value::seq(SeqV elems) {
  Value v;
  v.v = std::move(elems);
  return v;
}

bool Value::operator==(const Value& other) const {
  if (v.index() != other.v.index()) return false;
  switch (v.index()) {
    case 0:
      return as_bool() == other.as_bool();
    case 1:
      return as_int() == other.as_int();
    case 2: {
      const auto& a = as_enum();
      const auto& b = other.as_enum();
      if (a.index != b.index) return false;
      // Same-domain comparison is the typical case; fall back to structure.
      if (a.domain == b.domain) return true;
      return a.domain && b.domain && *a.domain == *b.domain;
    }
    case 3:
      return as_seq() == other.as_seq();
  }
  return false;
}

bool Value::operator<(const Value& other) const {
  if (v.index() != other.v.index()) return v.index() < other.v.index();
  switch (v.index()) {
    case 0:
      return as_bool() < other.as_bool();
    case 1:
      return as_int() < other.as_int();
    case 2:
      return as_enum().index < other.as_enum().index;
    case 3: {
      const auto& a = as_seq();
      const auto& b = other.as_seq();
      if (a.size() != b.size()) return a.size() < b.size();  // by length first
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
  }
  return false;
}

std::size_t Value::hash() const {
  auto mix = [](std::size_t seed, std::size_t x) {
    return seed ^ (x + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  };
  std::size_t h = v.index();
  switch (v.index()) {
    case 0:
      h = mix(h, as_bool() ? 1 : 0);
      break;
    case 1:
      h = mix(h, std::hash<std::int64_t>{}(as_int()));
      break;
    case 2:
      h = mix(h, as_enum().index);
      break;
    case 3:
      for (const auto& e : as_seq()) h = mix(h, e.hash());
      break;
  }
  return h;
}

std::string Value::str() const {
  switch (v.index()) {
    case 0:
      return as_bool() ? "true" : "false";
    case 1:
      return std::to_string(as_int());
    case 2: {
      const auto& e = as_enum();
      if (e.domain && e.index < e.domain->literals.size())
        return e.domain->literals[e.index];
      return "enum#" + std::to_string(e.index);
    }
    case 3: {
      const auto& s = as_seq();
      if (s.empty()) return "<>";
      std::string out = "<";
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += s[i].str();
      }
      out += ">";
      return out;
    }
  }
  return "?";
}

bool value_in_domain(const Value& v, const Domain& d) {
  switch (d.kind) {
    case Domain::Kind::Bool:
      return v.is_bool();
    case Domain::Kind::Int:
      return v.is_int() && v.as_int() >= d.lo && v.as_int() <= d.hi;
    case Domain::Kind::Enum:
      return v.is_enum() && v.as_enum().index < d.literals.size() &&
             v.as_enum().domain && *v.as_enum().domain == d;
    case Domain::Kind::Seq: {
      if (!v.is_seq() || !d.elem) return false;
      const auto& s = v.as_seq();
      if (s.size() > d.max_len) return false;
      return std::all_of(s.begin(), s.end(),
                         [&](const Value& e) { return value_in_domain(e, *d.elem); });
    }
  }
  return false;
}

/* -------------------------------------------------------------------------- */
/* Expr                                                                        */
/* -------------------------------------------------------------------------- */

ExprPtr Expr::var(std::string name, VarKind k, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var_kind = k;
  e->name = std::move(name);
  e->span = std::move(span);
  return e;
}

ExprPtr Expr::literal(Value v, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Lit;
  e->lit = std::move(v);
  e->span = std::move(span);
  return e;
}

ExprPtr Expr::empty_seq(SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::EmptySeq;
  e->span = std::move(span);
  return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr operand, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(operand);
  e->span = std::move(span);
  return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->span = std::move(span);
  return e;
}

ExprPtr Expr::truth() {
  static const ExprPtr t = Expr::literal(Value::boolean(true));
  return t;
}

bool Expr::is_unary() const {
  switch (kind) {
    case Kind::Not:
    case Kind::Head:
    case Kind::Tail:
    case Kind::Len:
    case Kind::IsEmpty:
      return true;
    default:
      return false;
  }
}

bool Expr::is_binary() const {
  return !is_unary() && kind != Kind::Var && kind != Kind::Lit && kind != Kind::EmptySeq;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Var:
      return a->var_kind == b->var_kind && a->name == b->name;
    case Expr::Kind::Lit:
      return a->lit == b->lit;
    case Expr::Kind::EmptySeq:
      return true;
    default:
      if (a->is_unary()) return expr_equal(a->lhs, b->lhs);
      return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

bool is_trivially_true(const ExprPtr& e) {
  return e && e->kind == Expr::Kind::Lit && e->lit.is_bool() && e->lit.as_bool();
}

ExprPtr conjoin(ExprPtr a, ExprPtr b) {
  if (!a || is_trivially_true(a)) return b;
  if (!b || is_trivially_true(b)) return a;
  return Expr::binary(Expr::Kind::And, std::move(a), std::move(b));
}

/* -------------------------------------------------------------------------- */
/* ClassSpec / Hierarchy                                                       */
/* -------------------------------------------------------------------------- */

bool Param::operator==(const Param& other) const {
  return name == other.name && domain && other.domain && *domain == *other.domain;
}

ClassSpec::ClassSpec()
    : own_invariant(Expr::truth()), init(Expr::truth()), final_cond(Expr::truth()) {}

const OperationSpec* ClassSpec::find_op(const std::string& op_name) const {
  for (const auto& op : operations)
    if (op.name == op_name) return &op;
  return nullptr;
}

const ClassSpec* Hierarchy::find(const std::string& name) const {
  for (const auto& c : classes)
    if (c.name == name) return &c;
  return nullptr;
}

int Hierarchy::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<const ClassSpec*> Hierarchy::ancestor_chain(const std::string& name) const {
  std::vector<const ClassSpec*> chain;
  std::set<std::string> seen;
  const ClassSpec* c = find(name);
  while (c && seen.insert(c->name).second) {
    chain.push_back(c);
    c = c->parent ? find(*c->parent) : nullptr;
  }
  return chain;
}

bool Hierarchy::is_ancestor_or_self(const std::string& anc, const std::string& desc) const {
  for (const ClassSpec* c : ancestor_chain(desc))
    if (c->name == anc) return true;
  return false;
}

std::vector<Param> Hierarchy::effective_fields(const std::string& name) const {
  auto chain = ancestor_chain(name);
  std::vector<Param> fields;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    fields.insert(fields.end(), (*it)->own_fields.begin(), (*it)->own_fields.end());
  return fields;
}

ExprPtr Hierarchy::effective_invariant(const std::string& name) const {
  auto chain = ancestor_chain(name);
  ExprPtr inv = Expr::truth();
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    inv = conjoin(inv, (*it)->own_invariant);
  return inv;
}

const OperationSpec* Hierarchy::find_op_at_or_above(const std::string& name,
                                                    const std::string& op_name) const {
  for (const ClassSpec* c : ancestor_chain(name))
    if (const OperationSpec* op = c->find_op(op_name)) return op;
  return nullptr;
}

const ClassSpec* Hierarchy::op_host(const std::string& name,
                                    const std::string& op_name) const {
  for (const ClassSpec* c : ancestor_chain(name))
    if (c->find_op(op_name)) return c;
  return nullptr;
}

std::vector<std::string> Hierarchy::effective_op_names(const std::string& name) const {
  auto chain = ancestor_chain(name);
  std::vector<std::string> names;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    for (const auto& op : (*it)->operations)
      if (std::find(names.begin(), names.end(), op.name) == names.end())
        names.push_back(op.name);
  return names;
}

std::vector<const ClassSpec*> Hierarchy::roots() const {
  std::vector<const ClassSpec*> rs;
  for (const auto& c : classes)
    if (!c.parent) rs.push_back(&c);
  return rs;
}

std::optional<std::string> Hierarchy::common_ancestor(const std::string& a,
                                                      const std::string& b) const {
  for (const ClassSpec* ca : ancestor_chain(a))
    if (is_ancestor_or_self(ca->name, b)) return ca->name;
  return std::nullopt;
}

namespace {

bool params_equal(const std::vector<Param>& a, const std::vector<Param>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool op_equal(const OperationSpec& a, const OperationSpec& b) {
  return a.name == b.name && a.mode == b.mode && params_equal(a.inputs, b.inputs) &&
         params_equal(a.outputs, b.outputs) && expr_equal(a.body, b.body);
}

bool class_equal(const ClassSpec& a, const ClassSpec& b) {
  if (a.name != b.name || a.abstract != b.abstract || a.parent != b.parent) return false;
  if (!params_equal(a.own_fields, b.own_fields)) return false;
  if (!expr_equal(a.own_invariant, b.own_invariant)) return false;
  if (!expr_equal(a.init, b.init)) return false;
  if (!expr_equal(a.final_cond, b.final_cond)) return false;
  if (a.operations.size() != b.operations.size()) return false;
  for (std::size_t i = 0; i < a.operations.size(); ++i)
    if (!op_equal(a.operations[i], b.operations[i])) return false;
  if (a.constants.size() != b.constants.size()) return false;
  for (std::size_t i = 0; i < a.constants.size(); ++i) {
    const auto& ca = a.constants[i];
    const auto& cb = b.constants[i];
    if (ca.name != cb.name || !ca.domain || !cb.domain || !(*ca.domain == *cb.domain) ||
        ca.value != cb.value)
      return false;
  }
  return true;
}

}  // namespace

bool hierarchy_equal(const Hierarchy& a, const Hierarchy& b) {
  if (a.classes.size() != b.classes.size()) return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i)
    if (!class_equal(a.classes[i], b.classes[i])) return false;
  if (a.global_constraints.size() != b.global_constraints.size()) return false;
  for (std::size_t i = 0; i < a.global_constraints.size(); ++i) {
    if (a.global_constraints[i].class_name != b.global_constraints[i].class_name)
      return false;
    if (!expr_equal(a.global_constraints[i].body, b.global_constraints[i].body))
      return false;
  }
  return true;
}

/* -------------------------------------------------------------------------- */
/* Structural validation                                                       */
/* -------------------------------------------------------------------------- */

const char* structural_error_code_name(StructuralError::Code code) {
  using Code = StructuralError::Code;
  switch (code) {
    case Code::DuplicateClass: return "DuplicateClass";
    case Code::UnknownParent: return "UnknownParent";
    case Code::CyclicParent: return "CyclicParent";
    case Code::DuplicateField: return "DuplicateField";
    case Code::DuplicateConstant: return "DuplicateConstant";
    case Code::DuplicateOperation: return "DuplicateOperation";
    case Code::DuplicateParam: return "DuplicateParam";
    case Code::InvalidDomain: return "InvalidDomain";
    case Code::InvalidConstantValue: return "InvalidConstantValue";
    case Code::SignatureMismatch: return "SignatureMismatch";
    case Code::IntroducesExisting: return "IntroducesExisting";
    case Code::TypeError: return "TypeError";
    case Code::UnknownConstraintClass: return "UnknownConstraintClass";
  }
  return "?";
}

namespace {

void check_domain(const Domain& d, const std::string& cls, const std::string& member,
                  bool allow_seq, std::vector<StructuralError>& out) {
  using Code = StructuralError::Code;
  switch (d.kind) {
    case Domain::Kind::Bool:
      return;
    case Domain::Kind::Int:
      if (d.lo > d.hi)
        out.push_back({Code::InvalidDomain, cls, member,
                       "empty integer range " + std::to_string(d.lo) + ".." +
                           std::to_string(d.hi)});
      return;
    case Domain::Kind::Enum: {
      if (d.literals.empty())
        out.push_back({Code::InvalidDomain, cls, member, "enum with no literals"});
      std::set<std::string> seen;
      for (const auto& lit : d.literals)
        if (!seen.insert(lit).second)
          out.push_back({Code::InvalidDomain, cls, member,
                         "duplicate enum literal '" + lit + "'"});
      return;
    }
    case Domain::Kind::Seq:
      if (!allow_seq) {
        out.push_back({Code::InvalidDomain, cls, member,
                       "nested sequence domains are not supported"});
        return;
      }
      if (d.elem) check_domain(*d.elem, cls, member, /*allow_seq=*/false, out);
      return;
  }
}

}  // namespace

std::vector<StructuralError> validate(const Hierarchy& h) {
  using Code = StructuralError::Code;
  std::vector<StructuralError> errors;

  // Class name uniqueness.
  {
    std::set<std::string> seen;
    for (const auto& c : h.classes)
      if (!seen.insert(c.name).second)
        errors.push_back({Code::DuplicateClass, c.name, "",
                          "class '" + c.name + "' declared more than once"});
  }

  // Parent links: known targets, no cycles (forest).
  for (const auto& c : h.classes) {
    if (!c.parent) continue;
    if (!h.find(*c.parent)) {
      errors.push_back({Code::UnknownParent, c.name, "",
                        "unknown parent class '" + *c.parent + "'"});
      continue;
    }
    std::set<std::string> seen{c.name};
    const ClassSpec* p = h.find(*c.parent);
    while (p) {
      if (!seen.insert(p->name).second) {
        errors.push_back({Code::CyclicParent, c.name, "",
                          "parent chain of '" + c.name + "' contains a cycle"});
        break;
      }
      p = p->parent ? h.find(*p->parent) : nullptr;
    }
  }
  if (!errors.empty()) return errors;  // the checks below need a sane forest

  for (const auto& c : h.classes) {
    // Field disjointness across the chain, and well-formed domains.
    std::set<std::string> inherited;
    if (c.parent)
      for (const auto& f : h.effective_fields(*c.parent)) inherited.insert(f.name);
    std::set<std::string> own;
    for (const auto& f : c.own_fields) {
      if (inherited.count(f.name))
        errors.push_back({Code::DuplicateField, c.name, f.name,
                          "field '" + f.name + "' redeclares an inherited field"});
      if (!own.insert(f.name).second)
        errors.push_back({Code::DuplicateField, c.name, f.name,
                          "field '" + f.name + "' declared twice"});
      if (f.domain) check_domain(*f.domain, c.name, f.name, true, errors);
    }

    // Constants: unique along the chain, values in their domains.
    std::set<std::string> const_names;
    for (const ClassSpec* anc : h.ancestor_chain(c.name)) {
      if (anc == &c) continue;
      for (const auto& k : anc->constants) const_names.insert(k.name);
    }
    std::set<std::string> field_names;
    for (const auto& f : h.effective_fields(c.name)) field_names.insert(f.name);
    for (const auto& k : c.constants) {
      if (!const_names.insert(k.name).second)
        errors.push_back({Code::DuplicateConstant, c.name, k.name,
                          "constant '" + k.name + "' already declared"});
      if (field_names.count(k.name))
        errors.push_back({Code::DuplicateConstant, c.name, k.name,
                          "constant '" + k.name + "' shadows a field"});
      if (k.domain) {
        check_domain(*k.domain, c.name, k.name, true, errors);
        if (!value_in_domain(k.value, *k.domain))
          errors.push_back({Code::InvalidConstantValue, c.name, k.name,
                            "value " + k.value.str() + " is outside " + k.domain->str()});
      }
    }

    // Operations: unique per class, well-formed signatures, mode consistency.
    std::set<std::string> op_names;
    for (const auto& op : c.operations) {
      if (!op_names.insert(op.name).second)
        errors.push_back({Code::DuplicateOperation, c.name, op.name,
                          "operation '" + op.name + "' declared twice"});
      std::set<std::string> param_names;
      for (const auto& p : op.inputs) {
        if (!param_names.insert(p.name).second)
          errors.push_back({Code::DuplicateParam, c.name, op.name,
                            "duplicate parameter '" + p.name + "'"});
        if (p.domain) check_domain(*p.domain, c.name, op.name, true, errors);
      }
      for (const auto& p : op.outputs) {
        if (!param_names.insert(p.name).second)
          errors.push_back({Code::DuplicateParam, c.name, op.name,
                            "duplicate parameter '" + p.name + "'"});
        if (p.domain) check_domain(*p.domain, c.name, op.name, true, errors);
      }

      const OperationSpec* above =
          c.parent ? h.find_op_at_or_above(*c.parent, op.name) : nullptr;
      if (op.mode == OpMode::Specializes) {
        if (!above)
          errors.push_back({Code::SignatureMismatch, c.name, op.name,
                            "override of '" + op.name +
                                "' but no ancestor declares that operation"});
        else if (!params_equal(op.inputs, above->inputs) ||
                 !params_equal(op.outputs, above->outputs))
          errors.push_back({Code::SignatureMismatch, c.name, op.name,
                            "signature of '" + op.name +
                                "' differs from the inherited declaration"});
      } else if (above) {
        errors.push_back({Code::IntroducesExisting, c.name, op.name,
                          "operation '" + op.name +
                              "' already exists in an ancestor; use 'override op'"});
      }
    }

    // Expression well-typedness (and variable-kind discipline).
    for (const auto& te : typecheck_class(h, c)) {
      errors.push_back({Code::TypeError, c.name, te.member, te.message});
    }
  }

  // Global constraints: known classes, typed over that class's state.
  for (const auto& gc : h.global_constraints) {
    const ClassSpec* cls = h.find(gc.class_name);
    if (!cls) {
      errors.push_back({Code::UnknownConstraintClass, gc.class_name, "",
                        "constraint on unknown class '" + gc.class_name + "'"});
      continue;
    }
    for (const auto& te : typecheck_constraint(h, *cls, gc.body))
      errors.push_back({Code::TypeError, gc.class_name, te.member, te.message});
  }

  return errors;
}

}  // namespace bi
