#include "bi/semantics.hpp"

#include <algorithm>
#include <sstream>

namespace bi {

namespace {

constexpr std::uint64_t kRelationCandidateCap = 100'000'000;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  constexpr std::uint64_t kMax = std::uint64_t{1} << 62;
  if (a >= kMax / b) return kMax;
  return a * b;
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* FieldSig / BindingSpace                                                     */
/* -------------------------------------------------------------------------- */

FieldSig FieldSig::of(std::vector<Param> fields) {
  FieldSig sig;
  sig.fields = std::move(fields);
  for (std::size_t i = 0; i < sig.fields.size(); ++i)
    sig.index.emplace(sig.fields[i].name, i);
  return sig;
}

std::optional<std::size_t> FieldSig::find(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::string binding_str(const FieldSig& sig, const Binding& b) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < sig.fields.size() && i < b.values.size(); ++i) {
    if (i) os << ", ";
    os << sig.fields[i].name << " = " << b.values[i].str();
  }
  os << "}";
  return os.str();
}

std::uint32_t BindingSpace::index_of(const Binding& b) const {
  auto it = index.find(b);
  if (it == index.end())
    throw EvalInternalError("binding is outside its enumeration space");
  return it->second;
}

std::optional<std::uint32_t> BindingSpace::find(const Binding& b) const {
  auto it = index.find(b);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::uint32_t StateSpace::index_of(const Binding& b) const {
  auto it = index.find(b);
  if (it == index.end())
    throw EvalInternalError("state is outside the state space of " + class_name);
  return it->second;
}

std::optional<std::uint32_t> StateSpace::find(const Binding& b) const {
  auto it = index.find(b);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<Value> domain_values(const DomainPtr& d) {
  std::vector<Value> out;
  if (!d) return out;
  switch (d->kind) {
    case Domain::Kind::Bool:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
    case Domain::Kind::Int:
      for (std::int64_t i = d->lo; i <= d->hi; ++i) out.push_back(Value::integer(i));
      break;
    case Domain::Kind::Enum:
      for (std::uint32_t i = 0; i < d->literals.size(); ++i)
        out.push_back(Value::enum_lit(d, i));
      break;
    case Domain::Kind::Seq: {
      const std::vector<Value> elems = domain_values(d->elem);
      // By length, then lexicographically; the first element varies slowest.
      out.push_back(Value::seq({}));
      std::vector<Value::SeqV> prev{{}};
      for (std::uint32_t len = 1; len <= d->max_len; ++len) {
        std::vector<Value::SeqV> cur;
        cur.reserve(prev.size() * elems.size());
        for (const auto& p : prev)
          for (const auto& e : elems) {
            Value::SeqV s = p;
            s.push_back(e);
            cur.push_back(std::move(s));
          }
        // `cur` was produced prefix-major, which is exactly lexicographic.
        for (auto& s : cur) out.push_back(Value::seq(s));
        prev = std::move(cur);
      }
      break;
    }
  }
  return out;
}

BindingSpace enumerate_bindings(std::vector<Param> sig_params, std::uint64_t cap,
                                const std::string& what) {
  std::uint64_t total = 1;
  for (const auto& p : sig_params) total = sat_mul(total, p.domain->cardinality());
  if (total > cap) {
    std::ostringstream os;
    os << what << " has " << total << " candidate bindings, above the cap of " << cap;
    throw StateSpaceTooLarge(os.str());
  }

  BindingSpace space;
  space.sig = FieldSig::of(std::move(sig_params));

  std::vector<std::vector<Value>> per_field;
  per_field.reserve(space.sig.fields.size());
  for (const auto& p : space.sig.fields) per_field.push_back(domain_values(p.domain));
  for (const auto& vals : per_field)
    if (vals.empty()) return space;  // a void domain makes the product empty

  // Odometer: the first field is the most significant position.
  std::vector<std::size_t> idx(per_field.size(), 0);
  while (true) {
    Binding b;
    b.values.reserve(per_field.size());
    for (std::size_t f = 0; f < per_field.size(); ++f)
      b.values.push_back(per_field[f][idx[f]]);
    space.index.emplace(b, static_cast<std::uint32_t>(space.all.size()));
    space.all.push_back(std::move(b));

    std::size_t f = per_field.size();
    while (f > 0) {
      --f;
      if (++idx[f] < per_field[f].size()) break;
      idx[f] = 0;
      if (f == 0) return space;
    }
    if (per_field.empty()) return space;  // single empty binding
  }
}

/* -------------------------------------------------------------------------- */
/* Evaluation                                                                  */
/* -------------------------------------------------------------------------- */

namespace {

std::optional<Value> eval_var(const Expr& e, const FieldSig* sig, const Binding* vals,
                              const char* kind_word) {
  if (!sig || !vals)
    throw EvalInternalError(std::string("no ") + kind_word +
                            " environment for variable '" + e.name + "'");
  auto idx = sig->find(e.name);
  if (!idx || *idx >= vals->values.size())
    throw EvalInternalError(std::string("unbound ") + kind_word + " variable '" +
                            e.name + "'");
  return vals->values[*idx];
}

std::optional<std::int64_t> checked_add(std::int64_t a, std::int64_t b, bool subtract) {
  std::int64_t r = 0;
  if (subtract ? __builtin_sub_overflow(a, b, &r) : __builtin_add_overflow(a, b, &r))
    return std::nullopt;
  return r;
}

}  // namespace

std::optional<Value> eval(const Expr& e, const EvalEnv& env) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Var:
      switch (e.var_kind) {
        case VarKind::State: return eval_var(e, env.state, env.state_vals, "state");
        case VarKind::PrimedState:
          return eval_var(e, env.primed, env.primed_vals, "primed");
        case VarKind::Input: return eval_var(e, env.inputs, env.input_vals, "input");
        case VarKind::Output:
          return eval_var(e, env.outputs, env.output_vals, "output");
      }
      return std::nullopt;
    case K::Lit:
      return e.lit;
    case K::EmptySeq:
      return Value::seq({});
    case K::Not: {
      auto v = eval(*e.lhs, env);
      if (!v) return std::nullopt;
      return Value::boolean(!v->as_bool());
    }
    case K::Head: {
      auto v = eval(*e.lhs, env);
      if (!v || v->as_seq().empty()) return std::nullopt;
      return v->as_seq().front();
    }
    case K::Tail: {
      auto v = eval(*e.lhs, env);
      if (!v || v->as_seq().empty()) return std::nullopt;
      return Value::seq({v->as_seq().begin() + 1, v->as_seq().end()});
    }
    case K::Len: {
      auto v = eval(*e.lhs, env);
      if (!v) return std::nullopt;
      return Value::integer(static_cast<std::int64_t>(v->as_seq().size()));
    }
    case K::IsEmpty: {
      auto v = eval(*e.lhs, env);
      if (!v) return std::nullopt;
      return Value::boolean(v->as_seq().empty());
    }
    default:
      break;
  }

  auto l = eval(*e.lhs, env);
  if (!l) return std::nullopt;
  auto r = eval(*e.rhs, env);
  if (!r) return std::nullopt;

  switch (e.kind) {
    case K::Eq:
      return Value::boolean(*l == *r);
    case K::Ne:
      return Value::boolean(!(*l == *r));
    case K::Lt:
      return Value::boolean(l->as_int() < r->as_int());
    case K::Le:
      return Value::boolean(l->as_int() <= r->as_int());
    case K::Gt:
      return Value::boolean(l->as_int() > r->as_int());
    case K::Ge:
      return Value::boolean(l->as_int() >= r->as_int());
    case K::Add:
    case K::Sub: {
      auto v = checked_add(l->as_int(), r->as_int(), e.kind == K::Sub);
      if (!v) return std::nullopt;
      return Value::integer(*v);
    }
    case K::And:
      return Value::boolean(l->as_bool() && r->as_bool());
    case K::Or:
      return Value::boolean(l->as_bool() || r->as_bool());
    case K::Implies:
      return Value::boolean(!l->as_bool() || r->as_bool());
    case K::SeqAppend: {
      Value::SeqV s = l->as_seq();
      s.push_back(*r);
      return Value::seq(std::move(s));
    }
    case K::SeqConcat: {
      Value::SeqV s = l->as_seq();
      const auto& t = r->as_seq();
      s.insert(s.end(), t.begin(), t.end());
      return Value::seq(std::move(s));
    }
    default:
      throw EvalInternalError("malformed expression node");
  }
}

bool eval_predicate(const Expr& e, const EvalEnv& env) {
  auto v = eval(e, env);
  if (!v) return false;  // undefinedness behaves as a failed guard
  if (!v->is_bool()) throw EvalInternalError("predicate evaluated to a non-boolean");
  return v->as_bool();
}

/* -------------------------------------------------------------------------- */
/* Relations                                                                   */
/* -------------------------------------------------------------------------- */

bool OpRelation::contains(const Tuple& t) const {
  return std::binary_search(tuples.begin(), tuples.end(), t);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> precondition(const OpRelation& r) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pre;
  for (const auto& t : r.tuples) {
    if (pre.empty() || pre.back() != std::make_pair(t.s, t.i))
      pre.emplace_back(t.s, t.i);
  }
  return pre;  // tuples are sorted, so pairs arrive in order and deduped
}

/* -------------------------------------------------------------------------- */
/* Workspace                                                                   */
/* -------------------------------------------------------------------------- */

Workspace::Workspace(const Hierarchy& h, std::uint64_t state_cap)
    : h_(h), state_cap_(state_cap) {}

std::shared_ptr<const StateSpace> Workspace::space(const std::string& cls) {
  auto it = spaces_.find(cls);
  if (it != spaces_.end()) return it->second;
  auto s = std::make_shared<StateSpace>(enumerate_states(h_, cls, state_cap_));
  spaces_.emplace(cls, s);
  return s;
}

std::shared_ptr<const BindingSpace> Workspace::params_space(
    const std::vector<Param>& params, const std::string& what) {
  std::string key = what;
  for (const auto& p : params) key += "|" + p.name + ":" + p.domain->str();
  auto it = binding_spaces_.find(key);
  if (it != binding_spaces_.end()) return it->second;
  auto s = std::make_shared<BindingSpace>(enumerate_bindings(params, state_cap_, what));
  binding_spaces_.emplace(std::move(key), s);
  return s;
}

std::shared_ptr<const BindingSpace> Workspace::input_space(const OperationSpec& op) {
  return params_space(op.inputs, "inputs of " + op.name);
}

std::shared_ptr<const BindingSpace> Workspace::output_space(const OperationSpec& op) {
  return params_space(op.outputs, "outputs of " + op.name);
}

std::shared_ptr<const OpRelation> Workspace::relation(const std::string& cls,
                                                      const std::string& op) {
  auto key = std::make_pair(cls, op);
  auto it = relations_.find(key);
  if (it != relations_.end()) return it->second;

  const OperationSpec* spec = h_.find_op_at_or_above(cls, op);
  if (!spec) throw EvalInternalError("no operation '" + op + "' on class " + cls);

  auto sp = space(cls);
  auto ins = input_space(*spec);
  auto outs = output_space(*spec);

  const std::uint64_t candidates =
      sat_mul(sat_mul(sp->states.size(), ins->all.size()),
              sat_mul(sp->states.size(), outs->all.size()));
  if (candidates > kRelationCandidateCap) {
    std::ostringstream os;
    os << "operation " << cls << "." << op << " has " << candidates
       << " candidate transitions; state space too large to enumerate";
    throw StateSpaceTooLarge(os.str());
  }

  auto rel = std::make_shared<OpRelation>();
  rel->class_name = cls;
  rel->op_name = op;
  rel->space = sp;
  rel->inputs = ins;
  rel->outputs = outs;

  EvalEnv env;
  env.state = &sp->fields;
  env.primed = &sp->fields;
  env.inputs = &ins->sig;
  env.outputs = &outs->sig;

  for (std::uint32_t s = 0; s < sp->states.size(); ++s) {
    env.state_vals = &sp->states[s];
    for (std::uint32_t i = 0; i < ins->all.size(); ++i) {
      env.input_vals = &ins->all[i];
      for (std::uint32_t s2 = 0; s2 < sp->states.size(); ++s2) {
        env.primed_vals = &sp->states[s2];
        for (std::uint32_t o = 0; o < outs->all.size(); ++o) {
          env.output_vals = &outs->all[o];
          if (eval_predicate(*spec->body, env)) rel->tuples.push_back({s, i, s2, o});
        }
      }
    }
  }

  relations_.emplace(std::move(key), rel);
  return rel;
}

std::shared_ptr<const OpRelation> Workspace::skip_relation(const std::string& cls,
                                                           const OperationSpec& op) {
  auto key = std::make_pair(cls, op.name);
  auto it = skips_.find(key);
  if (it != skips_.end()) return it->second;

  auto sp = space(cls);
  auto ins = input_space(op);
  auto outs = output_space(op);

  auto rel = std::make_shared<OpRelation>();
  rel->class_name = cls;
  rel->op_name = op.name + " (skip)";
  rel->space = sp;
  rel->inputs = ins;
  rel->outputs = outs;
  for (std::uint32_t s = 0; s < sp->states.size(); ++s)
    for (std::uint32_t i = 0; i < ins->all.size(); ++i)
      for (std::uint32_t o = 0; o < outs->all.size(); ++o)
        rel->tuples.push_back({s, i, s, o});

  skips_.emplace(std::move(key), rel);
  return rel;
}

const std::vector<std::uint32_t>& Workspace::init_states(const std::string& cls) {
  auto it = init_states_.find(cls);
  if (it != init_states_.end()) return it->second;

  auto sp = space(cls);
  const ClassSpec* spec = h_.find(cls);
  std::vector<std::uint32_t> inits;
  EvalEnv env;
  env.primed = &sp->fields;
  for (std::uint32_t s = 0; s < sp->states.size(); ++s) {
    env.primed_vals = &sp->states[s];
    if (eval_predicate(*spec->init, env)) inits.push_back(s);
  }
  return init_states_.emplace(cls, std::move(inits)).first->second;
}

std::optional<Binding> Workspace::init_entailment_witness(const std::string& cls) {
  const ClassSpec* spec = h_.find(cls);
  if (!spec) return std::nullopt;
  BindingSpace raw =
      enumerate_bindings(h_.effective_fields(cls), state_cap_, "fields of " + cls);
  const ExprPtr inv = h_.effective_invariant(cls);
  for (const auto& b : raw.all) {
    EvalEnv init_env;
    init_env.primed = &raw.sig;
    init_env.primed_vals = &b;
    if (!eval_predicate(*spec->init, init_env)) continue;
    EvalEnv inv_env;
    inv_env.state = &raw.sig;
    inv_env.state_vals = &b;
    if (!eval_predicate(*inv, inv_env)) return b;
  }
  return std::nullopt;
}

/* -------------------------------------------------------------------------- */
/* Entry points                                                                */
/* -------------------------------------------------------------------------- */

StateSpace enumerate_states(const Hierarchy& h, const std::string& cls,
                            std::uint64_t cap) {
  const ClassSpec* spec = h.find(cls);
  if (!spec) throw EvalInternalError("unknown class '" + cls + "'");

  BindingSpace raw = enumerate_bindings(h.effective_fields(cls), cap,
                                        "state space of " + cls);
  const ExprPtr inv = h.effective_invariant(cls);

  StateSpace space;
  space.class_name = cls;
  space.fields = raw.sig;

  EvalEnv env;
  env.state = &space.fields;
  for (auto& b : raw.all) {
    env.state_vals = &b;
    if (!eval_predicate(*inv, env)) continue;
    space.index.emplace(b, static_cast<std::uint32_t>(space.states.size()));
    space.states.push_back(std::move(b));
  }
  return space;
}

OpRelation build_relation(const Hierarchy& h, const std::string& cls,
                          const std::string& op, std::uint64_t cap) {
  Workspace ws(h, cap);
  return *ws.relation(cls, op);
}

Binding project(const Hierarchy& h, const std::string& sub, const std::string& super,
                const Binding& s) {
  if (!h.is_ancestor_or_self(super, sub))
    throw NotAnAncestor("'" + super + "' is not an ancestor of '" + sub + "'");
  const std::size_t n = h.effective_fields(super).size();
  if (s.values.size() < n)
    throw EvalInternalError("state binding is shorter than the superclass signature");
  Binding out;
  out.values.assign(s.values.begin(), s.values.begin() + n);
  return out;
}

OpRelation lift_relation(Workspace& ws, const OpRelation& r, const std::string& super) {
  const Hierarchy& h = ws.hierarchy();
  if (!h.is_ancestor_or_self(super, r.class_name))
    throw NotAnAncestor("'" + super + "' is not an ancestor of '" + r.class_name + "'");

  auto super_space = ws.space(super);
  OpRelation lifted;
  lifted.class_name = super;
  lifted.op_name = r.op_name;
  lifted.space = super_space;
  lifted.inputs = r.inputs;
  lifted.outputs = r.outputs;

  for (const auto& t : r.tuples) {
    const Binding a = project(h, r.class_name, super, r.space->states[t.s]);
    const Binding a2 = project(h, r.class_name, super, r.space->states[t.s2]);
    lifted.tuples.push_back({super_space->index_of(a), t.i,
                             super_space->index_of(a2), t.o});
  }
  std::sort(lifted.tuples.begin(), lifted.tuples.end());
  lifted.tuples.erase(std::unique(lifted.tuples.begin(), lifted.tuples.end()),
                      lifted.tuples.end());
  return lifted;
}

}  // namespace bi
