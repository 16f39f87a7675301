#pragma once

// Brute-force reference semantics for cross-checking the enumeration engine.
// Everything here works from first principles: raw domain products built by
// direct recursion and predicate evaluation, never the StateSpace/OpRelation
// machinery under test.

#include <algorithm>
#include <set>
#include <vector>

#include "bi/model.hpp"
#include "bi/semantics.hpp"

namespace bi::oracle {

inline std::vector<Value> values_of(const DomainPtr& d) {
  std::vector<Value> out;
  switch (d->kind) {
    case Domain::Kind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Domain::Kind::Int:
      for (std::int64_t i = d->lo; i <= d->hi; ++i) out.push_back(Value::integer(i));
      break;
    case Domain::Kind::Enum:
      for (std::uint32_t i = 0; i < d->literals.size(); ++i)
        out.push_back(Value::enum_lit(d, i));
      break;
    case Domain::Kind::Seq: {
      const auto elems = values_of(d->elem);
      std::vector<Value::SeqV> acc{{}};
      out.push_back(Value::seq({}));
      for (std::uint32_t len = 1; len <= d->max_len; ++len) {
        std::vector<Value::SeqV> next;
        for (const auto& prefix : acc)
          for (const auto& e : elems) {
            auto s = prefix;
            s.push_back(e);
            next.push_back(s);
          }
        for (const auto& s : next) out.push_back(Value::seq(s));
        acc = next;
      }
      break;
    }
  }
  return out;
}

inline void product_rec(const std::vector<Param>& params, std::size_t at, Binding& cur,
                        std::vector<Binding>& out) {
  if (at == params.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& v : values_of(params[at].domain)) {
    cur.values.push_back(v);
    product_rec(params, at + 1, cur, out);
    cur.values.pop_back();
  }
}

inline std::vector<Binding> product(const std::vector<Param>& params) {
  std::vector<Binding> out;
  Binding cur;
  product_rec(params, 0, cur, out);
  return out;
}

inline bool binding_less(const Binding& a, const Binding& b) {
  return std::lexicographical_compare(a.values.begin(), a.values.end(),
                                      b.values.begin(), b.values.end());
}

/// Invariant-satisfying subset of the raw field product.
inline std::vector<Binding> states(const Hierarchy& h, const std::string& cls) {
  const auto params = h.effective_fields(cls);
  const FieldSig sig = FieldSig::of(params);
  const ExprPtr inv = h.effective_invariant(cls);
  std::vector<Binding> out;
  for (const auto& b : product(params)) {
    EvalEnv env;
    env.state = &sig;
    env.state_vals = &b;
    if (eval_predicate(*inv, env)) out.push_back(b);
  }
  return out;
}

struct Tuple {
  Binding s, i, s2, o;
};

/// Quadruple-nested enumeration of one operation: all candidate
/// (state, input, state', output) combinations tested against the body.
inline std::vector<Tuple> relation(const Hierarchy& h, const std::string& cls,
                                   const std::string& op_name) {
  const OperationSpec* op = h.find_op_at_or_above(cls, op_name);
  const FieldSig sig = FieldSig::of(h.effective_fields(cls));
  const FieldSig in_sig = FieldSig::of(op->inputs);
  const FieldSig out_sig = FieldSig::of(op->outputs);
  const auto sts = states(h, cls);
  const auto ins = product(op->inputs);
  const auto outs = product(op->outputs);

  std::vector<Tuple> tuples;
  EvalEnv env;
  env.state = &sig;
  env.primed = &sig;
  env.inputs = &in_sig;
  env.outputs = &out_sig;
  for (const auto& s : sts) {
    env.state_vals = &s;
    for (const auto& i : ins) {
      env.input_vals = &i;
      for (const auto& s2 : sts) {
        env.primed_vals = &s2;
        for (const auto& o : outs) {
          env.output_vals = &o;
          if (eval_predicate(*op->body, env)) tuples.push_back({s, i, s2, o});
        }
      }
    }
  }
  return tuples;
}

/// Existential projection done independently: (s, i) pairs for which some
/// (s', o) satisfies the body.
inline std::vector<std::pair<Binding, Binding>> pre(const Hierarchy& h,
                                                    const std::string& cls,
                                                    const std::string& op_name) {
  std::vector<std::pair<Binding, Binding>> out;
  Binding last_s, last_i;
  bool have_last = false;
  for (const auto& t : relation(h, cls, op_name)) {
    if (have_last && t.s == last_s && t.i == last_i) continue;
    out.emplace_back(t.s, t.i);
    last_s = t.s;
    last_i = t.i;
    have_last = true;
  }
  return out;
}

inline std::uint64_t candidate_count(const Hierarchy& h, const std::string& cls,
                                     const std::string& op_name) {
  const OperationSpec* op = h.find_op_at_or_above(cls, op_name);
  const std::uint64_t n_states = states(h, cls).size();
  return n_states * product(op->inputs).size() * n_states * product(op->outputs).size();
}

}  // namespace bi::oracle
