#include "bi/refinement.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace bi {

const char* obligation_kind_name(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::Initialisation: return "Initialisation";
    case ObligationKind::Applicability: return "Applicability";
    case ObligationKind::CorrectnessNB: return "CorrectnessNB";
    case ObligationKind::CorrectnessB: return "CorrectnessB";
    case ObligationKind::Finalisation: return "Finalisation";
    case ObligationKind::SkipApplicability: return "SkipApplicability";
    case ObligationKind::SkipCorrectness: return "SkipCorrectness";
    case ObligationKind::VirtualOpTheorem: return "VirtualOpTheorem";
  }
  return "?";
}

const char* rule_tag(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::Initialisation: return "rule 1";
    case ObligationKind::Applicability: return "rule 2";
    case ObligationKind::CorrectnessNB: return "rule 3";
    case ObligationKind::CorrectnessB: return "rule 3a";
    case ObligationKind::Finalisation: return "rule 4";
    case ObligationKind::SkipApplicability: return "rule 2 (skip)";
    case ObligationKind::SkipCorrectness: return "rule 3 (skip)";
    case ObligationKind::VirtualOpTheorem: return "virtual op";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Lifted: return "Lifted";
    case Verdict::AcceptedByRelaxation: return "AcceptedByRelaxation";
  }
  return "?";
}

std::string NamedBinding::str() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ", ";
    os << entries[i].first << " = " << entries[i].second.str();
  }
  os << "}";
  return os.str();
}

NamedBinding name_binding(const FieldSig& sig, const Binding& b) {
  NamedBinding out;
  for (std::size_t i = 0; i < sig.fields.size() && i < b.values.size(); ++i)
    out.entries.emplace_back(sig.fields[i].name, b.values[i]);
  return out;
}

namespace {

/// (state, input) membership bitmap of a relation's precondition.
std::vector<char> pre_bitmap(const OpRelation& r) {
  std::vector<char> bits(r.space->states.size() * r.inputs->all.size(), 0);
  for (const auto& t : r.tuples) bits[t.s * r.inputs->all.size() + t.i] = 1;
  return bits;
}

/// Projection of every subclass state onto its superclass space, by index.
std::vector<std::uint32_t> projection_table(Workspace& ws, const std::string& sub,
                                            const std::string& super) {
  const Hierarchy& h = ws.hierarchy();
  auto sub_space = ws.space(sub);
  auto super_space = ws.space(super);
  std::vector<std::uint32_t> table;
  table.reserve(sub_space->states.size());
  for (const auto& s : sub_space->states)
    table.push_back(super_space->index_of(project(h, sub, super, s)));
  return table;
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* Obligations                                                                 */
/* -------------------------------------------------------------------------- */

Finding check_initialisation(Workspace& ws, const std::string& sub,
                             const std::string& super) {
  Finding f;
  f.obligation = {ObligationKind::Initialisation, sub, super, std::nullopt, std::nullopt};

  const Hierarchy& h = ws.hierarchy();
  auto sub_space = ws.space(sub);
  auto super_space = ws.space(super);
  const ClassSpec* super_cls = h.find(super);

  EvalEnv env;
  env.primed = &super_space->fields;
  for (std::uint32_t s2 : ws.init_states(sub)) {
    const Binding projected = project(h, sub, super, sub_space->states[s2]);
    env.primed_vals = &projected;
    if (eval_predicate(*super_cls->init, env)) continue;
    f.verdict = Verdict::Fails;
    Witness w;
    w.post_state = name_binding(sub_space->fields, sub_space->states[s2]);
    f.witness = std::move(w);
    f.note = "an initial state of " + sub + " projects outside the initial states of " +
             super;
    return f;
  }
  f.verdict = Verdict::Holds;
  return f;
}

Finding check_applicability(Workspace& ws, const std::string& sub,
                            const std::string& super, const std::string& op,
                            const CheckConfig& config) {
  Finding f;
  f.obligation = {ObligationKind::Applicability, sub, super, op, std::nullopt};

  const ClassSpec* super_cls = ws.hierarchy().find(super);
  if (config.relax_abstract_classes && super_cls && super_cls->abstract) {
    f.verdict = Verdict::Lifted;
    f.note = "superclass " + super + " is abstract; applicability lifted";
    return f;
  }

  auto ao = ws.relation(super, op);
  auto co = ws.relation(sub, op);
  const auto ao_pre = pre_bitmap(*ao);
  const auto co_pre = pre_bitmap(*co);
  const auto proj = projection_table(ws, sub, super);
  auto sub_space = ws.space(sub);

  const std::size_t n_inputs = co->inputs->all.size();
  for (std::uint32_t s = 0; s < sub_space->states.size(); ++s) {
    for (std::uint32_t i = 0; i < n_inputs; ++i) {
      if (!ao_pre[proj[s] * n_inputs + i]) continue;
      if (co_pre[s * n_inputs + i]) continue;
      f.verdict = Verdict::Fails;
      Witness w;
      w.state = name_binding(sub_space->fields, sub_space->states[s]);
      if (!co->inputs->sig.fields.empty())
        w.input = name_binding(co->inputs->sig, co->inputs->all[i]);
      f.witness = std::move(w);
      f.note = "the inherited operation is enabled where the overriding operation "
               "of " + sub + " is not";
      return f;
    }
  }
  f.verdict = Verdict::Holds;
  return f;
}

Finding check_correctness(Workspace& ws, const std::string& sub,
                          const std::string& super, const std::string& op,
                          CheckMode mode) {
  Finding f;
  f.obligation = {mode == CheckMode::NonBlocking ? ObligationKind::CorrectnessNB
                                                 : ObligationKind::CorrectnessB,
                  sub, super, op, std::nullopt};

  auto ao = ws.relation(super, op);
  auto co = ws.relation(sub, op);
  const auto ao_pre = pre_bitmap(*ao);
  const auto proj = projection_table(ws, sub, super);
  auto sub_space = ws.space(sub);
  const std::size_t n_inputs = co->inputs->all.size();

  for (const auto& t : co->tuples) {
    if (mode == CheckMode::NonBlocking && !ao_pre[proj[t.s] * n_inputs + t.i])
      continue;  // outside the inherited contract, anything goes
    if (ao->contains({proj[t.s], t.i, proj[t.s2], t.o})) continue;
    f.verdict = Verdict::Fails;
    Witness w;
    w.state = name_binding(sub_space->fields, sub_space->states[t.s]);
    w.post_state = name_binding(sub_space->fields, sub_space->states[t.s2]);
    if (!co->inputs->sig.fields.empty())
      w.input = name_binding(co->inputs->sig, co->inputs->all[t.i]);
    if (!co->outputs->sig.fields.empty())
      w.output = name_binding(co->outputs->sig, co->outputs->all[t.o]);
    f.witness = std::move(w);
    f.note = "a transition of " + sub + "." + op +
             " is not permitted by the inherited operation";
    return f;
  }
  f.verdict = Verdict::Holds;
  return f;
}

Finding check_finalisation(Workspace& ws, const std::string& sub,
                           const std::string& super) {
  Finding f;
  f.obligation = {ObligationKind::Finalisation, sub, super, std::nullopt, std::nullopt};

  const Hierarchy& h = ws.hierarchy();
  const ClassSpec* sub_cls = h.find(sub);
  const ClassSpec* super_cls = h.find(super);

  // Total finalisations on both sides: the rule reduces to true.
  if (is_trivially_true(sub_cls->final_cond) && is_trivially_true(super_cls->final_cond)) {
    f.verdict = Verdict::Holds;
    return f;
  }

  auto sub_space = ws.space(sub);
  auto super_space = ws.space(super);
  EvalEnv sub_env, super_env;
  sub_env.state = &sub_space->fields;
  super_env.state = &super_space->fields;

  for (const auto& s : sub_space->states) {
    sub_env.state_vals = &s;
    if (!eval_predicate(*sub_cls->final_cond, sub_env)) continue;
    const Binding projected = project(h, sub, super, s);
    super_env.state_vals = &projected;
    if (eval_predicate(*super_cls->final_cond, super_env)) continue;
    f.verdict = Verdict::Fails;
    Witness w;
    w.state = name_binding(sub_space->fields, s);
    f.witness = std::move(w);
    f.note = "a state deletable as " + sub + " is not deletable as " + super;
    return f;
  }
  f.verdict = Verdict::Holds;
  return f;
}

std::vector<Finding> check_extra_op(Workspace& ws, const std::string& sub,
                                    const std::string& super, const OperationSpec& op,
                                    const CheckConfig& config) {
  std::vector<Finding> out;
  auto co = ws.relation(sub, op.name);
  auto sub_space = ws.space(sub);
  const auto proj = projection_table(ws, sub, super);
  const std::size_t n_inputs = co->inputs->all.size();

  if (!config.relax_virtual_ops) {
    auto skip = ws.skip_relation(super, op);

    // Applicability against skip: skip is total, so the extra operation
    // must be enabled everywhere.
    Finding fa;
    fa.obligation = {ObligationKind::SkipApplicability, sub, super, op.name, std::nullopt};
    fa.verdict = Verdict::Holds;
    const auto co_pre = pre_bitmap(*co);
    for (std::uint32_t s = 0; s < sub_space->states.size() && fa.verdict == Verdict::Holds;
         ++s) {
      for (std::uint32_t i = 0; i < n_inputs; ++i) {
        if (co_pre[s * n_inputs + i]) continue;
        fa.verdict = Verdict::Fails;
        Witness w;
        w.state = name_binding(sub_space->fields, sub_space->states[s]);
        if (!co->inputs->sig.fields.empty())
          w.input = name_binding(co->inputs->sig, co->inputs->all[i]);
        fa.witness = std::move(w);
        fa.note = "skip is enabled everywhere but " + sub + "." + op.name + " is not";
        break;
      }
    }
    out.push_back(std::move(fa));

    // Correctness against skip: the inherited projection must not change.
    Finding fc;
    fc.obligation = {ObligationKind::SkipCorrectness, sub, super, op.name, std::nullopt};
    fc.verdict = Verdict::Holds;
    for (const auto& t : co->tuples) {
      if (skip->contains({proj[t.s], t.i, proj[t.s2], t.o})) continue;
      fc.verdict = Verdict::Fails;
      Witness w;
      w.state = name_binding(sub_space->fields, sub_space->states[t.s]);
      w.post_state = name_binding(sub_space->fields, sub_space->states[t.s2]);
      if (!co->inputs->sig.fields.empty())
        w.input = name_binding(co->inputs->sig, co->inputs->all[t.i]);
      if (!co->outputs->sig.fields.empty())
        w.output = name_binding(co->outputs->sig, co->outputs->all[t.o]);
      fc.witness = std::move(w);
      fc.note = sub + "." + op.name + " updates inherited state, violating skip";
      break;
    }
    out.push_back(std::move(fc));
    return out;
  }

  // Relaxation: the operation is never promoted to the environment, so a
  // calculated virtual superclass operation simulates it.
  const std::string accepted_note =
      "extra operation simulated by its calculated virtual superclass operation";
  for (ObligationKind kind :
       {ObligationKind::SkipApplicability, ObligationKind::SkipCorrectness}) {
    Finding f;
    f.obligation = {kind, sub, super, op.name, std::nullopt};
    f.verdict = Verdict::AcceptedByRelaxation;
    f.note = accepted_note;
    out.push_back(std::move(f));
  }

  // Diagnostics: the virtual-operation theorem, checked empirically. These
  // never affect the conformance verdict, so a non-holding applicability is
  // reported under the relaxation rather than as Fails.
  const OpRelation ao = lift_relation(ws, *co, super);
  const auto ao_pre = pre_bitmap(ao);
  const auto co_pre = pre_bitmap(*co);

  Finding va;
  va.obligation = {ObligationKind::VirtualOpTheorem, sub, super, op.name, "applicability"};
  va.verdict = Verdict::Holds;
  va.note = "diagnostic: precondition of the calculated virtual operation reflected";
  for (std::uint32_t s = 0; s < sub_space->states.size() && va.verdict == Verdict::Holds;
       ++s) {
    for (std::uint32_t i = 0; i < n_inputs; ++i) {
      if (!ao_pre[proj[s] * n_inputs + i] || co_pre[s * n_inputs + i]) continue;
      va.verdict = Verdict::AcceptedByRelaxation;
      va.note = "diagnostic only: virtual operation enabled at state " +
                name_binding(sub_space->fields, sub_space->states[s]).str() +
                " whose own transition is not; does not affect conformance";
      break;
    }
  }
  out.push_back(std::move(va));

  Finding vc;
  vc.obligation = {ObligationKind::VirtualOpTheorem, sub, super, op.name, "correctness"};
  vc.verdict = Verdict::Holds;
  vc.note = "every transition of the extra operation is simulated by its "
            "calculated virtual operation";
  for (const auto& t : co->tuples) {
    if (ao.contains({proj[t.s], t.i, proj[t.s2], t.o})) continue;
    vc.verdict = Verdict::AcceptedByRelaxation;
    vc.note = "diagnostic anomaly: a transition escapes its own projection image";
    break;
  }
  out.push_back(std::move(vc));
  return out;
}

/* -------------------------------------------------------------------------- */
/* Aggregation                                                                 */
/* -------------------------------------------------------------------------- */

std::vector<Finding> check_edge(Workspace& ws, const std::string& sub,
                                const CheckConfig& config) {
  const Hierarchy& h = ws.hierarchy();
  const ClassSpec* cls = h.find(sub);
  if (!cls || !cls->parent)
    throw EvalInternalError("check_edge on a class without a parent: " + sub);
  const std::string& super = *cls->parent;

  std::vector<Finding> findings;
  findings.push_back(check_initialisation(ws, sub, super));
  for (const auto& op : cls->operations) {
    if (op.mode == OpMode::Specializes) {
      findings.push_back(check_applicability(ws, sub, super, op.name, config));
      findings.push_back(check_correctness(ws, sub, super, op.name, config.mode));
    } else {
      auto extra = check_extra_op(ws, sub, super, op, config);
      findings.insert(findings.end(), std::make_move_iterator(extra.begin()),
                      std::make_move_iterator(extra.end()));
    }
  }
  findings.push_back(check_finalisation(ws, sub, super));

  std::stable_sort(findings.begin(), findings.end(),
                   [](const Finding& a, const Finding& b) {
                     return std::make_tuple(static_cast<int>(a.obligation.kind),
                                            a.obligation.op.value_or(""),
                                            a.obligation.aspect.value_or("")) <
                            std::make_tuple(static_cast<int>(b.obligation.kind),
                                            b.obligation.op.value_or(""),
                                            b.obligation.aspect.value_or(""));
                   });
  return findings;
}

CheckReport check_hierarchy(Workspace& ws, const CheckConfig& config) {
  CheckReport report;
  for (const auto& cls : ws.hierarchy().classes) {
    if (!cls.parent) continue;
    EdgeReport edge;
    edge.subclass = cls.name;
    edge.superclass = *cls.parent;
    edge.findings = check_edge(ws, cls.name, config);
    report.edges.push_back(std::move(edge));
  }
  report.overall = OverallVerdict::Conformant;
  for (const auto& edge : report.edges)
    for (const auto& f : edge.findings)
      if (f.verdict == Verdict::Fails) report.overall = OverallVerdict::NonConformant;
  return report;
}

/* -------------------------------------------------------------------------- */
/* Witness self-checking                                                       */
/* -------------------------------------------------------------------------- */

namespace {

Binding rebuild_binding(const NamedBinding& nb) {
  Binding b;
  for (const auto& [name, value] : nb.entries) b.values.push_back(value);
  return b;
}

/// Fresh existential check: does any (s', o) satisfy the body at (s, i)?
bool enabled_somewhere(const OperationSpec& op, const StateSpace& space,
                       const BindingSpace& ins, const BindingSpace& outs,
                       const Binding& s, const Binding& i) {
  EvalEnv env;
  env.state = &space.fields;
  env.state_vals = &s;
  env.primed = &space.fields;
  env.inputs = &ins.sig;
  env.input_vals = &i;
  env.outputs = &outs.sig;
  for (const auto& s2 : space.states) {
    env.primed_vals = &s2;
    for (const auto& o : outs.all) {
      env.output_vals = &o;
      if (eval_predicate(*op.body, env)) return true;
    }
  }
  return false;
}

bool body_holds(const OperationSpec& op, const StateSpace& space,
                const BindingSpace& ins, const BindingSpace& outs, const Binding& s,
                const Binding& i, const Binding& s2, const Binding& o) {
  EvalEnv env;
  env.state = &space.fields;
  env.state_vals = &s;
  env.primed = &space.fields;
  env.primed_vals = &s2;
  env.inputs = &ins.sig;
  env.input_vals = &i;
  env.outputs = &outs.sig;
  env.output_vals = &o;
  return eval_predicate(*op.body, env);
}

}  // namespace

bool witness_reproduces(const Hierarchy& h, const Finding& f, std::uint64_t cap) {
  if (f.verdict != Verdict::Fails || !f.witness) return false;
  const Obligation& ob = f.obligation;
  const ClassSpec* sub_cls = h.find(ob.subclass);
  const ClassSpec* super_cls = h.find(ob.superclass);
  if (!sub_cls || !super_cls) return false;

  const StateSpace sub_space = enumerate_states(h, ob.subclass, cap);
  const StateSpace super_space = enumerate_states(h, ob.superclass, cap);
  const Witness& w = *f.witness;

  auto projected = [&](const Binding& s) {
    return project(h, ob.subclass, ob.superclass, s);
  };

  switch (ob.kind) {
    case ObligationKind::Initialisation: {
      if (!w.post_state) return false;
      const Binding s2 = rebuild_binding(*w.post_state);
      if (!sub_space.find(s2)) return false;
      EvalEnv env;
      env.primed = &sub_space.fields;
      env.primed_vals = &s2;
      if (!eval_predicate(*sub_cls->init, env)) return false;
      const Binding p = projected(s2);
      EvalEnv super_env;
      super_env.primed = &super_space.fields;
      super_env.primed_vals = &p;
      return !eval_predicate(*super_cls->init, super_env);
    }
    case ObligationKind::Finalisation: {
      if (!w.state) return false;
      const Binding s = rebuild_binding(*w.state);
      if (!sub_space.find(s)) return false;
      EvalEnv env;
      env.state = &sub_space.fields;
      env.state_vals = &s;
      if (!eval_predicate(*sub_cls->final_cond, env)) return false;
      const Binding p = projected(s);
      EvalEnv super_env;
      super_env.state = &super_space.fields;
      super_env.state_vals = &p;
      return !eval_predicate(*super_cls->final_cond, super_env);
    }
    case ObligationKind::Applicability:
    case ObligationKind::SkipApplicability: {
      if (!w.state || !ob.op) return false;
      const OperationSpec* co = h.find_op_at_or_above(ob.subclass, *ob.op);
      if (!co) return false;
      const BindingSpace ins = enumerate_bindings(co->inputs, cap, "inputs");
      const BindingSpace outs = enumerate_bindings(co->outputs, cap, "outputs");
      const Binding s = rebuild_binding(*w.state);
      if (!sub_space.find(s)) return false;
      Binding i;
      if (w.input) i = rebuild_binding(*w.input);
      if (!ins.find(i)) return false;
      if (enabled_somewhere(*co, sub_space, ins, outs, s, i))
        return false;  // the subclass op was enabled after all
      if (ob.kind == ObligationKind::SkipApplicability) return true;  // skip is total
      const OperationSpec* ao = h.find_op_at_or_above(ob.superclass, *ob.op);
      if (!ao) return false;
      return enabled_somewhere(*ao, super_space, ins, outs, projected(s), i);
    }
    case ObligationKind::CorrectnessNB:
    case ObligationKind::CorrectnessB:
    case ObligationKind::SkipCorrectness: {
      if (!w.state || !w.post_state || !ob.op) return false;
      const OperationSpec* co = h.find_op_at_or_above(ob.subclass, *ob.op);
      if (!co) return false;
      const BindingSpace ins = enumerate_bindings(co->inputs, cap, "inputs");
      const BindingSpace outs = enumerate_bindings(co->outputs, cap, "outputs");
      const Binding s = rebuild_binding(*w.state);
      const Binding s2 = rebuild_binding(*w.post_state);
      if (!sub_space.find(s) || !sub_space.find(s2)) return false;
      Binding i, o;
      if (w.input) i = rebuild_binding(*w.input);
      if (w.output) o = rebuild_binding(*w.output);
      if (!ins.find(i) || !outs.find(o)) return false;
      if (!body_holds(*co, sub_space, ins, outs, s, i, s2, o))
        return false;  // not a genuine subclass transition
      const Binding ps = projected(s);
      const Binding ps2 = projected(s2);
      if (ob.kind == ObligationKind::SkipCorrectness) return !(ps == ps2);
      const OperationSpec* ao = h.find_op_at_or_above(ob.superclass, *ob.op);
      if (!ao) return false;
      if (ob.kind == ObligationKind::CorrectnessNB &&
          !enabled_somewhere(*ao, super_space, ins, outs, ps, i))
        return false;  // outside the inherited contract; not a violation
      return !body_holds(*ao, super_space, ins, outs, ps, i, ps2, o);
    }
    case ObligationKind::VirtualOpTheorem:
      return false;  // diagnostics never carry a Fails witness
  }
  return false;
}

}  // namespace bi
