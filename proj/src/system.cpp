#include "bi/system.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>

namespace bi {

std::string object_name(ObjectId id) { return "o" + std::to_string(id + 1); }

/* -------------------------------------------------------------------------- */
/* SystemState                                                                 */
/* -------------------------------------------------------------------------- */

std::vector<ObjectId> SystemState::extension(const Hierarchy& h,
                                             const std::string& cls) const {
  std::vector<ObjectId> ext;
  for (const auto& [id, obj] : objects)
    if (h.is_ancestor_or_self(cls, obj.first)) ext.push_back(id);
  return ext;
}

std::optional<ObjectId> SystemState::first_free() const {
  for (ObjectId id = 0; id < pool_size; ++id)
    if (!objects.count(id)) return id;
  return std::nullopt;
}

std::vector<std::string> system_invariant_violations(Workspace& ws,
                                                     const SystemState& sys) {
  std::vector<std::string> issues;
  const Hierarchy& h = ws.hierarchy();
  for (const auto& [id, obj] : sys.objects) {
    const auto& [cls_name, binding] = obj;
    if (id >= sys.pool_size)
      issues.push_back(object_name(id) + " lies outside the id pool");
    const ClassSpec* cls = h.find(cls_name);
    if (!cls) {
      issues.push_back(object_name(id) + " has unknown class " + cls_name);
      continue;
    }
    if (cls->abstract)
      issues.push_back(object_name(id) + " directly instantiates abstract class " +
                       cls_name);
    if (!ws.space(cls_name)->find(binding))
      issues.push_back(object_name(id) + " has a state outside the state space of " +
                       cls_name);
  }
  return issues;
}

/* -------------------------------------------------------------------------- */
/* Events                                                                      */
/* -------------------------------------------------------------------------- */

SystemEvent SystemEvent::make_new(std::string cls, ObjectId id) {
  SystemEvent ev;
  ev.kind = Kind::New;
  ev.class_name = std::move(cls);
  ev.object = id;
  return ev;
}

SystemEvent SystemEvent::make_delete(ObjectId id) {
  SystemEvent ev;
  ev.kind = Kind::Delete;
  ev.object = id;
  return ev;
}

SystemEvent SystemEvent::make_call(ObjectId id, std::string op, Binding input) {
  SystemEvent ev;
  ev.kind = Kind::Call;
  ev.object = id;
  ev.op = std::move(op);
  ev.input = std::move(input);
  return ev;
}

namespace {

/// First global constraint the given local state violates, if any. The
/// constraints attached to a class cover its derived extension, so every
/// ancestor-or-self constraint applies, evaluated on the projected view.
std::optional<std::string> constraint_violation(Workspace& ws,
                                                const std::string& direct_cls,
                                                const Binding& state) {
  const Hierarchy& h = ws.hierarchy();
  for (const auto& gc : h.global_constraints) {
    if (!h.is_ancestor_or_self(gc.class_name, direct_cls)) continue;
    const Binding view = project(h, direct_cls, gc.class_name, state);
    auto space = ws.space(gc.class_name);
    EvalEnv env;
    env.state = &space->fields;
    env.state_vals = &view;
    if (!eval_predicate(*gc.body, env))
      return "global constraint on " + gc.class_name + " fails";
  }
  return std::nullopt;
}

}  // namespace

namespace {

StepResult step_impl(Workspace& ws, const SystemState& sys, const SystemEvent& ev,
                     CheckMode mode);

}  // namespace

StepResult step(Workspace& ws, const SystemState& sys, const SystemEvent& ev,
                CheckMode mode) {
  StepResult result = step_impl(ws, sys, ev, mode);
#ifndef NDEBUG
  if (result.status == StepStatus::Ok)
    assert(system_invariant_violations(ws, result.state).empty());
#endif
  return result;
}

namespace {

StepResult step_impl(Workspace& ws, const SystemState& sys, const SystemEvent& ev,
                     CheckMode mode) {
  const Hierarchy& h = ws.hierarchy();
  StepResult result;
  result.state = sys;

  auto refuse = [&](const std::string& why) {
    result.status =
        mode == CheckMode::Blocking ? StepStatus::Blocked : StepStatus::ContractViolated;
    result.state = sys;
    result.detail = why;
    return result;
  };

  switch (ev.kind) {
    case SystemEvent::Kind::New: {
      const ClassSpec* cls = h.find(ev.class_name);
      if (!cls)
        throw SystemError(SystemError::Kind::UnknownClass,
                          "unknown class '" + ev.class_name + "'");
      if (cls->abstract)
        throw SystemError(SystemError::Kind::InvalidEvent,
                          "abstract class '" + ev.class_name + "' has no direct instances");
      if (ev.object >= sys.pool_size)
        throw SystemError(SystemError::Kind::PoolExhausted,
                          "object id outside the pool of " +
                              std::to_string(sys.pool_size));
      if (sys.exists(ev.object))
        throw SystemError(SystemError::Kind::InvalidEvent,
                          object_name(ev.object) + " already exists");

      auto space = ws.space(ev.class_name);
      for (std::uint32_t idx : ws.init_states(ev.class_name)) {
        const Binding& s0 = space->states[idx];
        if (constraint_violation(ws, ev.class_name, s0)) continue;
        result.status = StepStatus::Ok;
        result.state.objects[ev.object] = {ev.class_name, s0};
        return result;
      }
      return refuse("no initial state of " + ev.class_name +
                    " satisfies the global constraints");
    }

    case SystemEvent::Kind::Delete: {
      auto it = sys.objects.find(ev.object);
      if (it == sys.objects.end())
        throw SystemError(SystemError::Kind::UnknownObject,
                          "no such object " + object_name(ev.object));
      const auto& [cls_name, binding] = it->second;
      const ClassSpec* cls = h.find(cls_name);
      auto space = ws.space(cls_name);
      EvalEnv env;
      env.state = &space->fields;
      env.state_vals = &binding;
      if (!eval_predicate(*cls->final_cond, env))
        return refuse("finalisation condition of " + cls_name + " does not hold");
      result.status = StepStatus::Ok;
      result.state.objects.erase(ev.object);
      return result;
    }

    case SystemEvent::Kind::Call: {
      auto it = sys.objects.find(ev.object);
      if (it == sys.objects.end())
        throw SystemError(SystemError::Kind::UnknownObject,
                          "no such object " + object_name(ev.object));
      const auto& [cls_name, binding] = it->second;
      const OperationSpec* op = h.find_op_at_or_above(cls_name, ev.op);
      if (!op)
        throw SystemError(SystemError::Kind::UnknownOperation,
                          "class " + cls_name + " has no operation '" + ev.op + "'");

      // Dispatch on the direct class: its relation realises the call.
      auto rel = ws.relation(cls_name, ev.op);
      auto in_idx = rel->inputs->find(ev.input);
      if (!in_idx)
        throw SystemError(SystemError::Kind::InvalidEvent,
                          "input binding outside the domains of '" + ev.op + "'");

      if (auto why = constraint_violation(ws, cls_name, binding))
        return refuse("call " + ev.op + " on " + object_name(ev.object) + ": " + *why);

      const std::uint32_t s = rel->space->index_of(binding);
      for (const auto& t : rel->tuples) {
        if (t.s != s || t.i != *in_idx) continue;
        // Deterministic resolution: the first transition in order.
        result.status = StepStatus::Ok;
        result.state.objects[ev.object].second = rel->space->states[t.s2];
        return result;
      }
      return refuse("call " + ev.op + " on " + object_name(ev.object) +
                    " is outside the operation's precondition");
    }
  }
  throw SystemError(SystemError::Kind::InvalidEvent, "malformed event");
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* Freeness lint                                                               */
/* -------------------------------------------------------------------------- */

std::vector<LintFinding> lint_freeness(const Hierarchy& h, bool strict) {
  std::vector<LintFinding> findings;
  for (const auto& gc : h.global_constraints) {
    const ClassSpec* cls = h.find(gc.class_name);
    if (!cls || !cls->parent) continue;  // root placement is compositionality-safe

    bool concrete_ancestor = false;
    for (const ClassSpec* anc : h.ancestor_chain(gc.class_name)) {
      if (anc->name == gc.class_name) continue;
      if (!anc->abstract) concrete_ancestor = true;
    }

    LintFinding f;
    f.class_name = gc.class_name;
    f.constraint = gc.body;
    f.severity = strict && concrete_ancestor ? LintSeverity::Error : LintSeverity::Warning;
    f.message = "global constraint on '" + gc.class_name +
                "', a class with ancestors: objects of sibling or ancestor classes are "
                "not equally constrained, which can break substitutability; prefer "
                "attaching constraints to a class with no ancestors";
    findings.push_back(std::move(f));
  }
  return findings;
}

/* -------------------------------------------------------------------------- */
/* Substitutability comparison                                                 */
/* -------------------------------------------------------------------------- */

const char* divergence_reason_name(DivergenceReason r) {
  switch (r) {
    case DivergenceReason::EnablednessMismatch: return "EnablednessMismatch";
    case DivergenceReason::OutputMismatch: return "OutputMismatch";
  }
  return "?";
}

std::string EventTemplate::str() const {
  std::string s = op + "(";
  for (std::size_t i = 0; i < input.entries.size(); ++i) {
    if (i) s += ", ";
    s += input.entries[i].first + "? = " + input.entries[i].second.str();
  }
  s += ")";
  return s;
}

namespace {

struct TemplateInfo {
  std::string op;
  std::uint32_t input_idx = 0;
  std::shared_ptr<const BindingSpace> inputs;
  std::shared_ptr<const BindingSpace> outputs;

  EventTemplate to_event() const {
    EventTemplate ev;
    ev.op = op;
    ev.input = name_binding(inputs->sig, inputs->all[input_idx]);
    return ev;
  }
};

/// One side of the comparison: a single fresh object of a fixed class,
/// tracked as the set of states it may be in.
struct Side {
  std::string cls;
  std::shared_ptr<const StateSpace> space;
  std::shared_ptr<const OpRelation> relation(Workspace& ws, const std::string& op) {
    return ws.relation(cls, op);
  }
};

struct StepOutcome {
  bool enabled = false;
  std::vector<std::uint32_t> next_states;  // sorted unique
  std::set<std::uint32_t> outputs;
};

StepOutcome apply_template(Workspace& ws, Side& side,
                           const std::vector<std::uint32_t>& states,
                           const TemplateInfo& tmpl) {
  StepOutcome out;
  auto rel = side.relation(ws, tmpl.op);
  std::set<std::uint32_t> next;
  for (std::uint32_t s : states) {
    if (constraint_violation(ws, side.cls, side.space->states[s])) continue;
    for (const auto& t : rel->tuples) {
      if (t.s != s || t.i != tmpl.input_idx) continue;
      next.insert(t.s2);
      out.outputs.insert(t.o);
    }
  }
  out.enabled = !next.empty();
  out.next_states.assign(next.begin(), next.end());
  return out;
}

std::string output_set_str(const std::set<std::uint32_t>& outs,
                           const BindingSpace& space) {
  std::string s = "{";
  bool first = true;
  for (std::uint32_t o : outs) {
    if (!first) s += ", ";
    first = false;
    s += name_binding(space.sig, space.all[o]).str();
  }
  return s + "}";
}

}  // namespace

ComparisonResult compare_substitutability(Workspace& ws, const std::string& class_a,
                                          const std::string& class_b,
                                          std::uint32_t depth, CheckMode mode,
                                          std::uint32_t max_depth) {
  const Hierarchy& h = ws.hierarchy();
  ComparisonResult result;
  result.class_a = class_a;
  result.class_b = class_b;
  result.depth = depth;

  const ClassSpec* ca = h.find(class_a);
  const ClassSpec* cb = h.find(class_b);
  if (!ca || !cb)
    throw SystemError(SystemError::Kind::UnknownClass,
                      "unknown class in comparison: " +
                          std::string(!ca ? class_a : class_b));
  if (ca->abstract || cb->abstract)
    throw SystemError(SystemError::Kind::InvalidEvent,
                      "substitutability comparison needs non-abstract classes");
  if (depth > max_depth)
    throw DepthTooLarge("depth " + std::to_string(depth) + " exceeds the cap of " +
                        std::to_string(max_depth));

  // The observable alphabet: operations of class_a when it is an ancestor
  // of class_b, otherwise of their nearest common ancestor. Extra
  // operations of the descendant are not part of the comparison.
  std::string alphabet_cls = class_a;
  if (!h.is_ancestor_or_self(class_a, class_b)) {
    auto common = h.common_ancestor(class_a, class_b);
    if (!common)
      throw SystemError(SystemError::Kind::InvalidEvent,
                        class_a + " and " + class_b + " share no common ancestor");
    alphabet_cls = *common;
  }

  std::vector<TemplateInfo> templates;
  for (const std::string& op_name : h.effective_op_names(alphabet_cls)) {
    const OperationSpec* op = h.find_op_at_or_above(alphabet_cls, op_name);
    auto ins = ws.input_space(*op);
    auto outs = ws.output_space(*op);
    for (std::uint32_t i = 0; i < ins->all.size(); ++i)
      templates.push_back({op_name, i, ins, outs});
  }

  Side side_a{class_a, ws.space(class_a)};
  Side side_b{class_b, ws.space(class_b)};

  auto initial_states = [&](Side& side) {
    std::vector<std::uint32_t> states;
    for (std::uint32_t idx : ws.init_states(side.cls))
      if (!constraint_violation(ws, side.cls, side.space->states[idx]))
        states.push_back(idx);
    return states;
  };

  struct Node {
    std::vector<std::size_t> trace;  // template indices
    std::vector<std::uint32_t> states_a, states_b;
  };
  std::deque<Node> queue;
  queue.push_back({{}, initial_states(side_a), initial_states(side_b)});

  const char* refused_word =
      mode == CheckMode::Blocking ? "blocked" : "violated";

  auto make_divergence = [&](const Node& node, std::size_t tmpl_idx,
                             DivergenceReason reason, std::string detail) {
    TraceDivergence div;
    for (std::size_t t : node.trace) div.trace.push_back(templates[t].to_event());
    div.trace.push_back(templates[tmpl_idx].to_event());
    div.step = div.trace.size() - 1;
    div.reason = reason;
    div.detail = std::move(detail);

    // Replay transcripts for both sides along the diverging trace.
    auto replay = [&](Side& side, std::vector<std::string>& log) {
      std::vector<std::uint32_t> states = initial_states(side);
      for (std::size_t k = 0; k < div.trace.size(); ++k) {
        const TemplateInfo& tmpl = templates[k < node.trace.size() ? node.trace[k]
                                                                   : tmpl_idx];
        StepOutcome outcome = apply_template(ws, side, states, tmpl);
        log.push_back("step " + std::to_string(k + 1) + ": call " +
                      tmpl.to_event().str() + " -> " +
                      (outcome.enabled ? "enabled" : refused_word));
        if (!outcome.enabled) break;
        states = outcome.next_states;
      }
    };
    replay(side_a, div.transcript_a);
    replay(side_b, div.transcript_b);
    return div;
  };

  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    if (node.trace.size() >= depth) continue;

    for (std::size_t t = 0; t < templates.size(); ++t) {
      StepOutcome a = apply_template(ws, side_a, node.states_a, templates[t]);
      StepOutcome b = apply_template(ws, side_b, node.states_b, templates[t]);

      if (a.enabled != b.enabled) {
        const std::string& on = a.enabled ? class_a : class_b;
        const std::string& off = a.enabled ? class_b : class_a;
        result.divergence = make_divergence(
            node, t, DivergenceReason::EnablednessMismatch,
            "call " + templates[t].to_event().str() + " is enabled for " + on +
                " but " + refused_word + " for " + off);
        return result;
      }
      if (!a.enabled) continue;  // both refuse: no observable continuation

      if (a.outputs != b.outputs) {
        result.divergence = make_divergence(
            node, t, DivergenceReason::OutputMismatch,
            "call " + templates[t].to_event().str() + " yields outputs " +
                output_set_str(a.outputs, *templates[t].outputs) + " for " + class_a +
                " but " + output_set_str(b.outputs, *templates[t].outputs) + " for " +
                class_b);
        return result;
      }

      if (node.trace.size() + 1 < depth) {
        Node next;
        next.trace = node.trace;
        next.trace.push_back(t);
        next.states_a = std::move(a.next_states);
        next.states_b = std::move(b.next_states);
        queue.push_back(std::move(next));
      }
    }
  }

  return result;  // no divergence within the bound
}

}  // namespace bi
