#include "doctest.h"

#include "bi/system.hpp"
#include "helpers.hpp"

using namespace bi;
using namespace bi::test;

namespace {

Binding item_input(const Hierarchy& h, int idx) {
  auto item = h.find("Queue")->own_fields[0].domain->elem;
  Binding b;
  b.values.push_back(Value::enum_lit(item, static_cast<std::uint32_t>(idx)));
  return b;
}

}  // namespace

TEST_CASE("stepping a constrained object: the second join is the last enabled one") {
  Hierarchy h = parse_fixture("queues_global_rbq.bi");
  Workspace ws(h);

  SystemState sys;
  StepResult r = step(ws, sys, SystemEvent::make_new("RBQueue", 0), CheckMode::Blocking);
  REQUIRE(r.status == StepStatus::Ok);
  CHECK(system_invariant_violations(ws, r.state).empty());

  r = step(ws, r.state, SystemEvent::make_call(0, "join", item_input(h, 0)),
           CheckMode::Blocking);
  REQUIRE(r.status == StepStatus::Ok);
  r = step(ws, r.state, SystemEvent::make_call(0, "join", item_input(h, 0)),
           CheckMode::Blocking);
  REQUIRE(r.status == StepStatus::Ok);
  CHECK(r.state.objects.at(0).second.values[0].str() == "<a, a>");
  CHECK(system_invariant_violations(ws, r.state).empty());

  StepResult blocked = step(ws, r.state, SystemEvent::make_call(0, "join", item_input(h, 0)),
                            CheckMode::Blocking);
  CHECK(blocked.status == StepStatus::Blocked);
  CHECK(blocked.detail.find("constraint") != std::string::npos);

  // Non-blocking mode reports the violated contract instead of blocking.
  StepResult violated = step(ws, r.state,
                             SystemEvent::make_call(0, "join", item_input(h, 0)),
                             CheckMode::NonBlocking);
  CHECK(violated.status == StepStatus::ContractViolated);
}

TEST_CASE("dispatch goes to the direct class") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  SystemState sys;
  StepResult r = step(ws, sys, SystemEvent::make_new("BQueue", 0), CheckMode::Blocking);
  REQUIRE(r.status == StepStatus::Ok);
  // 'join' resolves through the inherited name but runs BQueue's relation:
  // three joins fill the bound, the fourth blocks on the precondition.
  for (int k = 0; k < 3; ++k) {
    r = step(ws, r.state, SystemEvent::make_call(0, "join", item_input(h, 1)),
             CheckMode::Blocking);
    REQUIRE(r.status == StepStatus::Ok);
  }
  CHECK(r.state.objects.at(0).second.values[0].str() == "<b, b, b>");
  StepResult fourth = step(ws, r.state, SystemEvent::make_call(0, "join", item_input(h, 1)),
                           CheckMode::Blocking);
  CHECK(fourth.status == StepStatus::Blocked);
  CHECK(fourth.detail.find("precondition") != std::string::npos);

  // leave outputs deterministically and shrinks the queue.
  StepResult after_leave =
      step(ws, r.state, SystemEvent::make_call(0, "leave"), CheckMode::Blocking);
  REQUIRE(after_leave.status == StepStatus::Ok);
  CHECK(after_leave.state.objects.at(0).second.values[0].str() == "<b, b>");
}

TEST_CASE("delete respects the finalisation condition") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  SystemState sys;
  StepResult r = step(ws, sys, SystemEvent::make_new("RBQueue", 1), CheckMode::Blocking);
  REQUIRE(r.status == StepStatus::Ok);
  // Default finalisation is total: deletion always allowed.
  StepResult gone = step(ws, r.state, SystemEvent::make_delete(1), CheckMode::Blocking);
  CHECK(gone.status == StepStatus::Ok);
  CHECK(gone.state.objects.empty());

  Hierarchy guarded = parse_ok(
      "class A { var n : int 0..2; init n' = 1; final n = 0; op dec() { n' = 0 } }\n");
  Workspace wsg(guarded);
  SystemState sys2;
  StepResult g = step(wsg, sys2, SystemEvent::make_new("A", 0), CheckMode::Blocking);
  REQUIRE(g.status == StepStatus::Ok);
  CHECK(step(wsg, g.state, SystemEvent::make_delete(0), CheckMode::Blocking).status ==
        StepStatus::Blocked);
  StepResult after = step(wsg, g.state, SystemEvent::make_call(0, "dec"),
                          CheckMode::Blocking);
  REQUIRE(after.status == StepStatus::Ok);
  CHECK(step(wsg, after.state, SystemEvent::make_delete(0), CheckMode::Blocking).status ==
        StepStatus::Ok);
}

TEST_CASE("system errors: unknown names, pools, abstract classes") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  SystemState sys;

  CHECK_THROWS_AS(step(ws, sys, SystemEvent::make_call(0, "join", item_input(h, 0)),
                       CheckMode::Blocking),
                  SystemError);
  CHECK_THROWS_AS(step(ws, sys, SystemEvent::make_new("Queue", 0), CheckMode::Blocking),
                  SystemError);  // abstract
  CHECK_THROWS_AS(step(ws, sys, SystemEvent::make_new("Nope", 0), CheckMode::Blocking),
                  SystemError);
  CHECK_THROWS_AS(step(ws, sys, SystemEvent::make_new("BQueue", 99), CheckMode::Blocking),
                  SystemError);  // outside the pool

  StepResult r = step(ws, sys, SystemEvent::make_new("BQueue", 0), CheckMode::Blocking);
  CHECK_THROWS_AS(step(ws, r.state, SystemEvent::make_call(0, "nope"), CheckMode::Blocking),
                  SystemError);
}

TEST_CASE("derived extensions are monotone along subclassing") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  SystemState sys;
  sys = step(ws, sys, SystemEvent::make_new("BQueue", 0), CheckMode::Blocking).state;
  sys = step(ws, sys, SystemEvent::make_new("RBQueue", 1), CheckMode::Blocking).state;

  auto ext_q = sys.extension(h, "Queue");
  auto ext_b = sys.extension(h, "BQueue");
  auto ext_r = sys.extension(h, "RBQueue");
  CHECK(ext_r == std::vector<ObjectId>{1});
  CHECK(ext_b == std::vector<ObjectId>{0, 1});
  CHECK(ext_q == std::vector<ObjectId>{0, 1});
  for (ObjectId id : ext_r) CHECK(std::count(ext_b.begin(), ext_b.end(), id) == 1);
  for (ObjectId id : ext_b) CHECK(std::count(ext_q.begin(), ext_q.end(), id) == 1);
}

TEST_CASE("freeness lint flags non-root constraint placements") {
  Hierarchy rbq = parse_fixture("queues_global_rbq.bi");
  auto findings = lint_freeness(rbq);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].class_name == "RBQueue");
  CHECK(findings[0].severity == LintSeverity::Warning);

  Hierarchy bq = parse_fixture("queues_global_bq.bi");
  auto findings_bq = lint_freeness(bq);
  REQUIRE(findings_bq.size() == 1);
  CHECK(findings_bq[0].class_name == "BQueue");
  CHECK(findings_bq[0].severity == LintSeverity::Warning);

  CHECK(lint_freeness(parse_fixture("queues.bi")).empty());

  // Strict mode: a concrete proper ancestor upgrades the severity; an
  // abstract-only ancestry stays a warning.
  auto strict_rbq = lint_freeness(rbq, /*strict=*/true);
  CHECK(strict_rbq[0].severity == LintSeverity::Error);
  auto strict_bq = lint_freeness(bq, /*strict=*/true);
  CHECK(strict_bq[0].severity == LintSeverity::Warning);
}

TEST_CASE("trace comparison finds the third-join divergence") {
  Hierarchy h = parse_fixture("queues_global_rbq.bi");
  Workspace ws(h);
  ComparisonResult r =
      compare_substitutability(ws, "BQueue", "RBQueue", 3, CheckMode::NonBlocking);
  REQUIRE(r.divergence.has_value());
  const TraceDivergence& d = *r.divergence;
  CHECK(d.step == 2);  // 0-based; the third step
  CHECK(d.reason == DivergenceReason::EnablednessMismatch);
  REQUIRE(d.trace.size() == 3);
  for (const auto& ev : d.trace) CHECK(ev.str() == "join(item? = a)");
  REQUIRE(d.transcript_b.size() == 3);
  CHECK(d.transcript_a[2] == "step 3: call join(item? = a) -> enabled");
  CHECK(d.transcript_b[2] == "step 3: call join(item? = a) -> violated");

  // Blocking mode words the refusal as blocking.
  ComparisonResult rb =
      compare_substitutability(ws, "BQueue", "RBQueue", 3, CheckMode::Blocking);
  REQUIRE(rb.divergence.has_value());
  CHECK(rb.divergence->transcript_b[2] == "step 3: call join(item? = a) -> blocked");
}

TEST_CASE("moving the constraint to the superclass removes the divergence") {
  Hierarchy h = parse_fixture("queues_global_bq.bi");
  Workspace ws(h);
  ComparisonResult r =
      compare_substitutability(ws, "BQueue", "RBQueue", 6, CheckMode::NonBlocking);
  CHECK(r.no_divergence());
}

TEST_CASE("self-comparison never diverges") {
  Hierarchy h = parse_fixture("queues_global_rbq.bi");
  Workspace ws(h);
  CHECK(compare_substitutability(ws, "RBQueue", "RBQueue", 4, CheckMode::NonBlocking)
            .no_divergence());
}

TEST_CASE("swapping the sides flips who blocks but not the divergence point") {
  Hierarchy h = parse_fixture("queues_global_rbq.bi");
  Workspace ws(h);
  ComparisonResult fwd =
      compare_substitutability(ws, "BQueue", "RBQueue", 3, CheckMode::NonBlocking);
  ComparisonResult swapped =
      compare_substitutability(ws, "RBQueue", "BQueue", 3, CheckMode::NonBlocking);
  REQUIRE(fwd.divergence.has_value());
  REQUIRE(swapped.divergence.has_value());
  CHECK(fwd.divergence->step == swapped.divergence->step);
  CHECK(fwd.divergence->reason == swapped.divergence->reason);
  CHECK(fwd.divergence->detail.find("enabled for BQueue") != std::string::npos);
  CHECK(swapped.divergence->detail.find("enabled for BQueue") != std::string::npos);
}

TEST_CASE("output nondeterminism is compared set-valued") {
  // The parent answers any value, the child always answers 0: observable.
  Hierarchy h = parse_ok(
      "class A { var n : int 0..1; init n' = 0;\n"
      "  op ask() -> v : int 0..1 { n' = n } }\n"
      "class B extends A { override op ask() -> v : int 0..1 { n' = n /\\ v! = 0 } }\n");
  Workspace ws(h);
  ComparisonResult r =
      compare_substitutability(ws, "A", "B", 2, CheckMode::NonBlocking);
  REQUIRE(r.divergence.has_value());
  CHECK(r.divergence->step == 0);
  CHECK(r.divergence->reason == DivergenceReason::OutputMismatch);
}

TEST_CASE("depth above the cap raises DepthTooLarge") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  CHECK_THROWS_AS(
      compare_substitutability(ws, "BQueue", "RBQueue", 7, CheckMode::NonBlocking, 6),
      DepthTooLarge);
}

TEST_CASE("comparison requires non-abstract classes") {
  Hierarchy h = parse_fixture("queues.bi");
  Workspace ws(h);
  CHECK_THROWS_AS(
      compare_substitutability(ws, "Queue", "BQueue", 3, CheckMode::NonBlocking),
      SystemError);
}

TEST_CASE("a conformant deterministic pair shows no divergence") {
  Hierarchy h = parse_fixture("counters.bi");
  Workspace ws(h);
  CheckConfig config;
  config.mode = CheckMode::Blocking;
  config.relax_virtual_ops = true;
  REQUIRE(check_hierarchy(ws, config).overall == OverallVerdict::Conformant);
  ComparisonResult r = compare_substitutability(ws, "Counter", "FlaggedCounter", 5,
                                                CheckMode::Blocking, 6);
  CHECK(r.no_divergence());
}

TEST_CASE("stepping a class with no initial states blocks object creation") {
  Hierarchy h = parse_ok(
      "class A { var n : int 0..2; invariant n < 1; init n' = 2; }");
  // init pins a value outside the invariant: nothing to create.
  Workspace ws(h);
  SystemState sys;
  CHECK(step(ws, sys, SystemEvent::make_new("A", 0), CheckMode::Blocking).status ==
        StepStatus::Blocked);
}
