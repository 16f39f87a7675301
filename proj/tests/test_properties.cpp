#include "doctest.h"

#include <algorithm>

#include "bi/report.hpp"
#include "bi/system.hpp"
#include "generator.hpp"
#include "helpers.hpp"

using namespace bi;
using namespace bi::test;

namespace {

constexpr int kRounds = 60;  // the acceptance suite runs the full load
constexpr std::uint64_t kSeed = 0x5eed0001;

std::vector<CheckConfig> all_configs() {
  std::vector<CheckConfig> out;
  for (int mode = 0; mode < 2; ++mode)
    for (int mask = 0; mask < 4; ++mask) {
      CheckConfig c;
      c.mode = mode ? CheckMode::Blocking : CheckMode::NonBlocking;
      c.relax_virtual_ops = mask & 1;
      c.relax_abstract_classes = mask & 2;
      out.push_back(c);
    }
  return out;
}

}  // namespace

TEST_CASE("generated hierarchies are valid and enumerable") {
  HierarchyGen gen(kSeed);
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    auto errors = validate(g.h);
    CHECK_MESSAGE(errors.empty(), "round ", round, ": ",
                  errors.empty() ? "" : errors[0].message, "\n", print(g.h));
    for (const auto& cls : g.h.classes) {
      StateSpace space = enumerate_states(g.h, cls.name);
      CHECK(space.states.size() <= 500);
      CHECK(!space.states.empty());
    }
  }
}

TEST_CASE("round-trip: parse(print(h)) is h on generated hierarchies") {
  HierarchyGen gen(kSeed + 1);
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    const std::string printed = print(g.h);
    ParseResult again = parse(printed);
    REQUIRE_MESSAGE(again.ok(), "round ", round, " reparse failed:\n", printed,
                    "\nfirst error: ",
                    again.errors.empty() ? "-" : again.errors[0].str());
    CHECK_MESSAGE(hierarchy_equal(g.h, *again.hierarchy), "round ", round,
                  " round-trip mismatch:\n", printed);
  }
}

TEST_CASE("reflexive self-refinement never fails") {
  HierarchyGen gen(kSeed + 2);
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    for (const auto& cls : g.h.classes) {
      Hierarchy reflexive = reflexive_hierarchy(g.h, cls.name);
      REQUIRE(validate(reflexive).empty());
      Workspace ws(reflexive);
      for (const auto& mode : {CheckMode::NonBlocking, CheckMode::Blocking}) {
        CheckConfig config;
        config.mode = mode;
        for (const auto& f : check_edge(ws, cls.name, config))
          CHECK_MESSAGE(f.verdict != Verdict::Fails, "round ", round, " class ",
                        cls.name, " obligation ",
                        obligation_kind_name(f.obligation.kind), "\n", print(g.h));
      }
    }
  }
}

TEST_CASE("blocking correctness implies nonblocking correctness") {
  HierarchyGen gen(kSeed + 3);
  int implications = 0;
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    Workspace ws(g.h);
    for (const auto& cls : g.h.classes) {
      if (!cls.parent) continue;
      for (const auto& op : cls.operations) {
        if (op.mode != OpMode::Specializes) continue;
        Finding blocking =
            check_correctness(ws, cls.name, *cls.parent, op.name, CheckMode::Blocking);
        if (blocking.verdict != Verdict::Holds) continue;
        Finding nb = check_correctness(ws, cls.name, *cls.parent, op.name,
                                       CheckMode::NonBlocking);
        CHECK_MESSAGE(nb.verdict == Verdict::Holds, "round ", round, " op ", op.name,
                      "\n", print(g.h));
        ++implications;
      }
    }
  }
  CHECK(implications > 0);  // the suite actually exercised the implication
}

TEST_CASE("enabling a relaxation never adds a failure") {
  HierarchyGen gen(kSeed + 4);
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    Workspace ws(g.h);
    for (const auto& mode : {CheckMode::NonBlocking, CheckMode::Blocking}) {
      CheckConfig strict;
      strict.mode = mode;
      auto baseline = fails_keys(check_hierarchy(ws, strict));
      for (int mask = 1; mask < 4; ++mask) {
        CheckConfig config = strict;
        config.relax_virtual_ops = mask & 1;
        config.relax_abstract_classes = mask & 2;
        auto relaxed = fails_keys(check_hierarchy(ws, config));
        CHECK_MESSAGE(std::includes(baseline.begin(), baseline.end(), relaxed.begin(),
                                    relaxed.end()),
                      "round ", round, " mask ", mask, "\n", print(g.h));
      }
    }
  }
}

TEST_CASE("every failing witness re-evaluates to a genuine violation") {
  HierarchyGen gen(kSeed + 5);
  int witnesses = 0;
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    Workspace ws(g.h);
    for (const auto& config : all_configs()) {
      CheckReport report = check_hierarchy(ws, config);
      for (const Finding* f : all_fails(report)) {
        CHECK_MESSAGE(witness_reproduces(g.h, *f), "round ", round, " obligation ",
                      obligation_kind_name(f->obligation.kind), " on ",
                      f->obligation.subclass, ".", f->obligation.op.value_or("-"),
                      "\n", print(g.h));
        ++witnesses;
      }
    }
  }
  CHECK(witnesses > 0);  // the generator does produce violations
}

TEST_CASE("the calculated virtual operation simulates every extra operation") {
  HierarchyGen gen(kSeed + 6);
  int extras = 0;
  for (int round = 0; round < kRounds; ++round) {
    GeneratedHierarchy g = gen.next();
    Workspace ws(g.h);
    CheckConfig config;
    config.relax_virtual_ops = true;
    for (const auto& cls : g.h.classes) {
      if (!cls.parent) continue;
      for (const auto& op : cls.operations) {
        if (op.mode != OpMode::Introduces) continue;
        auto findings = check_extra_op(ws, cls.name, *cls.parent, op, config);
        const Finding* vc =
            find_finding(findings, ObligationKind::VirtualOpTheorem, op.name,
                         "correctness");
        REQUIRE(vc);
        CHECK_MESSAGE(vc->verdict == Verdict::Holds, "round ", round, " op ", op.name,
                      "\n", print(g.h));
        ++extras;

        // The theorem, re-stated: CO's tuples land inside lift(CO).
        auto co = ws.relation(cls.name, op.name);
        OpRelation ao = lift_relation(ws, *co, *cls.parent);
        for (const auto& t : co->tuples) {
          const Binding ps = project(g.h, cls.name, *cls.parent,
                                     co->space->states[t.s]);
          const Binding ps2 = project(g.h, cls.name, *cls.parent,
                                      co->space->states[t.s2]);
          CHECK(ao.contains({ao.space->index_of(ps), t.i, ao.space->index_of(ps2), t.o}));
        }
      }
    }
  }
  CHECK(extras > 0);
}

TEST_CASE("lifting commutes with relation union on generated relations") {
  HierarchyGen gen(kSeed + 7);
  for (int round = 0; round < 20; ++round) {
    GeneratedHierarchy g = gen.next();
    if (g.h.classes.size() < 2) continue;
    Workspace ws(g.h);
    const ClassSpec& child = g.h.classes[1];
    for (const auto& op : child.operations) {
      auto rel = ws.relation(child.name, op.name);
      if (rel->tuples.size() < 2) continue;
      OpRelation left = *rel, right = *rel;
      left.tuples.assign(rel->tuples.begin(),
                         rel->tuples.begin() + rel->tuples.size() / 2);
      right.tuples.assign(rel->tuples.begin() + rel->tuples.size() / 2,
                          rel->tuples.end());
      OpRelation whole = lift_relation(ws, *rel, *child.parent);
      OpRelation l = lift_relation(ws, left, *child.parent);
      OpRelation r = lift_relation(ws, right, *child.parent);
      std::set<OpRelation::Tuple> unioned(l.tuples.begin(), l.tuples.end());
      unioned.insert(r.tuples.begin(), r.tuples.end());
      CHECK(std::set<OpRelation::Tuple>(whole.tuples.begin(), whole.tuples.end()) ==
            unioned);
    }
  }
}

TEST_CASE("conformant deterministic hierarchies show no bounded divergence") {
  // The compositionality reading: local blocking conformance (with the
  // relaxations) transfers to the promoted level when nothing is globally
  // constrained. Output-set comparison is strict equality, so the check is
  // restricted to hierarchies whose operations are deterministic.
  HierarchyGen gen(kSeed + 8);
  int compared = 0;
  for (int round = 0; round < kRounds && compared < 12; ++round) {
    GeneratedHierarchy g = gen.next();
    if (!g.deterministic || g.h.classes.size() < 2) continue;
    Workspace ws(g.h);
    CheckConfig config;
    config.mode = CheckMode::Blocking;
    config.relax_virtual_ops = true;
    config.relax_abstract_classes = true;
    CheckReport report = check_hierarchy(ws, config);
    if (report.overall != OverallVerdict::Conformant) continue;

    for (std::size_t i = 1; i < g.h.classes.size(); ++i) {
      const ClassSpec& child = g.h.classes[i];
      const ClassSpec* parent = g.h.find(*child.parent);
      if (parent->abstract || child.abstract) continue;
      ComparisonResult r = compare_substitutability(ws, parent->name, child.name, 3,
                                                    CheckMode::Blocking, 6);
      CHECK_MESSAGE(r.no_divergence(), "round ", round, ": ",
                    r.divergence ? r.divergence->detail : "", "\n", print(g.h));
      ++compared;
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("mutilated sources always produce in-bounds spans") {
  HierarchyGen gen(kSeed + 9);
  std::mt19937_64 rng(kSeed + 10);
  for (int round = 0; round < 30; ++round) {
    GeneratedHierarchy g = gen.next();
    std::string src = print(g.h);
    switch (round % 3) {
      case 0:
        src = src.substr(0, src.size() / 2);  // truncate mid-token
        break;
      case 1:
        src.insert(rng() % (src.size() + 1), "@@");
        break;
      case 2:
        src.insert(rng() % (src.size() + 1), " undeclared' ");
        break;
    }
    ParseResult r = parse(src);
    if (r.ok()) continue;  // a benign mutation site
    int lines = 1;
    for (char c : src)
      if (c == '\n') ++lines;
    for (const auto& e : r.errors) {
      CHECK(e.span.start_line >= 1);
      CHECK(e.span.start_col >= 1);
      CHECK(e.span.end_line <= lines + 1);
      CHECK(!e.message.empty());
    }
  }
}
