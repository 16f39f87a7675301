#include "doctest.h"

#include <algorithm>
#include <set>

#include "bi/model.hpp"
#include "helpers.hpp"

using namespace bi;
using namespace bi::test;

TEST_CASE("domain cardinalities") {
  CHECK(Domain::boolean()->cardinality() == 2);
  CHECK(Domain::int_range(0, 3)->cardinality() == 4);
  CHECK(Domain::int_range(-2, 2)->cardinality() == 5);
  CHECK(Domain::enumeration("", {"a", "b"})->cardinality() == 2);
  // sum over lengths 0..4 of 2^k = 1+2+4+8+16
  auto item = Domain::enumeration("", {"a", "b"});
  CHECK(Domain::bounded_seq(item, 4)->cardinality() == 31);
  CHECK(Domain::bounded_seq(item, 0)->cardinality() == 1);
  CHECK(Domain::bounded_seq(Domain::enumeration("", {"x", "y", "z"}), 2)->cardinality() ==
        1 + 3 + 9);
}

TEST_CASE("domain rendering and equality") {
  CHECK(Domain::int_range(0, 3)->str() == "int 0..3");
  CHECK(Domain::bounded_seq(Domain::enumeration("", {"a", "b"}), 4)->str() ==
        "seq(enum {a, b}, 4)");
  CHECK(*Domain::enumeration("", {"a", "b"}) == *Domain::enumeration("", {"a", "b"}));
  CHECK(*Domain::enumeration("", {"a", "b"}) != *Domain::enumeration("", {"b", "a"}));
  CHECK(*Domain::enumeration("N", {"a"}) != *Domain::enumeration("", {"a"}));
}

TEST_CASE("values: membership, ordering, printing") {
  auto item = Domain::enumeration("", {"a", "b"});
  auto seq4 = Domain::bounded_seq(item, 4);

  CHECK(value_in_domain(Value::integer(2), *Domain::int_range(0, 3)));
  CHECK(!value_in_domain(Value::integer(4), *Domain::int_range(0, 3)));
  CHECK(value_in_domain(Value::seq({Value::enum_lit(item, 0)}), *seq4));
  CHECK(!value_in_domain(
      Value::seq({Value::enum_lit(item, 0), Value::enum_lit(item, 0),
                  Value::enum_lit(item, 0), Value::enum_lit(item, 0),
                  Value::enum_lit(item, 0)}),
      *seq4));  // length 5 > bound

  // Sequences order by length first, then element-wise.
  Value ab = Value::seq({Value::enum_lit(item, 0), Value::enum_lit(item, 1)});
  Value b = Value::seq({Value::enum_lit(item, 1)});
  CHECK(b < ab);
  CHECK(Value::seq({}) < b);

  CHECK(ab.str() == "<a, b>");
  CHECK(Value::seq({}).str() == "<>");
  CHECK(Value::boolean(true).str() == "true");
  CHECK(Value::integer(-3).str() == "-3");
}

TEST_CASE("queues fixture validates cleanly") {
  Hierarchy h = parse_fixture("queues.bi");
  CHECK(validate(h).empty());
  CHECK(h.classes.size() == 3);
  CHECK(h.find("Queue")->abstract);
  CHECK(!h.find("BQueue")->abstract);
}

TEST_CASE("effective fields and invariants compose along the chain") {
  Hierarchy h = parse_fixture("counters.bi");
  auto counter_fields = h.effective_fields("Counter");
  auto flagged_fields = h.effective_fields("FlaggedCounter");
  REQUIRE(counter_fields.size() == 1);
  REQUIRE(flagged_fields.size() == 2);
  // Prefix property: the parent's fields open the child's list.
  CHECK(flagged_fields[0] == counter_fields[0]);
  CHECK(flagged_fields[1].name == "flag");

  Hierarchy q = parse_fixture("queues.bi");
  // BQueue's effective invariant carries the inlined constant: #items <= 3.
  ExprPtr inv = q.effective_invariant("BQueue");
  REQUIRE(inv->kind == Expr::Kind::Le);
  CHECK(inv->lhs->kind == Expr::Kind::Len);
  REQUIRE(inv->rhs->kind == Expr::Kind::Lit);
  CHECK(inv->rhs->lit == Value::integer(3));
}

TEST_CASE("validate: field redeclaration across the chain") {
  ParseResult r = parse(
      "class A { var n : int 0..1; }\n"
      "class B extends A { var n : bool; }\n");
  REQUIRE(r.ok());
  auto errors = validate(*r.hierarchy);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].code == StructuralError::Code::DuplicateField);
  CHECK(errors[0].class_name == "B");
  CHECK(errors[0].member == "n");
}

TEST_CASE("validate: parent cycles and unknown parents") {
  Hierarchy h;
  ClassSpec a, b;
  a.name = "A";
  a.parent = "B";
  b.name = "B";
  b.parent = "A";
  h.classes = {a, b};
  auto errors = validate(h);
  REQUIRE(!errors.empty());
  CHECK(std::any_of(errors.begin(), errors.end(), [](const StructuralError& e) {
    return e.code == StructuralError::Code::CyclicParent;
  }));

  Hierarchy h2;
  ClassSpec c;
  c.name = "C";
  c.parent = "Ghost";
  h2.classes = {c};
  auto errors2 = validate(h2);
  REQUIRE(errors2.size() == 1);
  CHECK(errors2[0].code == StructuralError::Code::UnknownParent);
}

TEST_CASE("validate: operation modes against the ancestry") {
  // override with no ancestor declaration
  ParseResult r1 = parse(
      "class A { var n : int 0..1; }\n"
      "class B extends A { override op foo() { n' = n } }\n");
  REQUIRE(r1.ok());
  auto e1 = validate(*r1.hierarchy);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].code == StructuralError::Code::SignatureMismatch);

  // plain op although the ancestor declares the name
  ParseResult r2 = parse(
      "class A { var n : int 0..1; op foo() { n' = n } }\n"
      "class B extends A { op foo() { n' = n } }\n");
  REQUIRE(r2.ok());
  auto e2 = validate(*r2.hierarchy);
  REQUIRE(e2.size() == 1);
  CHECK(e2[0].code == StructuralError::Code::IntroducesExisting);

  // override with a differing signature
  ParseResult r3 = parse(
      "class A { var n : int 0..1; op foo(x : bool) { n' = n } }\n"
      "class B extends A { override op foo(x : int 0..1) { n' = n } }\n");
  REQUIRE(r3.ok());
  auto e3 = validate(*r3.hierarchy);
  REQUIRE(e3.size() == 1);
  CHECK(e3[0].code == StructuralError::Code::SignatureMismatch);
}

TEST_CASE("validate: malformed domains and constants") {
  Hierarchy h;
  ClassSpec a;
  a.name = "A";
  a.own_fields.push_back({"e", Domain::enumeration("", {"x", "x"})});
  a.own_fields.push_back({"r", Domain::int_range(3, 1)});
  a.own_fields.push_back(
      {"s", Domain::bounded_seq(Domain::bounded_seq(Domain::boolean(), 1), 1)});
  a.constants.push_back({"k", Domain::int_range(0, 2), Value::integer(7)});
  h.classes = {a};
  auto errors = validate(h);
  std::set<StructuralError::Code> codes;
  for (const auto& e : errors) codes.insert(e.code);
  CHECK(codes.count(StructuralError::Code::InvalidDomain));
  CHECK(codes.count(StructuralError::Code::InvalidConstantValue));
}

TEST_CASE("validate: ill-typed hand-built expressions surface as TypeError") {
  Hierarchy h;
  ClassSpec a;
  a.name = "A";
  a.own_fields.push_back({"n", Domain::int_range(0, 2)});
  a.own_invariant = eq(sv("n"), blit(true));  // int = bool
  h.classes = {a};
  auto errors = validate(h);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].code == StructuralError::Code::TypeError);
  CHECK(errors[0].class_name == "A");

  // init must use primed variables only
  ClassSpec b;
  b.name = "B";
  b.own_fields.push_back({"n", Domain::int_range(0, 2)});
  b.init = eq(sv("n"), num(0));
  Hierarchy h2;
  h2.classes = {b};
  auto errors2 = validate(h2);
  REQUIRE(errors2.size() == 1);
  CHECK(errors2[0].code == StructuralError::Code::TypeError);
}

TEST_CASE("validate is order-independent over class declarations") {
  Hierarchy h = parse_fixture("queues.bi");
  CHECK(validate(h).empty());
  std::reverse(h.classes.begin(), h.classes.end());
  CHECK(validate(h).empty());
}

TEST_CASE("expression equality ignores spans") {
  ParseResult a = parse("class A { var n : int 0..1; invariant n <= 1; }");
  ParseResult b = parse("class A { var n : int 0..1;\n\n  invariant n <= 1; }");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(hierarchy_equal(*a.hierarchy, *b.hierarchy));
}

TEST_CASE("conjoin drops trivially-true operands") {
  ExprPtr t = Expr::truth();
  ExprPtr p = eq(sv("n"), num(1));
  CHECK(conjoin(t, p) == p);
  CHECK(conjoin(p, t) == p);
  CHECK(conjoin(t, t) == t);
  ExprPtr both = conjoin(p, p);
  CHECK(both->kind == Expr::Kind::And);
}
