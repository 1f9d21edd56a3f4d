#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "scim/parser.hpp"
#include "scim/testkit.hpp"

using namespace scim;

namespace {
// structural identity via the printer: print, reparse, print again
void check_roundtrip(const std::string& source) {
  ParseResult p1 = parse_source(source);
  REQUIRE(p1.diagnostics.empty());
  std::string printed = to_source(p1.definitions);
  ParseResult p2 = parse_source(printed);
  REQUIRE(p2.diagnostics.empty());
  CHECK(to_source(p2.definitions) == printed);
  CHECK(p2.definitions.size() == p1.definitions.size());
}
}  // namespace

TEST_CASE("grammar fixtures parse and round-trip") {
  check_roundtrip(fixture("count.scim"));
  check_roundtrip(fixture("demo.scim"));
}

TEST_CASE("generated programs round-trip") {
  for (std::uint32_t seed = 100; seed < 120; ++seed) {
    auto c = testkit::generate_case(seed);
    check_roundtrip(c.source);
  }
}

TEST_CASE("constraint forms parse into the right shapes") {
  std::string src =
      "s-construction Cx\n"
      "  constituents\n"
      "    m : SetContext /I\n"
      "    a : Word @m /IO\n"
      "    b : Word @m /O\n"
      "  constraints\n"
      "    a.text <- \"hi\"\n"
      "    b.text <-> a.text\n"
      "    a.text = b.text\n"
      "    eq(a.text, b.text)\n"
      "    m.point(a)\n"
      "    a C Word\n"
      "    ?a.text <- \"bye\"\n"
      "    OUT(a)\n"
      "    b @ m.point(a)\n";
  ParseResult p = parse_source(src);
  REQUIRE(p.diagnostics.empty());
  REQUIRE(p.definitions.size() == 1);
  const auto& cs = p.definitions[0].constraints;
  REQUIRE(cs.size() == 9);
  using F = ConstraintExpr::Form;
  CHECK(cs[0].form == F::Filler);
  CHECK(cs[1].form == F::Identification);
  CHECK(cs[2].form == F::Equality);
  CHECK(cs[3].form == F::Predicate);
  CHECK(cs[4].form == F::ContextRelation);
  CHECK(cs[5].form == F::Parent);
  CHECK(cs[6].form == F::Filler);
  CHECK(cs[6].args[0].path.muted);
  CHECK(cs[7].form == F::Out);
  CHECK(cs[8].form == F::Placement);
  CHECK(cs[8].places[0].is_op);

  const auto& cons = p.definitions[0].constituents;
  CHECK(cons[0].dir == Direction::In);
  CHECK(cons[1].dir == Direction::InOut);
  CHECK(cons[2].dir == Direction::Out);
  CHECK(cons[1].context_label == "m");
}

TEST_CASE("signature arrows parse in relations and operations") {
  std::string src =
      "context C2 inherits LinearContext\n"
      "  relations\n"
      "    nearby(point, point) |-> Boolean\n"
      "  operations\n"
      "    merge(segment, segment) |-> segment\n";
  ParseResult p = parse_source(src);
  REQUIRE(p.diagnostics.empty());
  const auto& d = p.definitions[0];
  REQUIRE(d.relations.size() == 1);
  CHECK(d.relations[0].name == "nearby");
  CHECK(d.relations[0].param_places ==
        std::vector<std::string>{"point", "point"});
  CHECK(d.relations[0].result == "Boolean");
  REQUIRE(d.operations.size() == 1);
  CHECK(d.operations[0].result == "segment");
}

TEST_CASE("mutable role marker and situated-role suffix") {
  ParseResult p = parse_source(
      "schema S\n  roles\n    ?cur : Integer\n    obj : Word @ctx\n");
  REQUIRE(p.diagnostics.empty());
  CHECK(p.definitions[0].roles[0].mutable_flag);
  CHECK(p.definitions[0].roles[1].situated_in == "ctx");
}

TEST_CASE("parse recovers at the next declaration after an error") {
  ParseResult p = parse_source(
      "schema Bad\n  roles\n    x :\n\nschema Good\n  roles\n    y : Integer\n");
  CHECK(!p.diagnostics.empty());
  bool found = false;
  for (const auto& d : p.definitions)
    if (d.name == "Good") found = true;
  CHECK(found);
}

TEST_CASE("confidence only on s-constructions") {
  ParseResult bad = parse_source("schema S\n  confidence 0.5\n");
  CHECK(!bad.diagnostics.empty());
  ParseResult ok = parse_source(
      "s-construction X\n  confidence 0.5\n  constituents\n"
      "    m : SetContext /I\n    a : Word @m /IO\n"
      "  constraints\n    ?a.text <- \"x\"\n");
  REQUIRE(ok.diagnostics.empty());
  CHECK(ok.definitions[0].confidence == doctest::Approx(0.5));
}
