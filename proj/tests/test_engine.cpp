#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "scim/scenario.hpp"

using namespace scim;

namespace {

std::shared_ptr<CompiledProgram> compile(const std::string& src) {
  ValidateResult vr = compile_source(src);
  for (const auto& d : vr.diagnostics) INFO(format(d));
  REQUIRE(vr.ok());
  return vr.program;
}

std::vector<std::string> firing_names(const BranchState& b) {
  std::vector<std::string> out;
  for (const auto& f : b.firing_log()) out.push_back(f.construction);
  return out;
}

}  // namespace

TEST_CASE("counting model: start, count to the end, stop, quiesce") {
  auto prog = compile(fixture("count.scim"));
  Engine eng(prog);
  BranchState initial = counting_initial_state(*prog);
  RunResult rr = eng.run(initial, EngineConfig{});
  REQUIRE(rr.terminals.size() == 1);
  const BranchState& t = rr.terminals[0];
  CHECK(firing_names(t) == std::vector<std::string>{
                               "start-rule", "count-rule", "count-rule",
                               "stop-rule"});
  CHECK_FALSE(rr.hit_firing_cap);
  // the goal stepped through 2, 3, 4 and is marked done
  std::uint32_t goal = 0;
  for (const auto& [id, inst] : t.instances())
    if (inst.type == "CountGoal") goal = id;
  REQUIRE(goal != 0);
  CHECK(std::get<Atom>(t.read_slot(goal, "current")) == Atom{4LL});
  CHECK(std::get<Atom>(t.read_slot(goal, "step")) == Atom{std::string("done")});
  // a retrieval request for the start number was created
  bool req = false;
  for (const auto& [id, inst] : t.instances())
    if (inst.type == "RetrievalRequest" &&
        std::get<Atom>(t.read_slot(id, "first")) == Atom{2LL})
      req = true;
  CHECK(req);
}

TEST_CASE("runs are deterministic: byte-identical dumps") {
  auto prog = compile(fixture("count.scim"));
  Engine eng(prog);
  auto once = [&] {
    RunResult rr = eng.run(counting_initial_state(*prog), EngineConfig{});
    REQUIRE(rr.terminals.size() == 1);
    return rr.terminals[0].dump().dump();
  };
  CHECK(once() == once());
}

TEST_CASE("zero s-constructions: the forest is the initial branch") {
  auto prog = compile("schema S\n  roles\n    a : Integer\n");
  Engine eng(prog);
  BranchState initial(&prog->hierarchy);
  initial.create_instance("S", {{"a", Atom{1LL}}}, {});
  RunResult rr = eng.run(initial, EngineConfig{});
  REQUIRE(rr.terminals.size() == 1);
  CHECK(rr.total_firings == 0);
  CHECK(rr.terminals[0].score() == 0.0);
}

TEST_CASE("post-phase violation rolls back atomically") {
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "s-construction Broken\n  constituents\n    m : SetContext /I\n"
      "    x : S @m /I\n    y : S @m /O\n"
      "  constraints\n    y.a <- 1\n    eq(y.a, 2)\n    OUT(x)\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto x = st.create_instance("S", {{"a", Atom{0LL}}}, {});
  st.situate(x, ctx, Place::point(0));

  auto ms = eng.enumerate_matches(st);
  REQUIRE(ms.size() == 1);
  std::string before = st.dump().dump();
  std::string why;
  CHECK_FALSE(eng.fire(st, ms[0], &why).has_value());
  CHECK(st.dump().dump() == before);  // no partial effects

  // the run loop records the dead decision and quiesces
  RunResult rr = eng.run(st, EngineConfig{});
  REQUIRE(rr.terminals.size() == 1);
  const BranchState& t = rr.terminals[0];
  CHECK(rr.total_firings == 0);
  REQUIRE(t.dead_decisions().size() == 1);
  CHECK(t.dead_decisions()[0].construction == "Broken");
  // excluding the dead-decision entry, nothing changed
  CHECK(t.dump(false).dump() == st.dump(false).dump());
}

TEST_CASE("refractoriness blocks re-firing until a bound instance mutates") {
  auto prog = compile(
      "schema S\n  roles\n    ?m : Integer\n"
      "schema T\n  roles\n    a : Integer\n"
      "s-construction Make\n  constituents\n    mem : SetContext /I\n"
      "    x : S @mem /I\n    y : T @mem /O\n"
      "  constraints\n    y.a <- 1\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto x = st.create_instance("S", {}, {});
  st.situate(x, ctx, Place::point(0));

  auto ms = eng.enumerate_matches(st);
  REQUIRE(ms.size() == 1);
  BranchState after = *eng.fire(st, ms[0]);
  CHECK(eng.enumerate_matches(after).empty());  // refractory
  after.mutate_role(x, "m", Atom{1LL});         // re-arms the pair
  CHECK(eng.enumerate_matches(after).size() == 1);
}

TEST_CASE("scoring: trust times capacity minus firing cost") {
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "s-construction Make\n  confidence 0.8\n  constituents\n"
      "    mem : SetContext /I\n    x : S @mem /I\n    y : S @mem /O\n"
      "  constraints\n    y.a <- 1\n    OUT(x)\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto x = st.create_instance("S", {}, {}, /*capacity=*/2.0, /*trust=*/0.5);
  st.situate(x, ctx, Place::point(0));

  auto ms = eng.enumerate_matches(st);
  REQUIRE(ms.size() == 1);
  BranchState after = *eng.fire(st, ms[0]);
  // created: capacity = parent's 2.0, trust = 0.5 * confidence 0.8
  CHECK(eng.compute_score(after) ==
        doctest::Approx(0.5 * 0.8 * 2.0 - 0.01));
  // initial instances do not contribute
  CHECK(eng.compute_score(st) == doctest::Approx(0.0));
}

TEST_CASE("firing budget caps a runaway chain") {
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "s-construction Chain\n  constituents\n    mem : SetContext /I\n"
      "    x : S @mem /I\n    y : S @mem /O\n"
      "  constraints\n    y.a <- 1\n    OUT(x)\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto x = st.create_instance("S", {}, {});
  st.situate(x, ctx, Place::point(0));
  EngineConfig cfg;
  cfg.max_firings = 10;
  RunResult rr = eng.run(st, cfg);
  CHECK(rr.hit_firing_cap);
  REQUIRE(rr.terminals.size() == 1);
  CHECK(rr.terminals[0].firing_log().size() == 10);
}

TEST_CASE("beam width bounds the number of branches") {
  // two instances match a one-slot rule -> two alternatives per round
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "s-construction Pick\n  constituents\n    mem : SetContext /I\n"
      "    x : S @mem /I\n    y : S @mem /O\n"
      "  constraints\n    y.a <- 1\n    OUT(x)\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  for (int i = 0; i < 4; ++i) {
    auto x = st.create_instance("S", {}, {});
    st.situate(x, ctx, Place::point(i));
  }
  EngineConfig cfg;
  cfg.beam = 2;
  cfg.max_firings = 6;
  RunResult rr = eng.run(st, cfg);
  CHECK(rr.terminals.size() <= 2);
}

TEST_CASE("halt-on-type stops a branch that holds a live instance") {
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "schema Goal\n  roles\n    a : Integer\n"
      "s-construction MakeGoal\n  constituents\n    mem : SetContext /I\n"
      "    x : S @mem /I\n    y : Goal @mem /O\n"
      "  constraints\n    y.a <- 1\n"
      "s-construction Spin\n  constituents\n    mem : SetContext /I\n"
      "    x : Goal @mem /I\n    y : Goal @mem /O\n"
      "  constraints\n    y.a <- 2\n    OUT(x)\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto x = st.create_instance("S", {}, {});
  st.situate(x, ctx, Place::point(0));
  EngineConfig cfg;
  cfg.halt_on_type = "Goal";
  RunResult rr = eng.run(st, cfg);
  REQUIRE_FALSE(rr.terminals.empty());
  // the branch halted after producing the Goal; Spin never ran on it
  CHECK(rr.terminals[0].firing_log().size() == 1);
}

TEST_CASE("negative constructional blocks exclude derived bindings") {
  auto prog = compile(
      "schema S\n  roles\n    a : Integer\n"
      "schema T\n  roles\n    a : Integer\n"
      "s-construction First\n  constituents\n    mem : SetContext /I\n"
      "    x : S @mem /I\n    y : T @mem /O\n  constraints\n    y.a <- 1\n"
      "s-construction OnFresh\n  constructional\n    not p : First\n"
      "  constituents\n    mem : SetContext /I\n    x : T @mem /I\n"
      "    z : T @mem /O\n  constraints\n    z.a <- 2\n"
      "s-construction OnDerived\n  constructional\n    p : First\n"
      "  constituents\n    mem : SetContext /I\n    x : T @mem /I\n"
      "    z : T @mem /O\n  constraints\n    z.a <- 3\n");
  Engine eng(prog);
  BranchState st(&prog->hierarchy);
  auto ctx = st.create_instance("SetContext", {}, {});
  auto s = st.create_instance("S", {}, {});
  auto fresh = st.create_instance("T", {}, {});
  st.situate(s, ctx, Place::point(0));
  st.situate(fresh, ctx, Place::point(1));

  // before First fires: only the fresh T matches either rule, and only
  // the negative-constructional rule admits it
  int on_fresh = 0, on_derived = 0;
  for (const auto& m : eng.enumerate_matches(st)) {
    if (m.construction == "OnFresh") on_fresh++;
    if (m.construction == "OnDerived") on_derived++;
  }
  CHECK(on_fresh == 1);
  CHECK(on_derived == 0);

  // fire First: its created T satisfies the positive requirement
  Match first;
  for (const auto& m : eng.enumerate_matches(st))
    if (m.construction == "First") first = m;
  REQUIRE(!first.construction.empty());
  BranchState after = *eng.fire(st, first);
  on_fresh = on_derived = 0;
  for (const auto& m : eng.enumerate_matches(after)) {
    if (m.construction == "OnFresh") on_fresh++;
    if (m.construction == "OnDerived") on_derived++;
  }
  CHECK(on_fresh == 1);    // still just the fresh T
  CHECK(on_derived == 1);  // the derived T
}
