// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit on
// any failure. Each check is self-contained and uses only the public
// library API plus the bundled fixtures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "scim/scenario.hpp"
#include "scim/testkit.hpp"

using namespace scim;

namespace {

struct Gate {
  int failures = 0;
  void report(int n, const std::string& label, bool ok,
              const std::string& detail = "") {
    std::cout << "criterion " << n << " (" << label << "): "
              << (ok ? "PASS" : "FAIL");
    if (!ok && !detail.empty()) std::cout << " — " << detail;
    std::cout << "\n";
    if (!ok) failures++;
  }
  void run(int n, const std::string& label,
           const std::function<void()>& body) {
    try {
      body();
      report(n, label, true);
    } catch (const std::exception& e) {
      report(n, label, false, e.what());
    }
  }
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- criterion 1: formalism coverage ------------------------------------

// skeleton of a schema declaration: roles of every atomic type, a
// schema-typed role, mutability, and validity constraints
const char* kSchemaSkeleton = R"(
schema Measure
  roles
    amount : Float
    unit : String

schema Reading
  roles
    value : Measure
    count : Integer
    fresh : Boolean
    ?state : String
  constraints
    state <- "new"
    gt(count, 0)
)";

// skeleton of a context declaration: place kinds, relation signatures
// (including before over points), operation signatures (including
// intersection over segments)
const char* kContextSkeleton = R"(
context Timeline
  places
    point segment
  relations
    before(point, point) |-> Boolean
    overlaps(segment, segment) |-> Boolean
  operations
    intersection(segment, segment) |-> segment
    span(segment, segment) |-> segment
)";

// skeleton of an s-construction: input/output constituents, a muted
// role, OUT, a parent-type constraint and a placement
const char* kConstructionSkeleton = R"(
schema Token
  roles
    text : String
    ?count : Integer

s-construction Absorb
  confidence 0.9
  constituents
    line : LinearContext /I
    a : Token @line /I
    b : Token @line /IO
    c : Token @line /O
  constraints
    a C Token
    a.text <- "stop"
    line.before(a, b)
    ?b.count <- 1
    c.text <-> b.text
    OUT(a)
    c @ line.span(a, b)
)";

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  for (const char* src :
       {kSchemaSkeleton, kContextSkeleton, kConstructionSkeleton}) {
    ValidateResult vr = compile_source(src);
    std::string why;
    for (const auto& d : vr.diagnostics) why += format(d) + "; ";
    expect(vr.ok(), "skeleton failed to validate: " + why);
    // round-trip through the printer
    ParseResult p1 = parse_source(src);
    std::string printed = to_source(p1.definitions);
    ParseResult p2 = parse_source(printed);
    expect(p2.diagnostics.empty(), "printed form failed to reparse");
    expect(to_source(p2.definitions) == printed, "print/reparse not stable");
  }
  expect(elapsed_ms(t0) < 1000.0, "exceeded 1 s");
}

// ---- criterion 2: oracle equivalence -------------------------------------

void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  for (std::uint32_t seed = 1; seed <= 50; ++seed) {
    auto c = testkit::generate_case(seed);
    Engine eng(c.program);
    expect(testkit::canonical(eng.enumerate_matches(c.state)) ==
               testkit::canonical(testkit::oracle_matches(eng, c.state)),
           "mismatch at seed " + std::to_string(seed));
  }
  expect(elapsed_ms(t0) < 30000.0, "exceeded 30 s");
}

// ---- criterion 3: unification / constraint properties --------------------

void criterion3() {
  const Verdict all[3] = {Verdict::Satisfied, Verdict::Violated,
                          Verdict::Undetermined};
  auto t = [](Verdict v) { return v == Verdict::Satisfied ? 1
                                  : v == Verdict::Violated ? 0 : -1; };
  for (Verdict a : all)
    for (Verdict b : all) {
      expect(v_and(a, b) == v_and(b, a), "and not commutative");
      expect(v_or(a, b) == v_or(b, a), "or not commutative");
      expect(v_nand(a, b) == v_not(v_and(a, b)), "nand mismatch");
      int ra = t(a), rb = t(b);
      int rand_ = (ra == 0 || rb == 0) ? 0 : (ra == 1 && rb == 1) ? 1 : -1;
      expect(t(v_and(a, b)) == rand_, "and table wrong");
      int ror = (ra == 1 || rb == 1) ? 1 : (ra == 0 && rb == 0) ? 0 : -1;
      expect(t(v_or(a, b)) == ror, "or table wrong");
      for (Verdict c : all) {
        expect(v_and(a, v_and(b, c)) == v_and(v_and(a, b), c),
               "and not associative");
        expect(v_or(a, v_or(b, c)) == v_or(v_or(a, b), c),
               "or not associative");
      }
    }

  ValidateResult vr = compile_source(
      "schema Node\n  roles\n    v : Integer\n    ?next : Node\n");
  expect(vr.ok(), "helper grammar");
  BranchState st(&vr.program->hierarchy);
  auto a = st.create_instance("Node", {{"v", Atom{1LL}}}, {});
  auto b = st.create_instance("Node", {}, {});
  auto c = st.create_instance("Node", {{"v", Atom{2LL}}}, {});
  std::vector<Filler> pool = {Unbound{}, Filler{Atom{1LL}}, Filler{Atom{2LL}},
                              Filler{InstanceRef{a}}, Filler{InstanceRef{b}},
                              Filler{InstanceRef{c}}};
  for (const auto& x : pool) {
    expect(unifiable(st, x, x), "unify not idempotent");
    for (const auto& y : pool) {
      expect(unifiable(st, x, y) == unifiable(st, y, x),
             "unify not commutative");
      BranchState scratch = st;
      auto r = unify_fillers(scratch, x, y);
      if (r)
        expect(unifiable(scratch, *r, x) && unifiable(scratch, *r, y),
               "unify not monotone");
    }
  }
  // equality vs identification: same-valued distinct instances identify
  // but are not equal; pre-phase admissibility reflects that
  ValidateResult vr2 = compile_source(
      "schema Node\n  roles\n    ?v : Integer\n    ?next : Node\n"
      "s-construction Eq\n  constituents\n    m : SetContext /I\n"
      "    x : Node @m /IO\n    y : Node @m /I\n"
      "  constraints\n    x = y\n    ?x.v <- 9\n"
      "s-construction Id\n  constituents\n    m : SetContext /I\n"
      "    x : Node @m /IO\n    y : Node @m /I\n"
      "  constraints\n    x <-> y\n    ?x.v <- 9\n");
  expect(vr2.ok(), "helper grammar two");
  Engine eng(vr2.program);
  BranchState st2(&vr2.program->hierarchy);
  auto ctx = st2.create_instance("SetContext", {}, {});
  auto n1 = st2.create_instance("Node", {{"v", Atom{1LL}}}, {});
  auto n2 = st2.create_instance("Node", {{"v", Atom{1LL}}}, {});
  st2.situate(n1, ctx, Place::point(0));
  st2.situate(n2, ctx, Place::point(1));
  int eq = 0, id = 0;
  for (const auto& m : eng.enumerate_matches(st2))
    (m.construction == "Eq" ? eq : id)++;
  expect(eq == 0, "equality admitted distinct instances");
  expect(id == 2, "identification rejected unifiable instances");
}

// ---- criterion 4: production-system equivalence ---------------------------

void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  ValidateResult vr = compile_source(fixture("count.scim"));
  expect(vr.ok(), "counting grammar failed to compile");
  Engine eng(vr.program);
  auto once = [&] {
    RunResult rr = eng.run(counting_initial_state(*vr.program),
                           EngineConfig{});
    expect(rr.terminals.size() == 1, "expected a single quiescent branch");
    return rr.terminals[0];
  };
  BranchState t = once();
  std::vector<std::string> names;
  std::vector<long long> currents;
  for (const auto& f : t.firing_log()) names.push_back(f.construction);
  expect(names == std::vector<std::string>{"start-rule", "count-rule",
                                           "count-rule", "stop-rule"},
         "unexpected firing sequence");
  for (const auto& m : t.mutation_log())
    if (m.slot == "current" && std::holds_alternative<Atom>(m.new_value))
      currents.push_back(std::get<long long>(std::get<Atom>(m.new_value)));
  expect(currents == std::vector<long long>{2, 3, 4},
         "goal did not step 2, 3, 4");
  bool req = false;
  for (const auto& [id, inst] : t.instances())
    if (inst.type == "RetrievalRequest" &&
        std::get<Atom>(t.read_slot(id, "first")) == Atom{2LL})
      req = true;
  expect(req, "no retrieval request for the start number");
  expect(once().dump().dump() == t.dump().dump(), "trace not byte-stable");
  expect(elapsed_ms(t0) < 1000.0, "exceeded 1 s");
}

// ---- criterion 5: scenario matrix -----------------------------------------

void criterion5() {
  ValidateResult vr = compile_source(fixture("demo.scim"));
  expect(vr.ok(), "demo grammar failed to compile");
  Engine eng(vr.program);
  const std::string utt_put = "put the small red square on the left";
  const std::string utt_remove = "remove the small red square on the left";
  const std::string utt_move = "move the small red square on the left";

  auto timed = [&](const std::string& scene, const std::string& utt) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = interpret(eng, fixture(scene), utt, EngineConfig{});
    expect(elapsed_ms(t0) < 2000.0, "case exceeded 2 s");
    return r;
  };
  auto expect_none = [&](const std::string& scene, const std::string& utt,
                         const std::string& what) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      interpret(eng, fixture(scene), utt, EngineConfig{});
      expect(false, what + ": expected no interpretation");
    } catch (const RuntimeError&) {
    }
    expect(elapsed_ms(t0) < 2000.0, "case exceeded 2 s");
  };

  expect_none("sit1.scene", utt_put, "scene 1 put");

  auto r2 = timed("sit2.scene", utt_remove);
  expect(r2.size() >= 2 && r2[0].referent == "b",
         "scene 2 remove: center square not on top");
  expect(r2[1].score / r2[0].score >= 0.8, "scene 2 remove: no wavering");

  auto r3 = timed("sit2.scene", utt_move);
  expect(!r3.empty() && r3[0].referent == "c",
         "scene 2 move: right square not preferred");

  auto r4 = timed("sit3.scene", utt_move);
  int within = 0;
  for (const auto& i : r4)
    if (i.score / r4[0].score >= 0.8) within++;
  expect(within >= 2, "scene 3 move: fewer than two close readings");
  bool move1_left = false;
  for (const auto& i : r4)
    if (i.sense == "move1" && i.referent == "l") move1_left = true;
  expect(move1_left, "scene 3 move: one-argument reading of l missing");

  auto r5 = timed("sit3.scene", utt_put);
  expect(!r5.empty() && r5[0].referent == "r",
         "scene 3 put: right square not on top");

  expect_none("sit3_nocircles.scene", utt_put, "scene 3 without circles");
}

// ---- criterion 6: randomized stress ----------------------------------------

void criterion6() {
  int total = 0, programs = 0;
  for (std::uint32_t seed = 500; seed < 525; ++seed) {
    testkit::GenOptions opts;
    opts.chain_rule = true;
    auto c = testkit::generate_case(seed, opts);
    Engine eng(c.program);
    programs++;

    std::string before = c.state.dump().dump();
    for (const auto& m : eng.enumerate_matches(c.state)) {
      eng.fire(c.state, m);
      expect(c.state.dump().dump() == before, "fire touched its input");
    }

    EngineConfig cfg;
    cfg.beam = 4;
    cfg.max_firings = 60;
    RunResult rr = eng.run(c.state, cfg);
    total += rr.total_firings;

    for (const BranchState& t : rr.terminals) {
      // acyclic parents
      for (const auto& [id, inst] : t.instances()) {
        std::set<std::uint32_t> seen;
        std::vector<std::uint32_t> stack(inst.parents.begin(),
                                         inst.parents.end());
        while (!stack.empty()) {
          auto cur = stack.back();
          stack.pop_back();
          expect(cur != id, "parent cycle");
          if (!seen.insert(cur).second) continue;
          const auto& p = t.instance(cur).parents;
          stack.insert(stack.end(), p.begin(), p.end());
        }
      }
      // refractoriness with re-arming
      const auto& log = t.firing_log();
      for (size_t i = 0; i < log.size(); ++i)
        for (size_t j = i + 1; j < log.size(); ++j) {
          if (log[i].construction != log[j].construction) continue;
          std::set<std::uint32_t> a, b;
          for (const auto& [l, x] : log[i].binding) a.insert(x);
          for (const auto& [l, x] : log[j].binding) b.insert(x);
          if (a != b) continue;
          bool rearmed = false;
          for (const auto& m : t.mutation_log())
            if (m.clock > log[i].clock && m.clock < log[j].clock &&
                a.count(m.instance))
              rearmed = true;
          expect(rearmed, "refractory pair re-fired without mutation");
        }
      // replay reconstructibility
      expect(t.replay().dump().dump() == t.dump().dump(),
             "replay diverged from the live state");
    }
    // branch isolation
    if (!rr.terminals.empty()) {
      const BranchState& t = rr.terminals[0];
      std::string snap = t.dump().dump();
      auto ms = eng.enumerate_matches(t);
      if (!ms.empty()) {
        BranchState child = t.fork(999);
        eng.fire(child, ms[0]);
        expect(t.dump().dump() == snap, "child run touched the parent");
      }
    }
  }
  expect(programs >= 20, "fewer than 20 programs");
  expect(total >= 1000, "fewer than 1000 firings: " + std::to_string(total));
}

// ---- criterion 7: determinism -----------------------------------------------

void criterion7() {
  ValidateResult vr = compile_source(fixture("demo.scim"));
  expect(vr.ok(), "demo grammar failed to compile");
  Engine eng(vr.program);
  auto run_once = [&] {
    std::ostringstream stdout_text;
    auto interps = interpret(eng, fixture("sit3.scene"),
                             "move the small red square on the left",
                             EngineConfig{});
    int rank = 1;
    for (const auto& i : interps)
      stdout_text << rank++ << " " << i.score << " " << i.sense << " "
                  << i.referent << " " << i.goal << "\n";
    // the trace document: engine forest dumps in rank order
    ValidateResult v2 = compile_source(fixture("count.scim"));
    Engine e2(v2.program);
    RunResult rr = e2.run(counting_initial_state(*v2.program), EngineConfig{});
    Json trace = Json::array();
    for (const auto& b : rr.terminals) trace.push_back(b.dump());
    return stdout_text.str() + "\n" + trace.dump();
  };
  std::string one = run_once();
  std::string two = run_once();
  expect(one == two, "outputs differ between identical runs");
}

}  // namespace

int main() {
  Gate g;
  g.run(1, "formalism coverage", criterion1);
  g.run(2, "oracle equivalence", criterion2);
  g.run(3, "unification and constraint properties", criterion3);
  g.run(4, "production-system equivalence", criterion4);
  g.run(5, "scenario matrix", criterion5);
  g.run(6, "randomized stress", criterion6);
  g.run(7, "determinism", criterion7);
  if (g.failures) {
    std::cout << g.failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 7 criteria passed\n";
  return 0;
}
