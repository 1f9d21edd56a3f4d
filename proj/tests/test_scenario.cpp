#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "scim/scenario.hpp"

using namespace scim;

namespace {

std::shared_ptr<CompiledProgram> demo_program() {
  static std::shared_ptr<CompiledProgram> p = [] {
    ValidateResult vr = compile_source(fixture("demo.scim"));
    REQUIRE(vr.ok());
    return vr.program;
  }();
  return p;
}

struct Resolved {
  BranchState st;
  std::uint32_t rc = 0;
  std::map<std::uint32_t, std::string> names;  // wrapper id -> object name
};

// scene + wrappers ready for resolve_referents
Resolved make_candidates(const std::string& scene_text) {
  BranchState st(&demo_program()->hierarchy);
  SceneInfo scene = load_scene(st, scene_text);
  std::uint32_t rc = st.create_instance("ResolutionContext", {}, {});
  Resolved r{std::move(st), rc, {}};
  int i = 0;
  for (const auto& obj : scene.objects) {
    auto c = r.st.create_instance(
        "Candidate",
        {{"object", InstanceRef{obj.inst}}, {"survived", Atom{true}},
         {"rank", Atom{0LL}}},
        {});
    r.st.situate(c, rc, Place::point(i++));
    r.names[c] = obj.name;
  }
  return r;
}

std::vector<std::string> resolve_names(const std::string& scene,
                                       const std::vector<std::string>& preds) {
  Resolved r = make_candidates(scene);
  ResolutionResult rr = resolve_referents(r.st, r.rc, preds);
  std::vector<std::string> out;
  for (auto id : rr.order) out.push_back(r.names.at(id));
  return out;
}

const std::string kUtterance = "put the small red square on the left";

}  // namespace

TEST_CASE("scene files parse into situated objects") {
  BranchState st(&demo_program()->hierarchy);
  SceneInfo s = load_scene(st, fixture("sit3.scene"));
  REQUIRE(s.objects.size() == 4);
  CHECK(s.objects[0].name == "l");
  CHECK(st.is_present(s.objects[0].inst, s.context));
  std::string col =
      atom_to_string(std::get<Atom>(st.read_slot(s.objects[3].inst, "color")));
  CHECK(col == "black");
}

TEST_CASE("scene parse errors carry the line number") {
  BranchState st(&demo_program()->hierarchy);
  auto code = [&](const std::string& text) {
    try {
      load_scene(st, text);
      return std::string("no-error");
    } catch (const RuntimeError& e) {
      return std::string(e.what());
    }
  };
  CHECK(code("a square 10 10 red").find("line 1") != std::string::npos);
  CHECK(code("a square 10 10 red 0 0\na square 9 9 red 5 5").find("line 2") !=
        std::string::npos);
  CHECK(code("a blob 10 10 red 0 0") != "no-error");
  CHECK(code("a square 10 10 mauve 0 0") != "no-error");
  CHECK(code("a square -3 10 red 0 0") != "no-error");
  CHECK(code("a circle 10 12 red 0 0") != "no-error");
}

TEST_CASE("utterances lay out as words in a linear context") {
  BranchState st(&demo_program()->hierarchy);
  std::uint32_t form = lay_out_utterance(st, kUtterance);
  CHECK(st.present_in(form).size() == 8);
  CHECK_THROWS_AS(lay_out_utterance(st, "frobnicate the square"), RuntimeError);
}

TEST_CASE("categorical predicates commute") {
  std::string scene = fixture("sit3.scene");
  CHECK(resolve_names(scene, {"square", "red"}) ==
        resolve_names(scene, {"red", "square"}));
  // both categorical drops happen before the gradable rerank
  CHECK(resolve_names(scene, {"square", "red", "small"}) ==
        resolve_names(scene, {"red", "small", "square"}));
}

TEST_CASE("categorical predicates drop non-satisfiers") {
  auto names = resolve_names(fixture("sit3.scene"), {"square"});
  CHECK(names.size() == 2);  // the two circles dropped
  CHECK_THROWS_AS(resolve_names(fixture("sit3.scene"), {"square", "blue"}),
                  RuntimeError);  // EmptyCandidateSet
}

TEST_CASE("small measures relative to neighbors: circles flip the winner") {
  // with the circles next to r, r counts as relatively small and wins
  auto with = resolve_names(fixture("sit3.scene"), {"red", "square", "small"});
  REQUIRE(!with.empty());
  CHECK(with[0] == "r");
  // without them, r is just the biggest survivor and drops entirely
  auto without =
      resolve_names(fixture("sit3_nocircles.scene"), {"red", "square", "small"});
  CHECK(without == std::vector<std::string>{"l"});
}

TEST_CASE("small depends only on survivors and their neighborhoods") {
  // dropping the circles by color first changes the neighborhood inputs
  // of nothing (circles are not survivors either way), so the order the
  // categorical predicates ran in cannot matter
  auto a = resolve_names(fixture("sit2.scene"), {"red", "square", "small"});
  auto b = resolve_names(fixture("sit2.scene"), {"square", "red", "small"});
  CHECK(a == b);
  REQUIRE(!a.empty());
  CHECK(a[0] == "c");  // the smallest of the three squares
}

TEST_CASE("on-the-left reranks but never drops") {
  auto names = resolve_names(fixture("sit2.scene"), {"square", "on-the-left"});
  REQUIRE(names.size() == 3);
  CHECK(names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("hesitation trust grows with the winning gap") {
  // sit2: measures of a and c are close -> low trust; a lone winner by a
  // wide margin -> trust near 1
  Resolved close_case = make_candidates(fixture("sit2.scene"));
  double close_trust =
      resolve_referents(close_case.st, close_case.rc, {"square", "small"})
          .top_trust;
  Resolved wide_case = make_candidates(
      "a square 10 10 red 0 0\nb square 60 60 red 100 0\nc square 70 70 red 200 0");
  double wide_trust =
      resolve_referents(wide_case.st, wide_case.rc, {"square", "small"})
          .top_trust;
  CHECK(close_trust < wide_trust);
  CHECK(close_trust >= 0.5);
  CHECK(wide_trust <= 1.0);

  // no gradable step -> no hesitation
  Resolved cat = make_candidates(fixture("sit2.scene"));
  CHECK(resolve_referents(cat.st, cat.rc, {"square"}).top_trust == 1.0);
}

TEST_CASE("interpretation matrix over the bundled scenes") {
  Engine eng(demo_program());
  EngineConfig cfg;
  auto top = [&](const std::string& scene, const std::string& utt) {
    return interpret(eng, fixture(scene), utt, cfg);
  };

  SUBCASE("scene 1, put: nothing feasible") {
    CHECK_THROWS_AS(top("sit1.scene", kUtterance), RuntimeError);
  }
  SUBCASE("scene 2, remove: center square wins, wavering runner-up") {
    auto r = top("sit2.scene", "remove the small red square on the left");
    REQUIRE(r.size() >= 2);
    CHECK(r[0].sense == "remove");
    CHECK(r[0].referent == "b");
    CHECK(r[1].score / r[0].score >= 0.8);
  }
  SUBCASE("scene 2, move: right square preferred") {
    auto r = top("sit2.scene", "move the small red square on the left");
    REQUIRE(!r.empty());
    CHECK(r[0].referent == "c");
    CHECK(r[0].sense == "move2");
    CHECK(r[0].goal == "left");
  }
  SUBCASE("scene 3, move: alternatives within ratio, move1 targets l") {
    auto r = top("sit3.scene", "move the small red square on the left");
    REQUIRE(r.size() >= 2);
    int within = 0;
    for (const auto& i : r)
      if (i.score / r[0].score >= 0.8) within++;
    CHECK(within >= 2);
    bool move1_l = false;
    for (const auto& i : r)
      if (i.sense == "move1" && i.referent == "l") move1_l = true;
    CHECK(move1_l);
  }
  SUBCASE("scene 3, put: right square relatively small") {
    auto r = top("sit3.scene", kUtterance);
    REQUIRE(!r.empty());
    CHECK(r[0].referent == "r");
    CHECK(r[0].sense == "put");
  }
  SUBCASE("scene 3 without circles, put: incomprehensible") {
    CHECK_THROWS_AS(top("sit3_nocircles.scene", kUtterance), RuntimeError);
  }
}

TEST_CASE("interpretations dedupe and rank deterministically") {
  Engine eng(demo_program());
  EngineConfig cfg;
  auto r1 = interpret(eng, fixture("sit3.scene"), kUtterance, cfg);
  auto r2 = interpret(eng, fixture("sit3.scene"), kUtterance, cfg);
  REQUIRE(r1.size() == r2.size());
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].score == r2[i].score);
    CHECK(r1[i].referent == r2[i].referent);
    CHECK(keys.insert({r1[i].sense, r1[i].referent, r1[i].goal}).second);
    if (i > 0) CHECK(r1[i].score <= r1[i - 1].score);
  }
}
