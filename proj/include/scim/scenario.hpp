#pragma once

#include <set>
#include <string>
#include <vector>

#include "scim/engine.hpp"

namespace scim {

struct SceneObjectInfo {
  std::string name;  // id token from the scene file
  std::uint32_t inst = 0;
  std::string shape;
  double width = 0, height = 0;
  std::string color;
  double x = 0, y = 0;  // center
};

struct SceneInfo {
  std::uint32_t context = 0;  // the SceneContext2D instance
  std::vector<SceneObjectInfo> objects;
};

// Parses scene text (`id shape width height color x y`, '#' comments)
// into situated SceneObject instances. Throws SceneParseError with the
// offending line number.
SceneInfo load_scene(BranchState& st, const std::string& text);

// Splits the utterance into Word instances situated at point(0..n-1) in a
// fresh LinearContext; returns the context instance. Throws UnknownWord
// on tokens outside the demo lexicon.
std::uint32_t lay_out_utterance(BranchState& st, const std::string& text);
const std::set<std::string>& demo_lexicon();

struct Interpretation {
  double score = 0;
  std::string sense;     // remove | move1 | move2 | put
  std::string referent;  // scene object name
  std::string goal;      // "", "left" or "elsewhere"
};

// Full pipeline on the demo grammar: scene + utterance -> ranked
// readings (verb sense, resolved referent, goal). Runs the engine with
// halt-on-type Request, resolves each Request's theme against the scene,
// applies per-sense feasibility, deduplicates and ranks by score. Throws
// NoInterpretation when nothing survives.
std::vector<Interpretation> interpret(const Engine& eng,
                                      const std::string& scene_text,
                                      const std::string& utterance,
                                      EngineConfig cfg);

struct ResolutionResult {
  std::vector<std::uint32_t> order;  // Candidate wrapper ids, best first
  double top_trust = 1.0;           // hesitation trust of the best
};

// Sorting-step reference resolution over the Candidate wrappers present
// in the ResolutionContext `rc`. Categorical predicates (a shape or a
// color name) drop non-satisfiers; gradable predicates ("small",
// "on-the-left") re-rank; "small" also drops candidates whose measure
// exceeds the comparison median. Writes rank/survived/measure back into
// the wrappers. Throws EmptyCandidateSet when every candidate drops.
ResolutionResult resolve_referents(BranchState& st, std::uint32_t rc,
                                   const std::vector<std::string>& predicates);

// Initial working memory of the counting model: count-order facts 1..5
// and a goal counting from 2 to 4. The program must stay alive as long as
// the returned state is used.
BranchState counting_initial_state(const CompiledProgram& prog);

}  // namespace scim
