#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scim/constraint.hpp"

namespace scim {

// An s-construction readied for matching: merged blocks, constraints
// split into the match phase (pre) and the effect/check phase (post).
struct CompiledSC {
  EffectiveSC sc;
  std::vector<ConstraintExpr> pre;   // decidable on the inputs
  std::vector<ConstraintExpr> post;  // muted/output-rooted, OUT, placements
  std::vector<ConstituentDecl> inputs;   // dir In / InOut, declaration order
  std::vector<ConstituentDecl> outputs;  // dir Out
};

struct Match {
  std::string construction;
  Binding binding;  // input constituents only
};

struct EngineConfig {
  int beam = 8;
  int max_firings = 200;
  std::string halt_on_type;  // stop expanding a branch that holds one
  bool trace = false;
};

struct RunResult {
  std::vector<BranchState> terminals;  // quiescent, halted or capped
  int total_firings = 0;
  bool hit_firing_cap = false;
  Json trace;  // per-round match/fire/prune report when cfg.trace
};

class Engine {
 public:
  explicit Engine(std::shared_ptr<const CompiledProgram> program);

  const std::vector<CompiledSC>& constructions() const { return compiled_; }
  const CompiledSC& construction(const std::string& name) const;
  const CompiledProgram& program() const { return *program_; }

  // Pre-phase admissibility of a full binding: every test constraint
  // Satisfied (identifications may stay Undetermined — they bind at
  // firing time) and the constructional block holds. Ignores the
  // refractory set.
  bool is_admissible(const BranchState& st, const CompiledSC& c,
                     const Binding& b) const;

  // All admissible, non-refractory candidate firings, ordered by
  // construction name then bound instance ids.
  std::vector<Match> enumerate_matches(const BranchState& st) const;

  // Attempts one firing on a scratch copy. Returns the successor state on
  // success; on failure returns nullopt and reports why. Never modifies
  // `st`.
  std::optional<BranchState> fire(const BranchState& st, const Match& m,
                                  std::string* fail_reason = nullptr) const;

  // Beam-search run loop. Every candidate firing of a branch forks an
  // alternative; branches are pruned globally to cfg.beam by score.
  RunResult run(const BranchState& initial, const EngineConfig& cfg) const;

  // Sum of trust*capacity over live firing-created instances minus a
  // 0.01 cost per firing.
  double compute_score(const BranchState& st) const;

 private:
  std::shared_ptr<const CompiledProgram> program_;
  std::vector<CompiledSC> compiled_;

  bool refractory_blocks(const BranchState& st, const CompiledSC& c,
                         const Binding& b) const;
  bool constructional_holds(const BranchState& st, const CompiledSC& c,
                            const Binding& b) const;
  void enumerate_for(const BranchState& st, const CompiledSC& c,
                     std::vector<Match>& out) const;
};

std::vector<std::uint32_t> sorted_binding_ids(const Binding& b);

}  // namespace scim
