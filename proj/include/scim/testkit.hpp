#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "scim/engine.hpp"

namespace scim::testkit {

// Brute-force reference matcher: enumerates every tuple of instances over
// the constituents with no indexing or pruning, then filters by the same
// admissibility predicate the engine exposes plus an independent
// re-implementation of the refractory rule. Must be set-equal to
// Engine::enumerate_matches.
std::vector<Match> oracle_matches(const Engine& eng, const BranchState& st);
std::vector<Match> oracle_matches_for(const Engine& eng,
                                      const BranchState& st,
                                      const CompiledSC& c);

// Order-insensitive canonical form for comparing match lists.
using CanonicalMatches =
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::uint32_t>>>>;
CanonicalMatches canonical(const std::vector<Match>& ms);

struct GenOptions {
  // Always include a consume-and-produce rule with no tests so the
  // program fires indefinitely (for stress runs).
  bool chain_rule = false;
  int max_instances = 7;  // schema instances beside the context, <= 7
};

struct GeneratedCase {
  std::string source;  // generated grammar text (without the prelude)
  std::shared_ptr<const CompiledProgram> program;
  BranchState state;  // one context instance plus <= 7 schema instances
};

// Deterministic from the seed: a small well-formed grammar plus a
// populated working memory. Throws if the generated text fails to
// compile (a generator bug).
GeneratedCase generate_case(std::uint32_t seed, GenOptions opts = {});

}  // namespace scim::testkit
