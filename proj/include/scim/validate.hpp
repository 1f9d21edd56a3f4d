#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scim/parser.hpp"
#include "scim/type_system.hpp"

namespace scim {

// A validated program. `defs` is heap-stable because the hierarchy keeps
// pointers into it.
struct CompiledProgram {
  std::shared_ptr<const std::vector<Definition>> defs;
  TypeHierarchy hierarchy;
};

struct ValidateResult {
  std::shared_ptr<CompiledProgram> program;  // null when errors were found
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program != nullptr; }
};

// Semantic checks over parsed definitions: unknown/duplicate types,
// inheritance cycles and kind rules, role declarations, constraint forms
// per definition kind, role-path resolution, relation/operation
// signatures, constituent and constructional blocks.
ValidateResult validate(std::vector<Definition> defs);

// Parses the built-in prelude plus the given sources (in order) and
// validates the result. Parse diagnostics are merged in.
ValidateResult compile_sources(const std::vector<std::string>& sources);
ValidateResult compile_source(const std::string& source);

// The merged view of an s-construction: inherited blocks prepended to own
// blocks, ancestors first; confidence is the product over the chain.
struct EffectiveSC {
  std::string name;
  double confidence = 1.0;
  std::vector<ConstructionalDecl> constructional;
  std::vector<ConstituentDecl> constituents;
  std::vector<ConstraintExpr> constraints;
};
EffectiveSC effective_sconstruction(const TypeHierarchy& h,
                                    const std::string& name);

// What a role path written inside an s-construction denotes.
struct ScopedPath {
  std::string label;            // the constituent/constructional root
  bool whole_instance = false;  // no role segments after the label
  RolePath rest;                // path relative to the label's type
  RoleDescriptor role;          // meaningful unless whole_instance
};
// Resolves `path` against the labels of `sc`; throws RuntimeError
// (UnresolvedRolePath / AmbiguousRole) on failure.
ScopedPath resolve_scoped_path(const TypeHierarchy& h, const EffectiveSC& sc,
                               const RolePath& path);

}  // namespace scim
