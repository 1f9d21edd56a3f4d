#pragma once

#include <map>
#include <optional>
#include <string>

#include "scim/memory.hpp"
#include "scim/validate.hpp"

namespace scim {

// Three-valued constraint verdict. Undetermined arises from unbound roles
// and from empty operation results.
enum class Verdict { Satisfied, Violated, Undetermined };

const char* to_string(Verdict v);
Verdict v_not(Verdict a);
Verdict v_and(Verdict a, Verdict b);
Verdict v_or(Verdict a, Verdict b);
Verdict v_nand(Verdict a, Verdict b);

// Constituent-label bindings of one candidate firing.
using Binding = std::map<std::string, std::uint32_t>;

// Where a role path lands at runtime: the owning instance and the slot,
// or the instance itself when the path is a bare label.
struct PathTarget {
  bool located = false;  // false: an intermediate role was unbound
  bool whole_instance = false;
  std::uint32_t inst = 0;
  std::string slot;
  RoleDescriptor desc;
};

struct EvalContext {
  const BranchState* state = nullptr;
  const EffectiveSC* sc = nullptr;
  const Binding* binding = nullptr;
};

// Walks `rest` starting inside instance `root`; `rest` must be rooted with
// Sep::First (label already stripped). Returns located=false when an
// intermediate role on the way is unbound. Throws TypeMismatch when a
// path descends through an atomic value.
PathTarget locate_in_instance(const BranchState& st, std::uint32_t root,
                              const RolePath& rest);

// Label-rooted path lookup under a binding.
PathTarget locate_path(const EvalContext& cx, const RolePath& path);

// Value the target denotes: the instance ref for whole-instance targets,
// the slot filler otherwise; Unbound when not located.
Filler target_value(const BranchState& st, const PathTarget& t);

// Place denoted by a structural place expression, or nullopt when some
// constituent is not (or no longer) situated or an operation is empty.
std::optional<Place> eval_place_expr(const EvalContext& cx,
                                     const PlaceExpr& pe);

// Three-valued evaluation of an s-construction constraint under a
// binding. OUT and placement constraints evaluate to Satisfied; they are
// effects, not tests. Identification of two bound instances is satisfied
// when they unify; equality demands the same instance.
Verdict evaluate(const EvalContext& cx, const ConstraintExpr& c);

// Structural unification. Unbound absorbs anything; atoms unify when
// equal; instances unify when identical or of the same type with
// role-wise unifiable fillers, in which case missing fillers are copied
// across (only previously-unbound roles are written). On success returns
// the merged filler and commits the writes; on failure `st` is left
// untouched. Reference cycles unify coinductively.
std::optional<Filler> unify_fillers(BranchState& st, const Filler& a,
                                    const Filler& b);
bool unifiable(const BranchState& st, const Filler& a, const Filler& b);

// Three-valued evaluation of a schema/context constraint against one
// instance (paths are rooted at the instance itself).
Verdict evaluate_type_constraint(const BranchState& st, std::uint32_t inst,
                                 const ConstraintExpr& c);

// Not-Violated check of all effective type constraints of an instance.
Verdict validate_instance(const BranchState& st, std::uint32_t inst);

// True when the constraint can only be decided after firing: it touches a
// muted path, references an output constituent, or is an OUT/placement.
bool is_post_phase(const EffectiveSC& sc, const ConstraintExpr& c);

}  // namespace scim
