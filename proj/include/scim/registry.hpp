#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scim/ast.hpp"

namespace scim {

// Numeric-aware atom comparison: Integer 2 equals Float 2.0; Sym and
// String compare by text only against their own kind.
bool atoms_equal(const Atom& a, const Atom& b);
std::optional<double> atom_number(const Atom& a);

// Boolean predicates usable in constraints. Grammars may reference only
// registered predicates. Throws UnknownPredicate / ArityMismatch.
bool eval_predicate(const std::string& name, const std::vector<Atom>& args);
bool predicate_exists(const std::string& name);

// C-functions: unary transforms over atomic values, used in
// identification constraints written `role <-> f(role)`.
Atom eval_transform(const std::string& name, const Atom& arg);
bool transform_exists(const std::string& name);

// Pure functions of constants on the right-hand side of a filler.
Atom eval_atomic_function(const std::string& name,
                          const std::vector<Atom>& args);
bool atomic_function_exists(const std::string& name);

}  // namespace scim
