#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scim/ast.hpp"

namespace scim {

enum class TypeKind { Schema, Context, SConstruction, Enum, Atomic };

bool is_builtin_atomic(const std::string& name);  // Integer/Float/Boolean/String

// A resolved role: where it lives, what it holds, how it is reached from
// the querying type.
struct RoleDescriptor {
  std::string owner;        // type that declares the role
  std::string role_name;
  std::string declared_type;
  TypeKind declared_kind = TypeKind::Schema;
  bool mutable_flag = false;
  std::optional<std::string> situated_in;
  // slot key inside an instance of the querying type: inheritance hops
  // joined with '*', e.g. "Rectangle*Polygon*color"
  std::string slot;
};

struct TypeNode {
  TypeKind kind = TypeKind::Schema;
  std::string name;
  std::vector<std::string> parents;
  const Definition* def = nullptr;  // null for built-in atomics
};

class TypeHierarchy {
 public:
  // defs must already be structurally sound (no cycles, all types known);
  // validate() guarantees that before calling this.
  static TypeHierarchy build(const std::vector<Definition>& defs);

  bool has_type(const std::string& name) const;
  const TypeNode& node(const std::string& name) const;  // UnknownType
  TypeKind kind_of(const std::string& name) const;

  // true iff sub == super or super is an ancestor of sub. For atomic and
  // enum types this is name equality (Integer is accepted where Float is
  // declared).
  bool is_subtype(const std::string& sub, const std::string& super) const;

  // Every slot of an instance of `type`: own roles plus inherited roles
  // under their path-qualified keys, one entry per distinct
  // inheritance path.
  const std::map<std::string, RoleDescriptor>& effective_roles(
      const std::string& type) const;

  // Walks a path from `start`. Bare inherited roles resolve when exactly
  // one inheritance path reaches them. Throws RuntimeError with code
  // UnresolvedRolePath or AmbiguousRole.
  RoleDescriptor resolve_role_path(const std::string& start,
                                   const RolePath& path) const;

  // Resolves a star-only prefix of a path within one instance; returns
  // the descriptor for the slot named by segments [from, upto).
  RoleDescriptor resolve_slot(const std::string& type,
                              const std::string& slot) const;

  // Own constraints plus ancestors' constraints with paths rebased through
  // the inheritance path, ancestors first.
  std::vector<ConstraintExpr> effective_constraints(
      const std::string& type) const;

  // Declared place kinds including inherited ones.
  std::vector<std::string> effective_places(const std::string& type) const;
  std::vector<RelationSig> effective_relations(const std::string& type) const;
  std::vector<RelationSig> effective_operations(const std::string& type) const;

  bool enum_has(const std::string& enum_name, const std::string& member) const;

  const std::map<std::string, TypeNode>& nodes() const { return nodes_; }

 private:
  std::map<std::string, TypeNode> nodes_;
  std::map<std::string, std::set<std::string>> ancestors_;  // reflexive
  mutable std::map<std::string, std::map<std::string, RoleDescriptor>>
      role_tables_;
  std::map<std::string, std::set<std::string>> enum_members_;

  const std::map<std::string, RoleDescriptor>& table(
      const std::string& type) const;
  void build_table(const std::string& type,
                   std::map<std::string, RoleDescriptor>& out,
                   const std::string& prefix) const;
};

}  // namespace scim
