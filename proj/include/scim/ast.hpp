#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scim/diagnostics.hpp"

namespace scim {

// An unquoted symbolic constant (enumeration member).
struct Sym {
  std::string name;
  bool operator==(const Sym&) const = default;
};

// Atomic constant as written in a program: Integer, Float, Boolean,
// String, or enumeration symbol.
using Atom = std::variant<long long, double, bool, std::string, Sym>;

std::string atom_to_string(const Atom& a);

// A role path: optional self, then named segments. The first segment is
// looked up in scope (role, constituent label, or parent type when the
// next separator is '*'); '*' segments hop into a parent's role table,
// '.' segments descend into the current role's declared type.
struct RolePath {
  enum class Sep { First, Star, Dot };
  struct Seg {
    Sep sep = Sep::First;
    std::string name;
  };
  bool self = false;
  bool muted = false;  // written with a leading '?'
  std::vector<Seg> segs;

  std::string to_string() const;
};

// Place argument of a structural constraint: either a constituent label
// (denoting that constituent's place) or the result of a context
// operation applied to other place expressions.
struct PlaceExpr {
  bool is_op = false;
  std::string label;     // constituent label, or context label when is_op
  std::string op_name;   // operation name when is_op
  std::vector<PlaceExpr> args;
  SourceLoc loc;

  std::string to_string() const;
};

// One operand of a constraint: a role path or an atomic constant.
struct Operand {
  bool is_path = false;
  RolePath path;
  Atom atom;

  static Operand make_path(RolePath p) {
    Operand o;
    o.is_path = true;
    o.path = std::move(p);
    return o;
  }
  static Operand make_atom(Atom a) {
    Operand o;
    o.atom = std::move(a);
    return o;
  }
  std::string to_string() const;
};

struct ConstraintExpr {
  enum class Form {
    BoolOp,           // name in {and, or, not, nand}; children
    Filler,           // args[0] <- atom | name(atoms...)
    Identification,   // args[0] <-> args[1], or args[0] <-> name(args[1])
    Equality,         // args[0] = args[1]
    Predicate,        // name(args...)
    ContextRelation,  // args[0].name(places...)
    Parent,           // args[0] C args[1]
    Out,              // OUT(args[0])
    Placement         // args[0] @ places[0]
  };
  Form form = Form::Predicate;
  std::string name;  // operator / predicate / relation / function name
  std::vector<Operand> args;
  std::vector<ConstraintExpr> children;
  std::vector<PlaceExpr> places;
  SourceLoc loc;

  std::string to_string() const;
};

struct RoleDecl {
  std::string name;
  std::string type_name;
  bool mutable_flag = false;
  std::optional<std::string> situated_in;  // the @<local-context-id> suffix
  SourceLoc loc;
};

struct RelationSig {
  std::string name;
  std::vector<std::string> param_places;
  std::string result;  // atomic type for relations, place kind for operations
  SourceLoc loc;
};

enum class Direction { In, Out, InOut };

struct ConstituentDecl {
  std::string label;
  std::string type_name;
  std::optional<std::string> context_label;  // @<local-ctx-id>
  Direction dir = Direction::In;
  SourceLoc loc;
};

struct ConstructionalDecl {
  std::string label;
  std::string type_name;
  bool negative = false;  // written "not label : Type"
  SourceLoc loc;
};

enum class DefKind { Schema, Context, SConstruction, Enum };

struct Definition {
  DefKind kind = DefKind::Schema;
  std::string name;
  std::optional<double> confidence;  // s-constructions only
  std::vector<std::string> inherits;
  std::vector<RoleDecl> roles;
  std::vector<ConstraintExpr> constraints;
  std::vector<std::string> places;
  std::vector<RelationSig> relations;
  std::vector<RelationSig> operations;
  std::vector<ConstructionalDecl> constructional;
  std::vector<ConstituentDecl> constituents;
  std::vector<std::string> enumerators;
  // which blocks appeared in the source (blocks may be present but empty)
  bool has_roles = false, has_constraints = false, has_places = false;
  bool has_relations = false, has_operations = false;
  bool has_constructional = false, has_constituents = false;
  SourceLoc loc;
};

// Renders a definition back to concrete syntax. Reparsing the output
// yields a structurally identical definition.
std::string to_source(const Definition& def);
std::string to_source(const std::vector<Definition>& defs);

}  // namespace scim
