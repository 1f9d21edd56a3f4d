#include <algorithm>
#include <functional>
#include <set>

#include "scim/place.hpp"
#include "scim/registry.hpp"
#include "scim/validate.hpp"

namespace scim {

namespace {

class Validator {
 public:
  explicit Validator(const std::vector<Definition>& defs) : defs_(defs) {}

  std::vector<Diagnostic> run() {
    check_names();
    check_inheritance();
    if (!diags_.empty()) return diags_;
    hierarchy_ = TypeHierarchy::build(defs_);
    for (const auto& d : defs_) check_definition(d);
    return diags_;
  }

 private:
  const std::vector<Definition>& defs_;
  TypeHierarchy hierarchy_;
  std::vector<Diagnostic> diags_;

  void err(const std::string& code, const std::string& msg, SourceLoc loc) {
    diags_.push_back({code, msg, loc});
  }

  const Definition* find_def(const std::string& name) const {
    for (const auto& d : defs_)
      if (d.name == name) return &d;
    return nullptr;
  }

  void check_names() {
    std::set<std::string> seen;
    for (const auto& d : defs_) {
      if (is_builtin_atomic(d.name))
        err("DuplicateDefinition",
            "'" + d.name + "' redefines a built-in atomic type", d.loc);
      else if (!seen.insert(d.name).second)
        err("DuplicateDefinition", "type '" + d.name + "' defined twice",
            d.loc);
      if (d.kind == DefKind::Enum) {
        std::set<std::string> members;
        for (const auto& m : d.enumerators)
          if (!members.insert(m).second)
            err("DuplicateEnumerator",
                "enum " + d.name + " lists '" + m + "' twice", d.loc);
        if (d.enumerators.empty())
          err("EmptyEnum", "enum " + d.name + " has no members", d.loc);
      }
      if (d.confidence && (*d.confidence <= 0 || *d.confidence > 1.0))
        err("InvalidConfidence",
            "confidence of " + d.name + " must be in (0, 1]", d.loc);
    }
  }

  static const char* kind_word(DefKind k) {
    switch (k) {
      case DefKind::Schema: return "schema";
      case DefKind::Context: return "context";
      case DefKind::SConstruction: return "s-construction";
      default: return "enum";
    }
  }

  void check_inheritance() {
    for (const auto& d : defs_) {
      for (const auto& p : d.inherits) {
        const Definition* pd = find_def(p);
        if (!pd) {
          err("UnknownType",
              d.name + " inherits unknown type '" + p + "'", d.loc);
          continue;
        }
        bool ok = false;
        switch (d.kind) {
          case DefKind::Schema: ok = pd->kind == DefKind::Schema; break;
          case DefKind::Context:
            ok = pd->kind == DefKind::Context || pd->kind == DefKind::Schema;
            break;
          case DefKind::SConstruction:
            ok = pd->kind == DefKind::SConstruction;
            break;
          case DefKind::Enum: ok = false; break;
        }
        if (!ok)
          err("InvalidInheritance",
              std::string(kind_word(d.kind)) + " " + d.name +
                  " cannot inherit from " + kind_word(pd->kind) + " " + p,
              d.loc);
      }
    }
    if (!diags_.empty()) return;

    // cycle detection with explicit path reporting
    std::set<std::string> done, on_stack;
    std::vector<std::string> stack;
    std::function<void(const Definition&)> visit = [&](const Definition& d) {
      if (done.count(d.name)) return;
      if (on_stack.count(d.name)) {
        auto it = std::find(stack.begin(), stack.end(), d.name);
        std::string cycle;
        for (; it != stack.end(); ++it) cycle += *it + " -> ";
        err("InheritanceCycle", "inheritance cycle: " + cycle + d.name,
            d.loc);
        return;
      }
      on_stack.insert(d.name);
      stack.push_back(d.name);
      for (const auto& p : d.inherits)
        if (const Definition* pd = find_def(p)) visit(*pd);
      stack.pop_back();
      on_stack.erase(d.name);
      done.insert(d.name);
    };
    for (const auto& d : defs_) visit(d);
  }

  void check_roles(const Definition& d) {
    std::set<std::string> seen;
    for (const auto& r : d.roles) {
      if (!seen.insert(r.name).second)
        err("DuplicateRole",
            d.name + " declares role '" + r.name + "' twice", r.loc);
      if (!hierarchy_.has_type(r.type_name)) {
        err("UnknownType",
            "role '" + r.name + "' of " + d.name + " has unknown type '" +
                r.type_name + "'",
            r.loc);
        continue;
      }
      if (hierarchy_.kind_of(r.type_name) == TypeKind::SConstruction)
        err("InvalidRoleType",
            "role '" + r.name + "' of " + d.name +
                " cannot hold an s-construction",
            r.loc);
      if (r.situated_in)
        err("InvalidRoleDecl",
            "role '" + r.name + "' of " + d.name +
                ": situating '@' annotations belong on constituents",
            r.loc);
    }
  }

  void check_sig(const Definition& d, const RelationSig& s, bool is_op) {
    auto declared = hierarchy_.effective_places(d.name);
    for (const auto& p : s.param_places) {
      if (!is_place_kind_name(p))
        err("UnknownPlaceKind",
            d.name + "." + s.name + ": '" + p + "' is not a place kind",
            s.loc);
      else if (std::find(declared.begin(), declared.end(), p) ==
               declared.end())
        err("UndeclaredPlaceKind",
            d.name + "." + s.name + ": place kind '" + p +
                "' is not declared by this context",
            s.loc);
    }
    if (is_op) {
      if (!is_place_kind_name(s.result))
        err("UnknownPlaceKind",
            d.name + "." + s.name + ": result '" + s.result +
                "' is not a place kind",
            s.loc);
      else if (!native_operation_exists(s.name, s.param_places))
        err("UnknownOperation",
            d.name + "." + s.name + ": no native operation matches this "
                                    "signature",
            s.loc);
    } else {
      if (s.result != "Boolean" && s.result != "Integer" &&
          s.result != "Float")
        err("InvalidRelationResult",
            d.name + "." + s.name + ": relations yield Boolean, Integer or "
                                    "Float",
            s.loc);
      else if (!native_relation_exists(s.name, s.param_places))
        err("UnknownRelation",
            d.name + "." + s.name + ": no native relation matches this "
                                    "signature",
            s.loc);
    }
  }

  // ---- constraint checking ------------------------------------------

  // Resolves a path inside a schema/context definition.
  bool check_type_path(const Definition& d, const RolePath& p,
                       SourceLoc loc) {
    if (p.muted) {
      err("InvalidConstraint",
          d.name + ": muted paths ('?') only appear in s-constructions",
          loc);
      return false;
    }
    try {
      hierarchy_.resolve_role_path(d.name, p);
      return true;
    } catch (const RuntimeError& e) {
      err(e.code(), d.name + ": " + e.what(), loc);
      return false;
    }
  }

  void check_type_constraint(const Definition& d, const ConstraintExpr& c) {
    using F = ConstraintExpr::Form;
    switch (c.form) {
      case F::BoolOp:
        for (const auto& ch : c.children) check_type_constraint(d, ch);
        break;
      case F::Filler: {
        if (!check_type_path(d, c.args[0].path, c.loc)) break;
        if (!c.name.empty() && !atomic_function_exists(c.name))
          err("UnknownFunction",
              d.name + ": no function '" + c.name + "'", c.loc);
        break;
      }
      case F::Identification:
        check_type_path(d, c.args[0].path, c.loc);
        check_type_path(d, c.args[1].path, c.loc);
        if (!c.name.empty() && !transform_exists(c.name))
          err("UnknownFunction",
              d.name + ": no C-function '" + c.name + "'", c.loc);
        break;
      case F::Equality:
        check_type_path(d, c.args[0].path, c.loc);
        check_type_path(d, c.args[1].path, c.loc);
        break;
      case F::Predicate:
        if (!predicate_exists(c.name))
          err("UnknownPredicate",
              d.name + ": no predicate '" + c.name + "'", c.loc);
        for (const auto& a : c.args)
          if (a.is_path) check_type_path(d, a.path, c.loc);
        break;
      default:
        err("InvalidConstraint",
            d.name + ": this constraint form only appears in "
                     "s-constructions",
            c.loc);
        break;
    }
  }

  // ---- s-construction checking --------------------------------------

  struct ScScope {
    std::map<std::string, std::string> label_type;  // constituent labels
    std::map<std::string, ConstituentDecl> constituents;
    std::set<std::string> constructional_pos;
    std::set<std::string> negative;
  };

  ScScope build_scope(const Definition& d, const EffectiveSC& sc) {
    ScScope scope;
    auto taken = [&](const std::string& label) {
      return scope.label_type.count(label) || scope.negative.count(label) ||
             scope.constructional_pos.count(label);
    };
    auto add_label = [&](const std::string& label, const std::string& type,
                         SourceLoc loc) {
      if (taken(label))
        err("DuplicateLabel",
            d.name + " declares label '" + label + "' twice", loc);
      scope.label_type[label] = type;
    };
    for (const auto& cd : sc.constructional) {
      if (!hierarchy_.has_type(cd.type_name)) {
        err("UnknownType",
            d.name + ": constructional type '" + cd.type_name +
                "' is not declared",
            cd.loc);
        continue;
      }
      if (hierarchy_.kind_of(cd.type_name) != TypeKind::SConstruction)
        err("InvalidConstructional",
            d.name + ": constructional entries name s-constructions, not " +
                cd.type_name,
            cd.loc);
      if (taken(cd.label))
        err("DuplicateLabel",
            d.name + " declares label '" + cd.label + "' twice", cd.loc);
      if (cd.negative)
        scope.negative.insert(cd.label);
      else
        scope.constructional_pos.insert(cd.label);
    }
    for (const auto& con : sc.constituents) {
      if (!hierarchy_.has_type(con.type_name)) {
        err("UnknownType",
            d.name + ": constituent '" + con.label + "' has unknown type '" +
                con.type_name + "'",
            con.loc);
        continue;
      }
      TypeKind k = hierarchy_.kind_of(con.type_name);
      if (k != TypeKind::Schema && k != TypeKind::Context) {
        err("InvalidConstituent",
            d.name + ": constituent '" + con.label +
                "' must have a schema or context type",
            con.loc);
        continue;
      }
      if (con.context_label) {
        auto it = scope.constituents.find(*con.context_label);
        if (it == scope.constituents.end())
          err("UnknownLabel",
              d.name + ": constituent '" + con.label + "' is situated in '" +
                  *con.context_label +
                  "', which is not a previously declared constituent",
              con.loc);
        else if (hierarchy_.kind_of(it->second.type_name) !=
                 TypeKind::Context)
          err("NotAContext",
              d.name + ": '" + *con.context_label + "' is not a context",
              con.loc);
      }
      add_label(con.label, con.type_name, con.loc);
      scope.constituents[con.label] = con;
    }
    return scope;
  }

  // Resolves a path against the scope; reports and returns nullopt on
  // failure.
  std::optional<ScopedPath> check_sc_path(const Definition& d,
                                          const ScScope& scope,
                                          const RolePath& p, SourceLoc loc,
                                          bool allow_muted) {
    if (p.self || p.segs.empty()) {
      err("UnresolvedRolePath",
          d.name + ": s-construction paths start at a constituent label",
          loc);
      return std::nullopt;
    }
    const std::string& root = p.segs[0].name;
    if (scope.negative.count(root) || scope.constructional_pos.count(root)) {
      err("UnboundLabel",
          d.name + ": '" + root + "' is a constructional label and cannot "
                                  "be referenced in constraints",
          loc);
      return std::nullopt;
    }
    auto it = scope.label_type.find(root);
    if (it == scope.label_type.end()) {
      err("UnknownLabel",
          d.name + ": '" + root + "' is not a declared label", loc);
      return std::nullopt;
    }
    if (p.muted && !allow_muted) {
      err("InvalidConstraint",
          d.name + ": a muted path cannot appear here", loc);
      return std::nullopt;
    }
    ScopedPath out;
    out.label = root;
    out.rest.muted = p.muted;
    for (size_t i = 1; i < p.segs.size(); i++) {
      auto seg = p.segs[i];
      if (i == 1) seg.sep = RolePath::Sep::First;
      out.rest.segs.push_back(seg);
    }
    if (out.rest.segs.empty()) {
      if (p.segs[0].sep != RolePath::Sep::First) return std::nullopt;
      out.whole_instance = true;
      return out;
    }
    if (p.segs[1].sep == RolePath::Sep::Dot ||
        p.segs[1].sep == RolePath::Sep::Star) {
      try {
        out.role = hierarchy_.resolve_role_path(it->second, out.rest);
      } catch (const RuntimeError& e) {
        err(e.code(), d.name + ": " + e.what(), loc);
        return std::nullopt;
      }
      if (p.muted && !out.role.mutable_flag) {
        err("ImmutableRole",
            d.name + ": muted path " + p.to_string() +
                " targets an immutable role",
            loc);
        return std::nullopt;
      }
      return out;
    }
    return std::nullopt;
  }

  void check_place_expr(const Definition& d, const ScScope& scope,
                        const PlaceExpr& pe) {
    if (!pe.is_op) {
      auto it = scope.constituents.find(pe.label);
      if (it == scope.constituents.end()) {
        err("UnknownLabel",
            d.name + ": '" + pe.label + "' is not a constituent", pe.loc);
        return;
      }
      if (!it->second.context_label)
        err("NotSituated",
            d.name + ": constituent '" + pe.label +
                "' has no situating context, so it has no place",
            pe.loc);
      return;
    }
    auto it = scope.label_type.find(pe.label);
    if (it == scope.label_type.end() ||
        hierarchy_.kind_of(it->second) != TypeKind::Context) {
      err("NotAContext",
          d.name + ": '" + pe.label + "' is not a context constituent",
          pe.loc);
      return;
    }
    bool found = false;
    for (const auto& sig : hierarchy_.effective_operations(it->second))
      if (sig.name == pe.op_name && sig.param_places.size() == pe.args.size())
        found = true;
    if (!found)
      err("UnknownOperation",
          d.name + ": context " + it->second + " declares no operation '" +
              pe.op_name + "' with " + std::to_string(pe.args.size()) +
              " arguments",
          pe.loc);
    for (const auto& a : pe.args) check_place_expr(d, scope, a);
  }

  void check_sc_constraint(const Definition& d, const ScScope& scope,
                           const ConstraintExpr& c, bool top_level) {
    using F = ConstraintExpr::Form;
    switch (c.form) {
      case F::BoolOp:
        for (const auto& ch : c.children)
          check_sc_constraint(d, scope, ch, false);
        break;
      case F::Filler: {
        auto lhs = check_sc_path(d, scope, c.args[0].path, c.loc, true);
        if (lhs && lhs->whole_instance)
          err("InvalidConstraint",
              d.name + ": a filler constraint targets a role, not a whole "
                       "constituent",
              c.loc);
        if (!c.name.empty() && !atomic_function_exists(c.name))
          err("UnknownFunction",
              d.name + ": no function '" + c.name + "'", c.loc);
        break;
      }
      case F::Identification:
        check_sc_path(d, scope, c.args[0].path, c.loc, true);
        check_sc_path(d, scope, c.args[1].path, c.loc, false);
        if (!c.name.empty() && !transform_exists(c.name))
          err("UnknownFunction",
              d.name + ": no C-function '" + c.name + "'", c.loc);
        break;
      case F::Equality:
        check_sc_path(d, scope, c.args[0].path, c.loc, false);
        check_sc_path(d, scope, c.args[1].path, c.loc, false);
        break;
      case F::Predicate:
        if (!predicate_exists(c.name))
          err("UnknownPredicate",
              d.name + ": no predicate '" + c.name + "'", c.loc);
        for (const auto& a : c.args)
          if (a.is_path) check_sc_path(d, scope, a.path, c.loc, false);
        break;
      case F::ContextRelation: {
        auto ctx = check_sc_path(d, scope, c.args[0].path, c.loc, false);
        if (ctx) {
          std::string ctx_type = ctx->whole_instance
                                     ? scope.label_type.at(ctx->label)
                                     : ctx->role.declared_type;
          if (!hierarchy_.has_type(ctx_type) ||
              hierarchy_.kind_of(ctx_type) != TypeKind::Context) {
            err("NotAContext",
                d.name + ": relation receiver is not a context", c.loc);
          } else {
            bool found = false;
            for (const auto& sig : hierarchy_.effective_relations(ctx_type))
              if (sig.name == c.name &&
                  sig.param_places.size() == c.places.size())
                found = true;
            if (!found)
              err("UnknownRelation",
                  d.name + ": context " + ctx_type +
                      " declares no relation '" + c.name + "' with " +
                      std::to_string(c.places.size()) + " arguments",
                  c.loc);
          }
        }
        for (const auto& pe : c.places) check_place_expr(d, scope, pe);
        break;
      }
      case F::Parent: {
        check_sc_path(d, scope, c.args[0].path, c.loc, false);
        const RolePath& tp = c.args[1].path;
        if (tp.segs.size() != 1 || tp.self || tp.muted ||
            !hierarchy_.has_type(tp.segs[0].name))
          err("UnknownType",
              d.name + ": 'C' expects a declared type on its right side",
              c.loc);
        break;
      }
      case F::Out: {
        if (!top_level) {
          err("InvalidConstraint",
              d.name + ": OUT cannot be nested in a boolean operator",
              c.loc);
          break;
        }
        const std::string& label = c.args[0].path.segs[0].name;
        auto it = scope.constituents.find(label);
        if (it == scope.constituents.end()) {
          err("UnknownLabel",
              d.name + ": OUT names unknown constituent '" + label + "'",
              c.loc);
          break;
        }
        if (it->second.dir == Direction::Out)
          err("InvalidConstraint",
              d.name + ": OUT applies to input constituents, and '" + label +
                  "' is an output",
              c.loc);
        if (!it->second.context_label)
          err("NotSituated",
              d.name + ": OUT removes '" + label +
                  "' from its context, but it has none",
              c.loc);
        break;
      }
      case F::Placement: {
        if (!top_level) {
          err("InvalidConstraint",
              d.name + ": placements cannot be nested in a boolean operator",
              c.loc);
          break;
        }
        auto lhs = check_sc_path(d, scope, c.args[0].path, c.loc, false);
        if (lhs) {
          if (!lhs->whole_instance) {
            err("InvalidConstraint",
                d.name + ": placements position a whole constituent", c.loc);
          } else {
            auto it = scope.constituents.find(lhs->label);
            if (it == scope.constituents.end() || !it->second.context_label)
              err("NotSituated",
                  d.name + ": '" + lhs->label +
                      "' has no situating context to be placed in",
                  c.loc);
          }
        }
        check_place_expr(d, scope, c.places[0]);
        break;
      }
    }
  }

  void check_definition(const Definition& d) {
    if (d.kind == DefKind::Enum) return;
    check_roles(d);
    if (d.kind == DefKind::Schema || d.kind == DefKind::Context) {
      for (const auto& c : d.constraints) check_type_constraint(d, c);
      for (const auto& s : d.relations) check_sig(d, s, false);
      for (const auto& s : d.operations) check_sig(d, s, true);
      for (const auto& p : d.places)
        if (!is_place_kind_name(p))
          err("UnknownPlaceKind",
              d.name + " declares unknown place kind '" + p + "'", d.loc);
      return;
    }
    // s-construction: validate the merged view so inherited blocks are
    // checked in the scope of this construction.
    if (!d.roles.empty())
      err("InvalidRoleDecl",
          d.name + ": s-constructions declare constituents, not roles",
          d.loc);
    EffectiveSC sc = effective_sconstruction(hierarchy_, d.name);
    ScScope scope = build_scope(d, sc);
    bool has_output = false;
    for (const auto& con : sc.constituents)
      if (con.dir != Direction::In) has_output = true;
    bool has_effect = has_output;
    std::function<void(const ConstraintExpr&)> scan_effects =
        [&](const ConstraintExpr& e) {
          if (e.form == ConstraintExpr::Form::Out) has_effect = true;
          for (const auto& a : e.args)
            if (a.is_path && a.path.muted) has_effect = true;
          for (const auto& ch : e.children) scan_effects(ch);
        };
    for (const auto& c : sc.constraints) {
      check_sc_constraint(d, scope, c, true);
      scan_effects(c);
    }
    if (sc.constituents.empty())
      err("NoConstituents", d.name + " has no constituents", d.loc);
    else if (!has_effect)
      err("NoEffect",
          d.name + " has no output constituent, mutation or OUT; firing it "
                   "would do nothing",
          d.loc);
  }
};

}  // namespace

EffectiveSC effective_sconstruction(const TypeHierarchy& h,
                                    const std::string& name) {
  const TypeNode& n = h.node(name);
  if (n.kind != TypeKind::SConstruction)
    throw RuntimeError("UnknownType",
                       "'" + name + "' is not an s-construction");
  EffectiveSC out;
  out.name = name;
  for (const auto& p : n.parents) {
    EffectiveSC pe = effective_sconstruction(h, p);
    out.confidence *= pe.confidence;
    out.constructional.insert(out.constructional.end(),
                              pe.constructional.begin(),
                              pe.constructional.end());
    out.constituents.insert(out.constituents.end(), pe.constituents.begin(),
                            pe.constituents.end());
    out.constraints.insert(out.constraints.end(), pe.constraints.begin(),
                           pe.constraints.end());
  }
  if (n.def) {
    if (n.def->confidence) out.confidence *= *n.def->confidence;
    out.constructional.insert(out.constructional.end(),
                              n.def->constructional.begin(),
                              n.def->constructional.end());
    out.constituents.insert(out.constituents.end(),
                            n.def->constituents.begin(),
                            n.def->constituents.end());
    out.constraints.insert(out.constraints.end(), n.def->constraints.begin(),
                           n.def->constraints.end());
  }
  return out;
}

ScopedPath resolve_scoped_path(const TypeHierarchy& h, const EffectiveSC& sc,
                               const RolePath& path) {
  if (path.self || path.segs.empty())
    throw RuntimeError("UnresolvedRolePath",
                       "s-construction paths start at a constituent label");
  const std::string& root = path.segs[0].name;
  std::string root_type;
  for (const auto& con : sc.constituents)
    if (con.label == root) root_type = con.type_name;
  if (root_type.empty())
    throw RuntimeError("UnknownLabel",
                       "'" + root + "' is not a declared label of " +
                           sc.name);
  ScopedPath out;
  out.label = root;
  out.rest.muted = path.muted;
  for (size_t i = 1; i < path.segs.size(); i++) {
    auto seg = path.segs[i];
    if (i == 1) seg.sep = RolePath::Sep::First;
    out.rest.segs.push_back(seg);
  }
  if (out.rest.segs.empty()) {
    out.whole_instance = true;
    return out;
  }
  out.role = h.resolve_role_path(root_type, out.rest);
  return out;
}

ValidateResult validate(std::vector<Definition> defs) {
  ValidateResult result;
  {
    Validator v(defs);
    result.diagnostics = v.run();
  }
  for (const auto& d : result.diagnostics)
    if (d.code != "Warning") {
      return result;
    }
  auto stable =
      std::make_shared<const std::vector<Definition>>(std::move(defs));
  auto prog = std::make_shared<CompiledProgram>();
  prog->defs = stable;
  prog->hierarchy = TypeHierarchy::build(*stable);
  result.program = std::move(prog);
  return result;
}

ValidateResult compile_sources(const std::vector<std::string>& sources) {
  std::vector<Definition> defs;
  std::vector<Diagnostic> diags;
  ParseResult prelude = parse_source(prelude_source());
  defs.insert(defs.end(), prelude.definitions.begin(),
              prelude.definitions.end());
  diags.insert(diags.end(), prelude.diagnostics.begin(),
               prelude.diagnostics.end());
  for (const auto& src : sources) {
    ParseResult pr = parse_source(src);
    defs.insert(defs.end(), pr.definitions.begin(), pr.definitions.end());
    diags.insert(diags.end(), pr.diagnostics.begin(), pr.diagnostics.end());
  }
  if (!diags.empty()) {
    ValidateResult result;
    result.diagnostics = std::move(diags);
    return result;
  }
  return validate(std::move(defs));
}

ValidateResult compile_source(const std::string& source) {
  return compile_sources({source});
}

}  // namespace scim
