#include <algorithm>
#include <functional>
#include <set>

#include "scim/constraint.hpp"
#include "scim/registry.hpp"

namespace scim {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    default: return "undetermined";
  }
}

Verdict v_not(Verdict a) {
  if (a == Verdict::Satisfied) return Verdict::Violated;
  if (a == Verdict::Violated) return Verdict::Satisfied;
  return Verdict::Undetermined;
}

Verdict v_and(Verdict a, Verdict b) {
  if (a == Verdict::Violated || b == Verdict::Violated)
    return Verdict::Violated;
  if (a == Verdict::Satisfied && b == Verdict::Satisfied)
    return Verdict::Satisfied;
  return Verdict::Undetermined;
}

Verdict v_or(Verdict a, Verdict b) {
  if (a == Verdict::Satisfied || b == Verdict::Satisfied)
    return Verdict::Satisfied;
  if (a == Verdict::Violated && b == Verdict::Violated)
    return Verdict::Violated;
  return Verdict::Undetermined;
}

Verdict v_nand(Verdict a, Verdict b) { return v_not(v_and(a, b)); }

PathTarget locate_in_instance(const BranchState& st, std::uint32_t root,
                              const RolePath& rest) {
  PathTarget out;
  if (rest.segs.empty()) {
    out.located = true;
    out.whole_instance = true;
    out.inst = root;
    return out;
  }
  const TypeHierarchy& h = st.hierarchy();
  std::uint32_t cur = root;
  // Split the path at '.' boundaries: each chunk resolves to a slot of
  // the current instance, then descent follows the instance reference.
  size_t i = 0;
  while (i < rest.segs.size()) {
    RolePath chunk;
    chunk.segs.push_back({RolePath::Sep::First, rest.segs[i].name});
    i++;
    while (i < rest.segs.size() &&
           rest.segs[i].sep == RolePath::Sep::Star) {
      chunk.segs.push_back(rest.segs[i]);
      i++;
    }
    RoleDescriptor desc =
        h.resolve_role_path(st.instance(cur).type, chunk);
    if (i == rest.segs.size()) {
      out.located = true;
      out.inst = cur;
      out.slot = desc.slot;
      out.desc = desc;
      return out;
    }
    // descend through a '.' into the referenced instance
    Filler f = st.read_slot(cur, desc.slot);
    if (std::holds_alternative<Unbound>(f)) return out;  // not located
    const auto* ref = std::get_if<InstanceRef>(&f);
    if (!ref)
      throw RuntimeError("TypeMismatch",
                         "path " + rest.to_string() +
                             " descends through the atomic role '" +
                             desc.role_name + "'");
    cur = ref->id;
  }
  return out;
}

PathTarget locate_path(const EvalContext& cx, const RolePath& path) {
  ScopedPath sp = resolve_scoped_path(cx.state->hierarchy(), *cx.sc, path);
  auto it = cx.binding->find(sp.label);
  if (it == cx.binding->end())
    throw RuntimeError("UnboundLabel",
                       "label '" + sp.label + "' is not bound");
  return locate_in_instance(*cx.state, it->second, sp.rest);
}

Filler target_value(const BranchState& st, const PathTarget& t) {
  if (!t.located) return Unbound{};
  if (t.whole_instance) return InstanceRef{t.inst};
  return st.read_slot(t.inst, t.slot);
}

std::optional<Place> eval_place_expr(const EvalContext& cx,
                                     const PlaceExpr& pe) {
  if (!pe.is_op) {
    // a constituent's place in its situating context
    const ConstituentDecl* con = nullptr;
    for (const auto& c : cx.sc->constituents)
      if (c.label == pe.label) con = &c;
    if (!con || !con->context_label)
      throw RuntimeError("NotSituated",
                         "'" + pe.label + "' has no situating context");
    auto inst = cx.binding->find(pe.label);
    auto ctx = cx.binding->find(*con->context_label);
    if (inst == cx.binding->end() || ctx == cx.binding->end())
      throw RuntimeError("UnboundLabel",
                         "place of unbound constituent '" + pe.label + "'");
    return cx.state->place_of(inst->second, ctx->second);
  }
  auto ctx = cx.binding->find(pe.label);
  if (ctx == cx.binding->end())
    throw RuntimeError("UnboundLabel",
                       "context '" + pe.label + "' is not bound");
  std::vector<Place> args;
  for (const auto& a : pe.args) {
    auto p = eval_place_expr(cx, a);
    if (!p) return std::nullopt;
    args.push_back(*p);
  }
  const std::string& ctx_type = cx.state->instance(ctx->second).type;
  try {
    return cx.state->eval_operation(ctx_type, pe.op_name, args);
  } catch (const RuntimeError& e) {
    if (e.code() == "EmptyResult") return std::nullopt;
    throw;
  }
}

namespace {

// Evaluates the operands of a predicate/filler into atoms; Undetermined
// when any is unbound.
std::optional<Atom> operand_atom(const EvalContext& cx, const Operand& op,
                                 bool* failed) {
  if (!op.is_path) return op.atom;
  PathTarget t = locate_path(cx, op.path);
  Filler f = target_value(*cx.state, t);
  if (std::holds_alternative<Unbound>(f)) return std::nullopt;
  if (const auto* a = std::get_if<Atom>(&f)) return *a;
  *failed = true;
  throw RuntimeError("TypeMismatch", "path " + op.path.to_string() +
                                         " denotes an instance where an "
                                         "atomic value is required");
}

bool unify_impl(BranchState& st, const Filler& a, const Filler& b,
                Filler* out,
                std::set<std::pair<std::uint32_t, std::uint32_t>>& seen) {
  if (std::holds_alternative<Unbound>(a)) {
    *out = b;
    return true;
  }
  if (std::holds_alternative<Unbound>(b)) {
    *out = a;
    return true;
  }
  if (std::holds_alternative<Atom>(a) && std::holds_alternative<Atom>(b)) {
    if (!atoms_equal(std::get<Atom>(a), std::get<Atom>(b))) return false;
    *out = a;
    return true;
  }
  const auto* ra = std::get_if<InstanceRef>(&a);
  const auto* rb = std::get_if<InstanceRef>(&b);
  if (!ra || !rb) return false;
  *out = a;
  if (ra->id == rb->id) return true;
  auto key = std::minmax(ra->id, rb->id);
  if (!seen.insert(key).second) return true;  // already being unified
  const Instance& ia = st.instance(ra->id);
  const Instance& ib = st.instance(rb->id);
  if (ia.type != ib.type) return false;
  std::vector<std::string> slots;
  for (const auto& [slot, f] : ia.fillers) slots.push_back(slot);
  for (const auto& slot : slots) {
    Filler fa = st.read_slot(ra->id, slot);
    Filler fb = st.read_slot(rb->id, slot);
    Filler merged;
    if (!unify_impl(st, fa, fb, &merged, seen)) return false;
    if (std::holds_alternative<Unbound>(merged)) continue;
    if (std::holds_alternative<Unbound>(st.read_slot(ra->id, slot)))
      st.specify_role(ra->id, slot, merged);
    if (std::holds_alternative<Unbound>(st.read_slot(rb->id, slot)))
      st.specify_role(rb->id, slot, merged);
  }
  return true;
}

Verdict eval_equalish(const EvalContext& cx, const ConstraintExpr& c,
                      bool with_transform) {
  PathTarget lhs = locate_path(cx, c.args[0].path);
  PathTarget rhs = locate_path(cx, c.args[1].path);
  Filler lv = target_value(*cx.state, lhs);
  Filler rv = target_value(*cx.state, rhs);
  if (std::holds_alternative<Unbound>(lv) ||
      std::holds_alternative<Unbound>(rv))
    return Verdict::Undetermined;
  if (with_transform && !c.name.empty()) {
    const auto* a = std::get_if<Atom>(&rv);
    if (!a)
      throw RuntimeError("TypeMismatch",
                         "C-function '" + c.name +
                             "' applies to atomic values");
    rv = eval_transform(c.name, *a);
  }
  if (with_transform && std::holds_alternative<InstanceRef>(lv) &&
      std::holds_alternative<InstanceRef>(rv)) {
    // identification: distinct instances still satisfy when they unify
    return unifiable(*cx.state, lv, rv) ? Verdict::Satisfied
                                        : Verdict::Violated;
  }
  return filler_equal(lv, rv) ? Verdict::Satisfied : Verdict::Violated;
}

bool is_derived_from(const BranchState& st, std::uint32_t inst,
                     const std::string& type) {
  std::set<std::uint32_t> seen;
  std::vector<std::uint32_t> work{inst};
  const TypeHierarchy& h = st.hierarchy();
  while (!work.empty()) {
    std::uint32_t id = work.back();
    work.pop_back();
    if (!seen.insert(id).second) continue;
    const Instance& i = st.instance(id);
    if (h.is_subtype(i.type, type)) return true;
    for (auto p : i.parents) work.push_back(p);
  }
  return false;
}

}  // namespace

std::optional<Filler> unify_fillers(BranchState& st, const Filler& a,
                                    const Filler& b) {
  BranchState scratch = st;
  Filler out;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  if (!unify_impl(scratch, a, b, &out, seen)) return std::nullopt;
  st = std::move(scratch);
  return out;
}

bool unifiable(const BranchState& st, const Filler& a, const Filler& b) {
  BranchState scratch = st;
  Filler out;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  return unify_impl(scratch, a, b, &out, seen);
}

Verdict evaluate(const EvalContext& cx, const ConstraintExpr& c) {
  using F = ConstraintExpr::Form;
  switch (c.form) {
    case F::BoolOp: {
      if (c.name == "not") return v_not(evaluate(cx, c.children[0]));
      Verdict acc = evaluate(cx, c.children[0]);
      for (size_t i = 1; i < c.children.size(); i++) {
        Verdict v = evaluate(cx, c.children[i]);
        acc = (c.name == "or") ? v_or(acc, v) : v_and(acc, v);
      }
      if (c.name == "nand") acc = v_not(acc);
      return acc;
    }
    case F::Filler: {
      PathTarget lhs = locate_path(cx, c.args[0].path);
      Filler lv = target_value(*cx.state, lhs);
      if (std::holds_alternative<Unbound>(lv)) return Verdict::Undetermined;
      std::vector<Atom> fn_args;
      for (size_t i = 1; i < c.args.size(); i++)
        fn_args.push_back(c.args[i].atom);
      Atom rhs = c.name.empty() ? fn_args[0]
                                : eval_atomic_function(c.name, fn_args);
      const auto* a = std::get_if<Atom>(&lv);
      if (!a)
        throw RuntimeError("TypeMismatch",
                           "filler constraint on an instance-valued role");
      return atoms_equal(*a, rhs) ? Verdict::Satisfied : Verdict::Violated;
    }
    case F::Identification:
      return eval_equalish(cx, c, true);
    case F::Equality:
      return eval_equalish(cx, c, false);
    case F::Predicate: {
      std::vector<Atom> atoms;
      bool failed = false;
      for (const auto& a : c.args) {
        auto v = operand_atom(cx, a, &failed);
        if (!v) return Verdict::Undetermined;
        atoms.push_back(*v);
      }
      return eval_predicate(c.name, atoms) ? Verdict::Satisfied
                                           : Verdict::Violated;
    }
    case F::ContextRelation: {
      PathTarget rcv = locate_path(cx, c.args[0].path);
      Filler rv = target_value(*cx.state, rcv);
      const auto* ref = std::get_if<InstanceRef>(&rv);
      if (std::holds_alternative<Unbound>(rv)) return Verdict::Undetermined;
      if (!ref)
        throw RuntimeError("NotAContext",
                           "relation receiver is not an instance");
      std::vector<Place> places;
      for (const auto& pe : c.places) {
        auto p = eval_place_expr(cx, pe);
        if (!p) return Verdict::Undetermined;
        places.push_back(*p);
      }
      const std::string& ctx_type = cx.state->instance(ref->id).type;
      RelationValue v;
      try {
        v = cx.state->eval_relation(ctx_type, c.name, places);
      } catch (const RuntimeError& e) {
        if (e.code() == "EmptyResult") return Verdict::Undetermined;
        throw;
      }
      const auto* b = std::get_if<bool>(&v);
      if (!b)
        throw RuntimeError("TypeMismatch",
                           "relation '" + c.name +
                               "' does not yield a Boolean");
      return *b ? Verdict::Satisfied : Verdict::Violated;
    }
    case F::Parent: {
      PathTarget lhs = locate_path(cx, c.args[0].path);
      Filler lv = target_value(*cx.state, lhs);
      if (std::holds_alternative<Unbound>(lv)) return Verdict::Undetermined;
      const auto* ref = std::get_if<InstanceRef>(&lv);
      if (!ref)
        throw RuntimeError("TypeMismatch",
                           "'C' applies to instances, not atomic values");
      return is_derived_from(*cx.state, ref->id, c.args[1].path.segs[0].name)
                 ? Verdict::Satisfied
                 : Verdict::Violated;
    }
    case F::Out:
    case F::Placement:
      return Verdict::Satisfied;  // effects, applied by the engine
  }
  return Verdict::Undetermined;
}

Verdict evaluate_type_constraint(const BranchState& st, std::uint32_t inst,
                                 const ConstraintExpr& c) {
  // Reuse the scoped evaluator with a synthetic one-label scope.
  static const std::string kSelf = "#self";
  EffectiveSC sc;
  sc.name = st.instance(inst).type;
  ConstituentDecl self;
  self.label = kSelf;
  self.type_name = sc.name;
  sc.constituents.push_back(self);
  Binding b{{kSelf, inst}};
  EvalContext cx{&st, &sc, &b};

  // Rebase paths under the synthetic label.
  std::function<ConstraintExpr(const ConstraintExpr&)> reroot =
      [&](const ConstraintExpr& in) {
        ConstraintExpr out = in;
        for (auto& a : out.args) {
          if (!a.is_path) continue;
          RolePath p;
          p.muted = a.path.muted;
          p.segs.push_back({RolePath::Sep::First, kSelf});
          if (a.path.self && a.path.segs.empty()) {
            // bare self: the instance itself
          } else {
            for (size_t i = 0; i < a.path.segs.size(); i++) {
              auto seg = a.path.segs[i];
              if (i == 0 && seg.sep == RolePath::Sep::First)
                seg.sep = RolePath::Sep::Star;
              p.segs.push_back(seg);
            }
          }
          a.path = std::move(p);
        }
        std::vector<ConstraintExpr> kids;
        for (const auto& ch : in.children) kids.push_back(reroot(ch));
        out.children = std::move(kids);
        return out;
      };
  return evaluate(cx, reroot(c));
}

Verdict validate_instance(const BranchState& st, std::uint32_t inst) {
  const Instance& i = st.instance(inst);
  Verdict acc = Verdict::Satisfied;
  for (const auto& c : st.hierarchy().effective_constraints(i.type)) {
    if (c.form == ConstraintExpr::Form::Out ||
        c.form == ConstraintExpr::Form::Placement)
      continue;
    acc = v_and(acc, evaluate_type_constraint(st, inst, c));
    if (acc == Verdict::Violated) return acc;
  }
  return acc;
}

namespace {

bool path_is_post(const EffectiveSC& sc, const std::set<std::string>& outs,
                  const RolePath& p) {
  if (p.muted) return true;
  if (!p.segs.empty() && outs.count(p.segs[0].name)) return true;
  return false;
}

bool place_is_post(const std::set<std::string>& outs, const PlaceExpr& pe) {
  if (!pe.is_op) return outs.count(pe.label) > 0;
  if (outs.count(pe.label)) return true;
  for (const auto& a : pe.args)
    if (place_is_post(outs, a)) return true;
  return false;
}

}  // namespace

bool is_post_phase(const EffectiveSC& sc, const ConstraintExpr& c) {
  if (c.form == ConstraintExpr::Form::Out ||
      c.form == ConstraintExpr::Form::Placement)
    return true;
  std::set<std::string> outs;
  for (const auto& con : sc.constituents)
    if (con.dir == Direction::Out) outs.insert(con.label);
  std::function<bool(const ConstraintExpr&)> walk =
      [&](const ConstraintExpr& e) {
        for (const auto& a : e.args)
          if (a.is_path && path_is_post(sc, outs, a.path)) return true;
        for (const auto& pe : e.places)
          if (place_is_post(outs, pe)) return true;
        for (const auto& ch : e.children)
          if (walk(ch)) return true;
        return false;
      };
  return walk(c);
}

}  // namespace scim
