#include <algorithm>
#include <functional>

#include "scim/type_system.hpp"

namespace scim {

bool is_builtin_atomic(const std::string& name) {
  return name == "Integer" || name == "Float" || name == "Boolean" ||
         name == "String";
}

namespace {

[[noreturn]] void unknown_type(const std::string& name) {
  throw RuntimeError("UnknownType", "type '" + name + "' is not declared");
}

// Insert an inheritance hop in front of every role path of a constraint.
RolePath rebase_path(const RolePath& p, const std::string& parent) {
  RolePath out = p;
  if (out.self && out.segs.empty()) return out;  // bare self: same instance
  out.self = false;
  std::vector<RolePath::Seg> segs;
  segs.push_back({RolePath::Sep::First, parent});
  for (size_t i = 0; i < p.segs.size(); i++) {
    RolePath::Seg s = p.segs[i];
    if (i == 0 && s.sep == RolePath::Sep::First) s.sep = RolePath::Sep::Star;
    segs.push_back(std::move(s));
  }
  out.segs = std::move(segs);
  return out;
}

void rebase_constraint(ConstraintExpr& c, const std::string& parent) {
  for (auto& a : c.args)
    if (a.is_path) a.path = rebase_path(a.path, parent);
  for (auto& ch : c.children) rebase_constraint(ch, parent);
  // place expressions only occur in s-construction constraints, which are
  // rebased with the same label namespace; labels are left untouched.
}

}  // namespace

TypeHierarchy TypeHierarchy::build(const std::vector<Definition>& defs) {
  TypeHierarchy h;
  for (const char* a : {"Integer", "Float", "Boolean", "String"}) {
    TypeNode n;
    n.kind = TypeKind::Atomic;
    n.name = a;
    h.nodes_[a] = n;
  }
  for (const auto& d : defs) {
    TypeNode n;
    switch (d.kind) {
      case DefKind::Schema: n.kind = TypeKind::Schema; break;
      case DefKind::Context: n.kind = TypeKind::Context; break;
      case DefKind::SConstruction: n.kind = TypeKind::SConstruction; break;
      case DefKind::Enum: n.kind = TypeKind::Enum; break;
    }
    n.name = d.name;
    n.parents = d.inherits;
    n.def = &d;
    h.nodes_[d.name] = n;
    if (d.kind == DefKind::Enum)
      h.enum_members_[d.name] = {d.enumerators.begin(), d.enumerators.end()};
  }
  // reflexive-transitive ancestor closure
  std::function<const std::set<std::string>&(const std::string&)> close =
      [&](const std::string& t) -> const std::set<std::string>& {
    auto it = h.ancestors_.find(t);
    if (it != h.ancestors_.end()) return it->second;
    auto& set = h.ancestors_[t];
    set.insert(t);
    auto nit = h.nodes_.find(t);
    if (nit != h.nodes_.end()) {
      for (const auto& p : nit->second.parents) {
        const auto& ps = close(p);
        set.insert(ps.begin(), ps.end());
      }
    }
    return set;
  };
  for (const auto& [name, node] : h.nodes_) close(name);
  return h;
}

bool TypeHierarchy::has_type(const std::string& name) const {
  return nodes_.count(name) > 0;
}

const TypeNode& TypeHierarchy::node(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) unknown_type(name);
  return it->second;
}

TypeKind TypeHierarchy::kind_of(const std::string& name) const {
  return node(name).kind;
}

bool TypeHierarchy::is_subtype(const std::string& sub,
                               const std::string& super) const {
  const TypeNode& s = node(sub);
  const TypeNode& r = node(super);
  if (s.kind == TypeKind::Atomic || s.kind == TypeKind::Enum ||
      r.kind == TypeKind::Atomic || r.kind == TypeKind::Enum) {
    if (sub == super) return true;
    return sub == "Integer" && super == "Float";
  }
  auto it = ancestors_.find(sub);
  return it != ancestors_.end() && it->second.count(super) > 0;
}

void TypeHierarchy::build_table(const std::string& type,
                                std::map<std::string, RoleDescriptor>& out,
                                const std::string& prefix) const {
  const TypeNode& n = node(type);
  if (n.def) {
    for (const auto& r : n.def->roles) {
      RoleDescriptor d;
      d.owner = type;
      d.role_name = r.name;
      d.declared_type = r.type_name;
      auto tit = nodes_.find(r.type_name);
      d.declared_kind =
          tit != nodes_.end() ? tit->second.kind : TypeKind::Schema;
      d.mutable_flag = r.mutable_flag;
      d.situated_in = r.situated_in;
      d.slot = prefix.empty() ? r.name : prefix + "*" + r.name;
      out[d.slot] = d;
    }
    for (const auto& p : n.def->inherits)
      build_table(p, out, prefix.empty() ? p : prefix + "*" + p);
  }
}

const std::map<std::string, RoleDescriptor>& TypeHierarchy::table(
    const std::string& type) const {
  auto it = role_tables_.find(type);
  if (it != role_tables_.end()) return it->second;
  auto& t = role_tables_[type];
  build_table(type, t, "");
  return t;
}

const std::map<std::string, RoleDescriptor>& TypeHierarchy::effective_roles(
    const std::string& type) const {
  node(type);  // existence check
  return table(type);
}

RoleDescriptor TypeHierarchy::resolve_slot(const std::string& type,
                                           const std::string& slot) const {
  const auto& t = table(type);
  auto it = t.find(slot);
  if (it == t.end())
    throw RuntimeError("UnresolvedRolePath",
                       "no slot '" + slot + "' in type '" + type + "'");
  return it->second;
}

RoleDescriptor TypeHierarchy::resolve_role_path(const std::string& start,
                                                const RolePath& path) const {
  std::string cur_type = start;
  node(cur_type);
  if (path.self && path.segs.empty()) {
    // the instance itself
    RoleDescriptor d;
    d.owner = start;
    d.declared_type = start;
    d.declared_kind = kind_of(start);
    d.slot = "";
    return d;
  }
  RoleDescriptor cur;
  bool have_role = false;
  std::string hop_prefix;        // star chain accumulated inside cur_type
  std::string hop_type = start;  // type reached by the star chain

  auto fail = [&](const std::string& msg) -> void {
    throw RuntimeError("UnresolvedRolePath",
                       msg + " (path " + path.to_string() + " from '" +
                           start + "')");
  };

  for (size_t i = 0; i < path.segs.size(); i++) {
    const auto& seg = path.segs[i];
    bool next_is_star = i + 1 < path.segs.size() &&
                        path.segs[i + 1].sep == RolePath::Sep::Star;
    if (have_role) {
      // descend into the current role's declared type
      if (seg.sep != RolePath::Sep::Dot)
        fail("'*' cannot follow a resolved role");
      if (cur.declared_kind != TypeKind::Schema &&
          cur.declared_kind != TypeKind::Context)
        fail("role '" + cur.role_name + "' has an atomic type");
      cur_type = cur.declared_type;
      hop_prefix.clear();
      hop_type = cur_type;
      have_role = false;
    }
    const std::string& name = seg.name;
    const std::string scope_type = hop_prefix.empty() ? cur_type : hop_type;
    const TypeNode& sn = node(scope_type);
    bool is_parent =
        sn.def && std::find(sn.def->inherits.begin(), sn.def->inherits.end(),
                            name) != sn.def->inherits.end();
    if (is_parent && next_is_star) {
      // inheritance hop
      hop_prefix = hop_prefix.empty() ? name : hop_prefix + "*" + name;
      hop_type = name;
      continue;
    }
    // role lookup in scope_type
    std::string key = hop_prefix.empty() ? name : hop_prefix + "*" + name;
    const auto& tab = table(cur_type);
    auto it = tab.find(key);
    if (it != tab.end()) {
      cur = it->second;
      have_role = true;
      continue;
    }
    // bare inherited role: unique-path convenience lookup
    if (hop_prefix.empty() && seg.sep != RolePath::Sep::Star) {
      std::vector<const RoleDescriptor*> hits;
      for (const auto& [slot, d] : tab)
        if (d.role_name == name) hits.push_back(&d);
      if (hits.size() == 1) {
        cur = *hits[0];
        have_role = true;
        continue;
      }
      if (hits.size() > 1)
        throw RuntimeError("AmbiguousRole",
                           "role '" + name + "' is reachable through " +
                               std::to_string(hits.size()) +
                               " inheritance paths from '" + cur_type + "'");
    }
    fail("no role or parent '" + name + "' in '" + scope_type + "'");
  }
  if (!have_role) fail("path ends inside an inheritance hop");
  return cur;
}

std::vector<ConstraintExpr> TypeHierarchy::effective_constraints(
    const std::string& type) const {
  const TypeNode& n = node(type);
  std::vector<ConstraintExpr> out;
  if (!n.def) return out;
  for (const auto& p : n.def->inherits) {
    for (ConstraintExpr c : effective_constraints(p)) {
      rebase_constraint(c, p);
      out.push_back(std::move(c));
    }
  }
  for (const auto& c : n.def->constraints) out.push_back(c);
  return out;
}

std::vector<std::string> TypeHierarchy::effective_places(
    const std::string& type) const {
  const TypeNode& n = node(type);
  std::vector<std::string> out;
  if (!n.def) return out;
  for (const auto& p : n.def->inherits)
    for (const auto& pk : effective_places(p))
      if (std::find(out.begin(), out.end(), pk) == out.end())
        out.push_back(pk);
  for (const auto& pk : n.def->places)
    if (std::find(out.begin(), out.end(), pk) == out.end()) out.push_back(pk);
  return out;
}

namespace {
std::string sig_key(const RelationSig& s) {
  std::string k = s.name + "(";
  for (const auto& p : s.param_places) k += p + ",";
  return k + ")->" + s.result;
}
}  // namespace

std::vector<RelationSig> TypeHierarchy::effective_relations(
    const std::string& type) const {
  const TypeNode& n = node(type);
  std::vector<RelationSig> out;
  std::set<std::string> seen;
  if (!n.def) return out;
  for (const auto& p : n.def->inherits)
    for (const auto& r : effective_relations(p))
      if (seen.insert(sig_key(r)).second) out.push_back(r);
  for (const auto& r : n.def->relations)
    if (seen.insert(sig_key(r)).second) out.push_back(r);
  return out;
}

std::vector<RelationSig> TypeHierarchy::effective_operations(
    const std::string& type) const {
  const TypeNode& n = node(type);
  std::vector<RelationSig> out;
  std::set<std::string> seen;
  if (!n.def) return out;
  for (const auto& p : n.def->inherits)
    for (const auto& r : effective_operations(p))
      if (seen.insert(sig_key(r)).second) out.push_back(r);
  for (const auto& r : n.def->operations)
    if (seen.insert(sig_key(r)).second) out.push_back(r);
  return out;
}

bool TypeHierarchy::enum_has(const std::string& enum_name,
                             const std::string& member) const {
  auto it = enum_members_.find(enum_name);
  return it != enum_members_.end() && it->second.count(member) > 0;
}

}  // namespace scim
