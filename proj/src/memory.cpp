#include <algorithm>

#include "scim/memory.hpp"
#include "scim/registry.hpp"

namespace scim {

bool filler_equal(const Filler& a, const Filler& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<Unbound>(a)) return true;
  if (std::holds_alternative<Atom>(a))
    return atoms_equal(std::get<Atom>(a), std::get<Atom>(b));
  return std::get<InstanceRef>(a) == std::get<InstanceRef>(b);
}

std::string filler_to_string(const Filler& f) {
  if (std::holds_alternative<Unbound>(f)) return "<unbound>";
  if (const auto* a = std::get_if<Atom>(&f)) return atom_to_string(*a);
  return "#" + std::to_string(std::get<InstanceRef>(f).id);
}

BranchState::BranchState(const TypeHierarchy* hierarchy, int branch_id)
    : hierarchy_(hierarchy), branch_id_(branch_id) {}

const Instance& BranchState::instance(std::uint32_t id) const {
  auto it = instances_.find(id);
  if (it == instances_.end())
    throw RuntimeError("UnknownInstance",
                       "no instance #" + std::to_string(id));
  return it->second;
}

void BranchState::check_parent_acyclic(
    const std::vector<std::uint32_t>& parents, std::uint32_t self) const {
  for (auto p : parents) {
    if (p == self)
      throw RuntimeError("CyclicDerivation",
                         "instance cannot be its own parent");
    if (!instances_.count(p))
      throw RuntimeError("UnknownInstance",
                         "parent #" + std::to_string(p) + " does not exist");
  }
}

void BranchState::check_filler_type(const std::string& type,
                                    const std::string& slot,
                                    const Filler& value) const {
  const RoleDescriptor desc = hierarchy_->resolve_slot(type, slot);
  if (std::holds_alternative<Unbound>(value)) return;

  if (const auto* ref = std::get_if<InstanceRef>(&value)) {
    if (desc.declared_kind != TypeKind::Schema &&
        desc.declared_kind != TypeKind::Context)
      throw RuntimeError("TypeMismatch", "role '" + slot + "' of " + type +
                                             " holds an atomic value, not an "
                                             "instance");
    const Instance& target = instance(ref->id);
    if (!hierarchy_->is_subtype(target.type, desc.declared_type))
      throw RuntimeError("TypeMismatch",
                         "role '" + slot + "' of " + type + " expects " +
                             desc.declared_type + ", got " + target.type);
    return;
  }

  const Atom& a = std::get<Atom>(value);
  if (desc.declared_kind == TypeKind::Enum) {
    const auto* sym = std::get_if<Sym>(&a);
    if (!sym || !hierarchy_->enum_has(desc.declared_type, sym->name))
      throw RuntimeError("TypeMismatch",
                         "role '" + slot + "' of " + type + " expects a " +
                             desc.declared_type + " member, got " +
                             atom_to_string(a));
    return;
  }
  if (desc.declared_kind != TypeKind::Atomic)
    throw RuntimeError("TypeMismatch", "role '" + slot + "' of " + type +
                                           " holds an instance, not " +
                                           atom_to_string(a));
  bool ok = false;
  if (desc.declared_type == "Integer")
    ok = std::holds_alternative<long long>(a);
  else if (desc.declared_type == "Float")
    ok = std::holds_alternative<long long>(a) ||
         std::holds_alternative<double>(a);
  else if (desc.declared_type == "Boolean")
    ok = std::holds_alternative<bool>(a);
  else if (desc.declared_type == "String")
    ok = std::holds_alternative<std::string>(a);
  if (!ok)
    throw RuntimeError("TypeMismatch", "role '" + slot + "' of " + type +
                                           " expects " + desc.declared_type +
                                           ", got " + atom_to_string(a));
}

std::uint32_t BranchState::create_instance(
    const std::string& type, const std::map<std::string, Filler>& fillers,
    const std::vector<std::uint32_t>& parents, std::optional<double> capacity,
    std::optional<double> trust) {
  TypeKind kind = hierarchy_->kind_of(type);
  if (kind != TypeKind::Schema && kind != TypeKind::Context)
    throw RuntimeError("NotInstantiable",
                       "'" + type + "' is not a schema or context type");
  double cap = capacity.value_or(1.0);
  double tr = trust.value_or(1.0);
  if (cap <= 0)
    throw RuntimeError("InvalidCapacity", "capacity must be positive");
  if (tr <= 0 || tr > 1.0)
    throw RuntimeError("InvalidTrust", "trust must be in (0, 1]");

  std::uint32_t id = next_id_++;
  check_parent_acyclic(parents, id);

  Instance inst;
  inst.id = id;
  inst.type = type;
  inst.capacity = cap;
  inst.trust = tr;
  inst.parents = parents;
  for (const auto& [slot, desc] : hierarchy_->effective_roles(type))
    inst.fillers[slot] = Unbound{};

  // Constant filler constraints of the type act as defaults.
  for (const auto& c : hierarchy_->effective_constraints(type)) {
    if (c.form != ConstraintExpr::Form::Filler) continue;
    if (!c.args[0].is_path || c.args[0].path.muted || c.args[0].path.self)
      continue;
    bool local = true;
    for (const auto& seg : c.args[0].path.segs)
      if (seg.sep == RolePath::Sep::Dot) local = false;
    if (!local) continue;
    bool constant = true;
    std::vector<Atom> fn_args;
    for (size_t i = 1; i < c.args.size(); i++) {
      if (c.args[i].is_path) {
        constant = false;
        break;
      }
      fn_args.push_back(c.args[i].atom);
    }
    if (!constant) continue;
    Atom value = c.name.empty() ? fn_args[0]
                                : eval_atomic_function(c.name, fn_args);
    std::string slot =
        hierarchy_->resolve_role_path(type, c.args[0].path).slot;
    inst.fillers[slot] = value;
  }

  for (const auto& [slot, value] : fillers) {
    if (!inst.fillers.count(slot))
      throw RuntimeError("UnknownRole",
                         "type " + type + " has no role '" + slot + "'");
    inst.fillers[slot] = value;
  }
  for (const auto& [slot, value] : inst.fillers)
    check_filler_type(type, slot, value);

  inst.created_at = tick();
  CreationRecord rec{inst.created_at, id, type, inst.fillers, parents, cap,
                     tr};
  creation_log_.push_back(std::move(rec));
  instances_.emplace(id, std::move(inst));
  return id;
}

void BranchState::situate(std::uint32_t inst, std::uint32_t ctx,
                          const Place& place) {
  const Instance& i = instance(inst);
  const Instance& c = instance(ctx);
  if (hierarchy_->kind_of(c.type) != TypeKind::Context)
    throw RuntimeError("NotAContext",
                       "#" + std::to_string(ctx) + " is not a context");
  auto kinds = hierarchy_->effective_places(c.type);
  if (std::find(kinds.begin(), kinds.end(), place.kind()) == kinds.end())
    throw RuntimeError("PlaceKindMismatch",
                       "context " + c.type + " has no place kind '" +
                           place.kind() + "'");
  (void)i;
  for (const auto& e : situations_[ctx])
    if (e.instance == inst && e.present)
      throw RuntimeError("AlreadySituatedHere",
                         "#" + std::to_string(inst) +
                             " is already present in #" + std::to_string(ctx));
  SituationEntry e;
  e.instance = inst;
  e.place = place;
  e.present = true;
  e.placed_at = tick();
  situations_[ctx].push_back(std::move(e));
}

void BranchState::remove_situated(std::uint32_t inst, std::uint32_t ctx) {
  auto it = situations_.find(ctx);
  if (it != situations_.end()) {
    for (auto& e : it->second) {
      if (e.instance == inst && e.present) {
        e.present = false;
        e.removed_at = tick();
        return;
      }
    }
  }
  throw RuntimeError("NotSituated", "#" + std::to_string(inst) +
                                        " is not present in #" +
                                        std::to_string(ctx));
}

bool BranchState::is_present(std::uint32_t inst, std::uint32_t ctx) const {
  auto it = situations_.find(ctx);
  if (it == situations_.end()) return false;
  for (const auto& e : it->second)
    if (e.instance == inst && e.present) return true;
  return false;
}

std::optional<Place> BranchState::place_of(std::uint32_t inst,
                                           std::uint32_t ctx) const {
  auto it = situations_.find(ctx);
  if (it == situations_.end()) return std::nullopt;
  for (const auto& e : it->second)
    if (e.instance == inst && e.present) return e.place;
  return std::nullopt;
}

std::vector<const SituationEntry*> BranchState::present_in(
    std::uint32_t ctx) const {
  std::vector<const SituationEntry*> out;
  auto it = situations_.find(ctx);
  if (it == situations_.end()) return out;
  for (const auto& e : it->second)
    if (e.present) out.push_back(&e);
  std::sort(out.begin(), out.end(),
            [](const SituationEntry* a, const SituationEntry* b) {
              return a->instance < b->instance;
            });
  return out;
}

bool BranchState::removed_everywhere(std::uint32_t inst) const {
  bool seen = false;
  for (const auto& [ctx, entries] : situations_) {
    for (const auto& e : entries) {
      if (e.instance != inst) continue;
      if (e.present) return false;
      seen = true;
    }
  }
  return seen;
}

void BranchState::mutate_role(std::uint32_t inst, const std::string& slot,
                              const Filler& value) {
  Instance& i = instances_.at(instance(inst).id);
  auto it = i.fillers.find(slot);
  if (it == i.fillers.end())
    throw RuntimeError("UnknownRole",
                       "type " + i.type + " has no role '" + slot + "'");
  const RoleDescriptor desc = hierarchy_->resolve_slot(i.type, slot);
  if (!desc.mutable_flag && !std::holds_alternative<Unbound>(it->second))
    throw RuntimeError("ImmutableRole", "role '" + slot + "' of " + i.type +
                                            " is not mutable");
  check_filler_type(i.type, slot, value);
  mutation_log_.push_back({tick(), inst, slot, it->second, value});
  it->second = value;
}

void BranchState::specify_role(std::uint32_t inst, const std::string& slot,
                               const Filler& value) {
  Instance& i = instances_.at(instance(inst).id);
  auto it = i.fillers.find(slot);
  if (it == i.fillers.end())
    throw RuntimeError("UnknownRole",
                       "type " + i.type + " has no role '" + slot + "'");
  if (!std::holds_alternative<Unbound>(it->second))
    throw RuntimeError("RoleAlreadyBound",
                       "role '" + slot + "' of #" + std::to_string(inst) +
                           " already has a value");
  check_filler_type(i.type, slot, value);
  mutation_log_.push_back({tick(), inst, slot, it->second, value});
  it->second = value;
}

Filler BranchState::read_slot(std::uint32_t inst,
                              const std::string& slot) const {
  const Instance& i = instance(inst);
  auto it = i.fillers.find(slot);
  if (it == i.fillers.end())
    throw RuntimeError("UnknownRole",
                       "type " + i.type + " has no role '" + slot + "'");
  return it->second;
}

namespace {

bool sig_matches(const RelationSig& sig, const std::string& name,
                 const std::vector<Place>& places) {
  if (sig.name != name || sig.param_places.size() != places.size())
    return false;
  for (size_t i = 0; i < places.size(); i++)
    if (sig.param_places[i] != places[i].kind()) return false;
  return true;
}

}  // namespace

RelationValue BranchState::eval_relation(
    const std::string& ctx_type, const std::string& name,
    const std::vector<Place>& places) const {
  for (const auto& sig : hierarchy_->effective_relations(ctx_type))
    if (sig_matches(sig, name, places))
      return eval_native_relation(name, places);
  throw RuntimeError("UnknownRelation",
                     "context " + ctx_type + " declares no relation '" +
                         name + "' for the given place kinds");
}

Place BranchState::eval_operation(const std::string& ctx_type,
                                  const std::string& name,
                                  const std::vector<Place>& places) const {
  for (const auto& sig : hierarchy_->effective_operations(ctx_type))
    if (sig_matches(sig, name, places))
      return eval_native_operation(name, places);
  throw RuntimeError("UnknownOperation",
                     "context " + ctx_type + " declares no operation '" +
                         name + "' for the given place kinds");
}

BranchState BranchState::fork(int child_id) const {
  BranchState child = *this;
  child.branch_id_ = child_id;
  child.parent_branch_ = branch_id_;
  return child;
}

std::uint64_t BranchState::last_mutation_clock(std::uint32_t inst) const {
  std::uint64_t last = instance(inst).created_at;
  for (const auto& m : mutation_log_)
    if (m.instance == inst) last = std::max(last, m.clock);
  return last;
}

Json place_to_json(const Place& p) {
  Json j;
  j["kind"] = p.kind();
  struct V {
    Json& j;
    void operator()(const PointP& v) const {
      j["x"] = v.x;
      if (v.has_y) j["y"] = v.y;
    }
    void operator()(const SegmentP& v) const {
      j["start"] = v.start;
      j["end"] = v.end;
    }
    void operator()(const MultiSegmentP& v) const {
      Json parts = Json::array();
      for (const auto& s : v.parts)
        parts.push_back(Json{{"start", s.start}, {"end", s.end}});
      j["parts"] = std::move(parts);
    }
    void operator()(const LineP& v) const {
      j["x1"] = v.x1;
      j["y1"] = v.y1;
      j["x2"] = v.x2;
      j["y2"] = v.y2;
    }
    void operator()(const BoxP& v) const {
      j["x1"] = v.x1;
      j["y1"] = v.y1;
      j["x2"] = v.x2;
      j["y2"] = v.y2;
    }
    void operator()(const DiscP& v) const {
      j["cx"] = v.cx;
      j["cy"] = v.cy;
      j["radius"] = v.radius;
    }
  };
  std::visit(V{j}, p.value);
  return j;
}

Json filler_to_json(const Filler& f) {
  if (std::holds_alternative<Unbound>(f)) return nullptr;
  if (const auto* ref = std::get_if<InstanceRef>(&f))
    return Json{{"ref", ref->id}};
  const Atom& a = std::get<Atom>(f);
  struct V {
    Json operator()(long long v) const { return v; }
    Json operator()(double v) const { return v; }
    Json operator()(bool v) const { return v; }
    Json operator()(const std::string& v) const { return v; }
    Json operator()(const Sym& v) const { return Json{{"sym", v.name}}; }
  };
  return std::visit(V{}, a);
}

Json BranchState::dump(bool include_dead) const {
  Json j;
  j["branch"] = branch_id_;
  if (parent_branch_)
    j["parent"] = *parent_branch_;
  else
    j["parent"] = nullptr;
  j["clock"] = clock_;
  j["score"] = score_;

  Json insts = Json::array();
  for (const auto& [id, inst] : instances_) {
    Json ji;
    ji["id"] = id;
    ji["type"] = inst.type;
    ji["capacity"] = inst.capacity;
    ji["trust"] = inst.trust;
    ji["parents"] = inst.parents;
    ji["created-at"] = inst.created_at;
    Json fills;
    for (const auto& [slot, f] : inst.fillers)
      fills[slot] = filler_to_json(f);
    ji["fillers"] = std::move(fills);
    insts.push_back(std::move(ji));
  }
  j["instances"] = std::move(insts);

  Json sits = Json::array();
  for (const auto& [ctx, entries] : situations_) {
    for (const auto& e : entries) {
      Json je;
      je["context"] = ctx;
      je["instance"] = e.instance;
      je["place"] = place_to_json(e.place);
      je["present"] = e.present;
      je["placed-at"] = e.placed_at;
      if (e.removed_at)
        je["removed-at"] = *e.removed_at;
      else
        je["removed-at"] = nullptr;
      sits.push_back(std::move(je));
    }
  }
  j["situations"] = std::move(sits);

  Json firings = Json::array();
  for (const auto& f : firing_log_) {
    Json jf;
    jf["construction"] = f.construction;
    jf["clock"] = f.clock;
    Json binding;
    for (const auto& [label, id] : f.binding) binding[label] = id;
    jf["binding"] = std::move(binding);
    jf["created"] = f.created;
    firings.push_back(std::move(jf));
  }
  j["firings"] = std::move(firings);

  Json muts = Json::array();
  for (const auto& m : mutation_log_) {
    Json jm;
    jm["clock"] = m.clock;
    jm["instance"] = m.instance;
    jm["slot"] = m.slot;
    jm["old"] = filler_to_json(m.old_value);
    jm["new"] = filler_to_json(m.new_value);
    muts.push_back(std::move(jm));
  }
  j["mutations"] = std::move(muts);

  if (include_dead) {
    Json dead = Json::array();
    for (const auto& d : dead_decisions_) {
      Json jd;
      jd["clock"] = d.clock;
      jd["construction"] = d.construction;
      Json binding;
      for (const auto& [label, id] : d.binding) binding[label] = id;
      jd["binding"] = std::move(binding);
      jd["reason"] = d.reason;
      dead.push_back(std::move(jd));
    }
    j["dead-decisions"] = std::move(dead);
  }
  return j;
}

BranchState BranchState::replay() const {
  BranchState out(hierarchy_, branch_id_);
  out.parent_branch_ = parent_branch_;
  out.clock_ = clock_;
  out.next_id_ = next_id_;
  out.score_ = score_;
  out.situations_ = situations_;
  out.creation_log_ = creation_log_;
  out.mutation_log_ = mutation_log_;
  out.firing_log_ = firing_log_;
  out.dead_decisions_ = dead_decisions_;
  out.refractory_ = refractory_;

  for (const auto& rec : creation_log_) {
    Instance inst;
    inst.id = rec.instance;
    inst.type = rec.type;
    inst.fillers = rec.fillers;
    inst.capacity = rec.capacity;
    inst.trust = rec.trust;
    inst.parents = rec.parents;
    inst.created_at = rec.clock;
    out.instances_.emplace(inst.id, std::move(inst));
  }
  for (const auto& m : mutation_log_) {
    auto it = out.instances_.find(m.instance);
    if (it == out.instances_.end())
      throw RuntimeError("ReplayMismatch",
                         "mutation log names unknown instance #" +
                             std::to_string(m.instance));
    it->second.fillers[m.slot] = m.new_value;
  }
  return out;
}

}  // namespace scim
