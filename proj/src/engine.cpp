#include <algorithm>
#include <functional>
#include <set>

#include "scim/engine.hpp"
#include "scim/registry.hpp"

namespace scim {

namespace {

// Root labels a constraint reads, for incremental pruning during binding.
void collect_labels(const ConstraintExpr& c, std::set<std::string>& out) {
  for (const auto& a : c.args)
    if (a.is_path && !a.path.segs.empty()) out.insert(a.path.segs[0].name);
  std::function<void(const PlaceExpr&)> walk_pe = [&](const PlaceExpr& pe) {
    out.insert(pe.label);
    for (const auto& x : pe.args) walk_pe(x);
  };
  for (const auto& pe : c.places) walk_pe(pe);
  for (const auto& ch : c.children) collect_labels(ch, out);
}

bool pre_ok(Verdict v, const ConstraintExpr& c) {
  if (c.form == ConstraintExpr::Form::Identification)
    return v != Verdict::Violated;
  return v == Verdict::Satisfied;
}

// Firing failures roll the attempt back; these error codes mean "this
// candidate cannot fire", not "the program is broken".
bool is_firing_failure(const RuntimeError& e) {
  const std::string& c = e.code();
  return c == "TypeMismatch" || c == "NotSituated" ||
         c == "RoleAlreadyBound" || c == "PlaceKindMismatch" ||
         c == "ImmutableRole" || c == "AlreadySituatedHere" ||
         c == "EmptyResult";
}

}  // namespace

std::vector<std::uint32_t> sorted_binding_ids(const Binding& b) {
  std::vector<std::uint32_t> ids;
  for (const auto& [label, id] : b) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Engine::Engine(std::shared_ptr<const CompiledProgram> program)
    : program_(std::move(program)) {
  std::vector<std::string> names;
  for (const auto& [name, node] : program_->hierarchy.nodes())
    if (node.kind == TypeKind::SConstruction) names.push_back(name);
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    CompiledSC c;
    c.sc = effective_sconstruction(program_->hierarchy, name);
    for (const auto& con : c.sc.constituents)
      (con.dir == Direction::Out ? c.outputs : c.inputs).push_back(con);
    for (const auto& cn : c.sc.constraints)
      (is_post_phase(c.sc, cn) ? c.post : c.pre).push_back(cn);
    compiled_.push_back(std::move(c));
  }
}

const CompiledSC& Engine::construction(const std::string& name) const {
  for (const auto& c : compiled_)
    if (c.sc.name == name) return c;
  throw RuntimeError("UnknownType",
                     "no s-construction '" + name + "' is compiled");
}

bool Engine::constructional_holds(const BranchState& st, const CompiledSC& c,
                                  const Binding& b) const {
  if (c.sc.constructional.empty()) return true;
  // derivation closure of the bound inputs
  std::set<std::uint32_t> closure;
  std::vector<std::uint32_t> work;
  for (const auto& [label, id] : b) work.push_back(id);
  while (!work.empty()) {
    std::uint32_t id = work.back();
    work.pop_back();
    if (!closure.insert(id).second) continue;
    for (auto p : st.instance(id).parents) work.push_back(p);
  }
  const TypeHierarchy& h = program_->hierarchy;
  for (const auto& cd : c.sc.constructional) {
    bool found = false;
    for (const auto& f : st.firing_log()) {
      if (!h.is_subtype(f.construction, cd.type_name)) continue;
      for (auto id : f.created)
        if (closure.count(id)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (cd.negative ? found : !found) return false;
  }
  return true;
}

bool Engine::is_admissible(const BranchState& st, const CompiledSC& c,
                           const Binding& b) const {
  EvalContext cx{&st, &c.sc, &b};
  for (const auto& cn : c.pre)
    if (!pre_ok(evaluate(cx, cn), cn)) return false;
  return constructional_holds(st, c, b);
}

bool Engine::refractory_blocks(const BranchState& st, const CompiledSC& c,
                               const Binding& b) const {
  std::vector<std::uint32_t> ids = sorted_binding_ids(b);
  for (const auto& e : st.refractory()) {
    if (e.construction != c.sc.name || e.inputs != ids) continue;
    bool rearmed = false;
    for (auto id : ids)
      if (st.last_mutation_clock(id) > e.clock) rearmed = true;
    if (!rearmed) return true;
  }
  return false;
}

void Engine::enumerate_for(const BranchState& st, const CompiledSC& c,
                           std::vector<Match>& out) const {
  const TypeHierarchy& h = program_->hierarchy;
  const auto& labels = c.inputs;
  if (labels.empty()) return;

  // constraints indexed by the labels they touch, for early pruning
  struct PreEntry {
    const ConstraintExpr* cn;
    std::set<std::string> labels;
  };
  std::vector<PreEntry> pres;
  for (const auto& cn : c.pre) {
    PreEntry e{&cn, {}};
    collect_labels(cn, e.labels);
    pres.push_back(std::move(e));
  }

  Binding b;
  std::function<void(size_t)> step = [&](size_t k) {
    if (k == labels.size()) {
      if (!constructional_holds(st, c, b)) return;
      if (refractory_blocks(st, c, b)) return;
      out.push_back({c.sc.name, b});
      return;
    }
    const ConstituentDecl& con = labels[k];
    for (const auto& [id, inst] : st.instances()) {
      if (!h.is_subtype(inst.type, con.type_name)) continue;
      bool taken = false;
      for (const auto& [l, bid] : b)
        if (bid == id) taken = true;
      if (taken) continue;
      if (con.context_label) {
        auto it = b.find(*con.context_label);
        if (it == b.end() || !st.is_present(id, it->second)) continue;
      }
      b[con.label] = id;
      bool viable = true;
      EvalContext cx{&st, &c.sc, &b};
      for (const auto& e : pres) {
        bool all_bound = true;
        for (const auto& l : e.labels)
          if (!b.count(l)) all_bound = false;
        if (!all_bound) continue;
        if (!pre_ok(evaluate(cx, *e.cn), *e.cn)) {
          viable = false;
          break;
        }
      }
      if (viable) step(k + 1);
      b.erase(con.label);
    }
  };
  step(0);
}

std::vector<Match> Engine::enumerate_matches(const BranchState& st) const {
  std::vector<Match> out;
  for (const auto& c : compiled_) enumerate_for(st, c, out);
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    if (a.construction != b.construction)
      return a.construction < b.construction;
    return sorted_binding_ids(a.binding) < sorted_binding_ids(b.binding);
  });
  return out;
}

std::optional<BranchState> Engine::fire(const BranchState& st, const Match& m,
                                        std::string* fail_reason) const {
  const CompiledSC& c = construction(m.construction);
  auto fail = [&](const std::string& why) -> std::optional<BranchState> {
    if (fail_reason) *fail_reason = why;
    return std::nullopt;
  };
  try {
    BranchState scratch = st;
    std::uint64_t fclock = scratch.tick();
    Binding b = m.binding;

    // 1. create output constituents
    std::vector<std::uint32_t> created;
    std::vector<std::uint32_t> parent_ids;
    double cap_sum = 0, trust_min = 1.0;
    for (const auto& con : c.inputs) {
      std::uint32_t id = b.at(con.label);
      const Instance& inst = scratch.instance(id);
      if (scratch.hierarchy().kind_of(inst.type) == TypeKind::Context)
        continue;  // contexts carry structure, not evidence
      parent_ids.push_back(id);
      cap_sum += inst.capacity;
      trust_min = std::min(trust_min, inst.trust);
    }
    for (const auto& con : c.outputs) {
      double cap = parent_ids.empty() ? 1.0 : cap_sum;
      double trust = trust_min * c.sc.confidence;
      std::uint32_t id =
          scratch.create_instance(con.type_name, {}, parent_ids, cap, trust);
      b[con.label] = id;
      created.push_back(id);
    }

    EvalContext cx{&scratch, &c.sc, &b};
    std::vector<std::string> outs;
    std::vector<std::pair<std::string, const PlaceExpr*>> placements;
    std::set<std::uint32_t> touched(created.begin(), created.end());

    auto write_target = [&](const PathTarget& t, const Filler& v,
                            bool muted) {
      if (!t.located || t.whole_instance) return;
      Filler cur = scratch.read_slot(t.inst, t.slot);
      if (std::holds_alternative<Unbound>(cur))
        scratch.specify_role(t.inst, t.slot, v);
      else if (muted)
        scratch.mutate_role(t.inst, t.slot, v);
      else
        return;  // bound, not muted: leave for the post check
      touched.insert(t.inst);
    };

    // 2. apply constraint effects in declaration order
    for (const auto& cn : c.sc.constraints) {
      switch (cn.form) {
        case ConstraintExpr::Form::Filler: {
          PathTarget lhs = locate_path(cx, cn.args[0].path);
          std::vector<Atom> fn_args;
          for (size_t i = 1; i < cn.args.size(); i++)
            fn_args.push_back(cn.args[i].atom);
          Atom rhs = cn.name.empty() ? fn_args[0]
                                     : eval_atomic_function(cn.name, fn_args);
          write_target(lhs, rhs, cn.args[0].path.muted);
          break;
        }
        case ConstraintExpr::Form::Identification:
        case ConstraintExpr::Form::Equality: {
          PathTarget lhs = locate_path(cx, cn.args[0].path);
          PathTarget rhs = locate_path(cx, cn.args[1].path);
          Filler lv = target_value(scratch, lhs);
          Filler rv = target_value(scratch, rhs);
          bool l_unbound = std::holds_alternative<Unbound>(lv);
          bool r_unbound = std::holds_alternative<Unbound>(rv);
          bool transform =
              cn.form == ConstraintExpr::Form::Identification &&
              !cn.name.empty();
          if (!r_unbound && (l_unbound || cn.args[0].path.muted)) {
            Filler v = rv;
            if (transform) {
              const auto* a = std::get_if<Atom>(&rv);
              if (!a)
                throw RuntimeError("TypeMismatch",
                                   "C-function over an instance value");
              v = eval_transform(cn.name, *a);
            }
            write_target(lhs, v, cn.args[0].path.muted);
          } else if (!l_unbound && r_unbound && !transform) {
            write_target(rhs, lv, cn.args[1].path.muted);
          } else if (!l_unbound && !r_unbound && !transform &&
                     cn.form == ConstraintExpr::Form::Identification &&
                     std::holds_alternative<InstanceRef>(lv) &&
                     std::holds_alternative<InstanceRef>(rv)) {
            if (!unify_fillers(scratch, lv, rv))
              return fail("identification failed to unify: " +
                          cn.to_string());
          }
          break;
        }
        case ConstraintExpr::Form::Out:
          outs.push_back(cn.args[0].path.segs[0].name);
          break;
        case ConstraintExpr::Form::Placement:
          placements.emplace_back(cn.args[0].path.segs[0].name,
                                  &cn.places[0]);
          break;
        default:
          break;
      }
    }

    // 3. compute target places before any OUT removes its antecedents
    std::vector<std::pair<std::string, Place>> to_situate;
    std::set<std::string> placed;
    for (const auto& [label, pe] : placements) {
      auto p = eval_place_expr(cx, *pe);
      if (!p) return fail("placement of '" + label + "' has no result");
      to_situate.emplace_back(label, *p);
      placed.insert(label);
    }
    for (const auto& con : c.outputs) {
      if (!con.context_label || placed.count(con.label)) continue;
      // default placement: the firing clock as a point, when the context
      // carries points
      std::uint32_t ctx = b.at(*con.context_label);
      auto kinds = scratch.hierarchy().effective_places(
          scratch.instance(ctx).type);
      if (std::find(kinds.begin(), kinds.end(), "point") == kinds.end())
        return fail("output '" + con.label +
                    "' has no placement and its context has no points");
      to_situate.emplace_back(con.label, Place::point(double(fclock)));
    }

    // 4. consume OUT inputs
    for (const auto& label : outs) {
      const ConstituentDecl* con = nullptr;
      for (const auto& x : c.inputs)
        if (x.label == label) con = &x;
      if (!con || !con->context_label)
        return fail("OUT(" + label + ") has no situating context");
      scratch.remove_situated(b.at(label), b.at(*con->context_label));
    }

    // 5. situate outputs
    for (const auto& [label, place] : to_situate) {
      const ConstituentDecl* con = nullptr;
      for (const auto& x : c.sc.constituents)
        if (x.label == label) con = &x;
      if (!con || !con->context_label)
        return fail("placed constituent '" + label + "' has no context");
      scratch.situate(b.at(label), b.at(*con->context_label), place);
    }

    // 6. post check. Only post-phase constraints are re-evaluated: a
    // non-muted path denotes the pre-firing value, and those tests were
    // settled during matching.
    for (const auto& cn : c.post) {
      if (evaluate(cx, cn) == Verdict::Violated)
        return fail("post constraint violated: " + cn.to_string());
    }
    for (auto id : touched)
      if (validate_instance(scratch, id) == Verdict::Violated)
        return fail("type constraints of #" + std::to_string(id) +
                    " violated");

    scratch.firing_log().push_back({c.sc.name, b, fclock, created});
    scratch.refractory().push_back(
        {c.sc.name, sorted_binding_ids(m.binding), fclock});
    return scratch;
  } catch (const RuntimeError& e) {
    if (is_firing_failure(e)) return fail(e.what());
    throw;
  }
}

double Engine::compute_score(const BranchState& st) const {
  double sum = 0;
  std::set<std::uint32_t> counted;
  for (const auto& f : st.firing_log()) {
    for (auto id : f.created) {
      if (!counted.insert(id).second) continue;
      if (st.removed_everywhere(id)) continue;
      const Instance& i = st.instance(id);
      sum += i.trust * i.capacity;
    }
  }
  return sum - 0.01 * double(st.firing_log().size());
}

RunResult Engine::run(const BranchState& initial,
                      const EngineConfig& cfg) const {
  RunResult result;
  result.trace = Json::array();
  const TypeHierarchy& h = program_->hierarchy;

  auto halted = [&](const BranchState& st) {
    if (cfg.halt_on_type.empty()) return false;
    for (const auto& f : st.firing_log())
      for (auto id : f.created)
        if (h.is_subtype(st.instance(id).type, cfg.halt_on_type) &&
            !st.removed_everywhere(id))
          return true;
    return false;
  };

  std::vector<BranchState> active{initial};
  int next_branch = initial.branch_id() + 1;

  while (!active.empty()) {
    if (result.total_firings >= cfg.max_firings) {
      result.hit_firing_cap = true;
      for (auto& b : active) result.terminals.push_back(std::move(b));
      break;
    }
    Json round = Json::object();
    Json jbranches = Json::array();
    std::vector<BranchState> next;
    for (auto& branch : active) {
      std::vector<Match> matches = enumerate_matches(branch);
      Json jb;
      jb["branch"] = branch.branch_id();
      jb["matches"] = Json::array();
      if (matches.empty()) {
        branch.set_score(compute_score(branch));
        jb["quiescent"] = true;
        jbranches.push_back(std::move(jb));
        result.terminals.push_back(std::move(branch));
        continue;
      }
      // First decide which candidates can actually fire; failures leave a
      // dead decision and a refractory entry on the branch so every child
      // inherits them.
      std::vector<const Match*> live;
      for (const auto& m : matches) {
        std::string why;
        if (fire(branch, m, &why)) {
          live.push_back(&m);
        } else {
          // no tick: apart from the dead-decision and refractory entries
          // themselves, a failed candidate must leave no trace
          std::uint64_t clk = branch.clock();
          branch.dead_decisions().push_back(
              {clk, m.construction, m.binding, why});
          branch.refractory().push_back(
              {m.construction, sorted_binding_ids(m.binding), clk});
        }
      }
      for (const auto* m : live) {
        Json jm;
        jm["construction"] = m->construction;
        for (const auto& [l, id] : m->binding) jm["binding"][l] = id;
        if (result.total_firings >= cfg.max_firings) break;
        BranchState base = branch.fork(next_branch++);
        auto child = fire(base, *m);
        if (!child) continue;  // cannot happen: same state as the trial
        result.total_firings++;
        child->set_score(compute_score(*child));
        jm["child"] = child->branch_id();
        jm["score"] = child->score();
        jb["matches"].push_back(std::move(jm));
        if (halted(*child))
          result.terminals.push_back(std::move(*child));
        else
          next.push_back(std::move(*child));
      }
      if (live.empty()) {
        // every candidate died; keep the branch, it will quiesce
        next.push_back(std::move(branch));
      }
      jbranches.push_back(std::move(jb));
    }
    // global beam prune: best scores first, ties to older branches
    std::sort(next.begin(), next.end(),
              [](const BranchState& a, const BranchState& b) {
                if (a.score() != b.score()) return a.score() > b.score();
                return a.branch_id() < b.branch_id();
              });
    if ((int)next.size() > cfg.beam)
      next.erase(next.begin() + cfg.beam, next.end());
    if (cfg.trace) {
      round["branches"] = std::move(jbranches);
      Json kept = Json::array();
      for (const auto& b : next) kept.push_back(b.branch_id());
      round["beam"] = std::move(kept);
      result.trace.push_back(std::move(round));
    }
    active = std::move(next);
  }
  std::sort(result.terminals.begin(), result.terminals.end(),
            [](const BranchState& a, const BranchState& b) {
              if (a.score() != b.score()) return a.score() > b.score();
              return a.branch_id() < b.branch_id();
            });
  return result;
}

}  // namespace scim
