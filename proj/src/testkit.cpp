#include "scim/testkit.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace scim::testkit {

namespace {

bool refractory_blocks_ref(const BranchState& st, const std::string& name,
                           const Binding& b) {
  std::vector<std::uint32_t> ids;
  for (const auto& [label, id] : b) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (const auto& e : st.refractory()) {
    if (e.construction != name || e.inputs != ids) continue;
    bool rearmed = false;
    for (auto id : ids)
      if (st.last_mutation_clock(id) > e.clock) rearmed = true;
    if (!rearmed) return true;
  }
  return false;
}

}  // namespace

std::vector<Match> oracle_matches_for(const Engine& eng,
                                      const BranchState& st,
                                      const CompiledSC& c) {
  const TypeHierarchy& h = eng.program().hierarchy;
  std::vector<std::uint32_t> universe;
  for (const auto& [id, inst] : st.instances()) universe.push_back(id);

  const auto& labels = c.inputs;
  std::vector<Match> out;
  if (labels.empty() || universe.empty()) return out;

  // Odometer over all |universe|^|labels| tuples; every filter is applied
  // only once the tuple is complete.
  std::vector<size_t> idx(labels.size(), 0);
  for (;;) {
    Binding b;
    bool distinct = true;
    for (size_t k = 0; k < labels.size(); ++k) {
      std::uint32_t id = universe[idx[k]];
      for (const auto& [l, prev] : b)
        if (prev == id) distinct = false;
      b[labels[k].label] = id;
    }
    if (distinct) {
      bool typed = true, placed = true;
      for (size_t k = 0; k < labels.size(); ++k) {
        const ConstituentDecl& con = labels[k];
        std::uint32_t id = b[con.label];
        if (!h.is_subtype(st.instance(id).type, con.type_name)) typed = false;
        if (con.context_label) {
          auto it = b.find(*con.context_label);
          if (it == b.end() || !st.is_present(id, it->second)) placed = false;
        }
      }
      if (typed && placed && eng.is_admissible(st, c, b) &&
          !refractory_blocks_ref(st, c.sc.name, b))
        out.push_back({c.sc.name, b});
    }
    size_t k = labels.size();
    while (k > 0) {
      if (++idx[k - 1] < universe.size()) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return out;
}

std::vector<Match> oracle_matches(const Engine& eng, const BranchState& st) {
  std::vector<Match> out;
  for (const auto& c : eng.constructions()) {
    auto ms = oracle_matches_for(eng, st, c);
    out.insert(out.end(), ms.begin(), ms.end());
  }
  return out;
}

CanonicalMatches canonical(const std::vector<Match>& ms) {
  CanonicalMatches out;
  for (const auto& m : ms) {
    std::vector<std::pair<std::string, std::uint32_t>> b(m.binding.begin(),
                                                         m.binding.end());
    out.emplace_back(m.construction, std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Gen {
  std::mt19937 rng;
  int pick(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  }
};

}  // namespace

GeneratedCase generate_case(std::uint32_t seed, GenOptions opts) {
  Gen g{std::mt19937(seed)};
  std::ostringstream src;

  // Schemas: every one carries an Integer test role `a` and a mutable
  // Integer role `m`, so constraints can be generated uniformly.
  int nschemas = g.pick(1, 3);
  std::vector<std::string> schemas;
  for (int i = 0; i < nschemas; ++i) {
    std::string name = "G" + std::to_string(i);
    schemas.push_back(name);
    src << "schema " << name;
    if (i > 0 && g.chance(0.4)) src << " inherits " << schemas[g.pick(0, i - 1)];
    src << "\n  roles\n";
    src << "    a : Integer\n";
    src << "    ?m : Integer\n";
    if (g.chance(0.5)) src << "    s" << i << " : String\n";
    src << "\n";
  }

  int nrules = g.pick(1, 3);
  for (int r = 0; r < nrules; ++r) {
    src << "s-construction R" << r << "\n  constituents\n";
    src << "    mem : SetContext /I\n";
    int nin = g.pick(1, 3);
    bool has_output = g.chance(0.5);
    bool mutate = !has_output || g.chance(0.3);  // guarantee an effect
    for (int i = 0; i < nin; ++i) {
      const char* dir = (i == 0 && mutate) ? "/IO" : "/I";
      src << "    x" << i << " : " << schemas[g.pick(0, nschemas - 1)]
          << " @mem " << dir << "\n";
    }
    std::string out_type;
    if (has_output) {
      out_type = schemas[g.pick(0, nschemas - 1)];
      src << "    y : " << out_type << " @mem /O\n";
    }
    src << "  constraints\n";
    // pre tests
    for (int i = 0; i < nin; ++i) {
      if (g.chance(0.5)) src << "    x" << i << ".a <- " << g.pick(0, 2) << "\n";
      if (i > 0 && g.chance(0.4)) {
        const char* preds[] = {"eq", "neq", "lt", "le"};
        src << "    " << preds[g.pick(0, 3)] << "(x" << i << ".a, x"
            << (i - 1) << ".a)\n";
      }
      if (i > 0 && g.chance(0.2))
        src << "    x" << i << ".a = x" << (i - 1) << ".a\n";
    }
    // effects
    if (has_output) {
      src << "    y.a <- " << g.pick(0, 2) << "\n";
      if (g.chance(0.5)) src << "    y.m <-> x0.a\n";
      if (g.chance(0.3))
        // post-phase check on the created instance; may contradict the
        // filler above and abort the firing (exercises rollback)
        src << "    eq(y.a, " << g.pick(0, 2) << ")\n";
      if (g.chance(0.4)) src << "    OUT(x0)\n";
    }
    if (mutate) src << "    ?x0.m <- " << g.pick(0, 3) << "\n";
    src << "\n";
  }

  if (opts.chain_rule) {
    src << "s-construction chain\n  constituents\n"
        << "    mem : SetContext /I\n"
        << "    x : G0 @mem /I\n"
        << "    y : G0 @mem /O\n"
        << "  constraints\n"
        << "    y.a <- 1\n"
        << "    OUT(x)\n\n";
  }

  ValidateResult vr = compile_source(src.str());
  if (!vr.ok()) {
    std::string msg = "generated grammar failed to compile (seed " +
                      std::to_string(seed) + "):";
    for (const auto& d : vr.diagnostics) msg += "\n  " + format(d);
    throw std::logic_error(msg + "\n" + src.str());
  }
  std::shared_ptr<const CompiledProgram> program = vr.program;

  BranchState st(&program->hierarchy);
  std::uint32_t ctx = st.create_instance("SetContext", {}, {});
  int n = g.pick(1, std::max(1, opts.max_instances));
  for (int i = 0; i < n; ++i) {
    std::map<std::string, Filler> fillers;
    fillers["a"] = Atom{static_cast<long long>(g.pick(0, 2))};
    if (g.chance(0.7))
      fillers["m"] = Atom{static_cast<long long>(g.pick(0, 3))};
    std::uint32_t id =
        st.create_instance(schemas[g.pick(0, nschemas - 1)], fillers, {});
    st.situate(id, ctx, Place::point(static_cast<double>(i)));
  }
  return GeneratedCase{src.str(), program, std::move(st)};
}

}  // namespace scim::testkit
