#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scim/registry.hpp"
#include "scim/scenario.hpp"

namespace scim {

namespace {

const std::set<std::string> kShapes = {"square", "rectangle", "circle"};
const std::set<std::string> kColors = {"red", "blue", "green", "black",
                                       "white"};

[[noreturn]] void scene_error(int line, const std::string& why) {
  throw RuntimeError("SceneParseError",
                     "line " + std::to_string(line) + ": " + why);
}

double object_area(const SceneObjectInfo& o) {
  if (o.shape == "circle") {
    double r = o.width / 2;
    return std::numbers::pi * r * r;
  }
  return o.width * o.height;
}

Place object_place(const SceneObjectInfo& o) {
  if (o.shape == "circle") return Place::disc(o.x, o.y, o.width / 2);
  return Place::box(o.x - o.width / 2, o.y - o.height / 2, o.x + o.width / 2,
                    o.y + o.height / 2);
}

Place inflated_place(const SceneObjectInfo& o, double factor) {
  if (o.shape == "circle") return Place::disc(o.x, o.y, o.width / 2 * factor);
  double w = o.width * factor / 2, h = o.height * factor / 2;
  return Place::box(o.x - w, o.y - h, o.x + w, o.y + h);
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

// x-extent of a box or disc place
std::pair<double, double> x_extent(const Place& p) {
  if (const auto* b = std::get_if<BoxP>(&p.value)) return {b->x1, b->x2};
  if (const auto* d = std::get_if<DiscP>(&p.value))
    return {d->cx - d->radius, d->cx + d->radius};
  if (const auto* pt = std::get_if<PointP>(&p.value)) return {pt->x, pt->x};
  throw RuntimeError("PlaceKindMismatch", "scene places are boxes or discs");
}

}  // namespace

SceneInfo load_scene(BranchState& st, const std::string& text) {
  SceneInfo info;
  info.context = st.create_instance("SceneContext2D", {}, {});
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> names;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    SceneObjectInfo o;
    if (!(ls >> o.name)) continue;  // blank line
    if (!(ls >> o.shape >> o.width >> o.height >> o.color >> o.x >> o.y))
      scene_error(lineno, "expected `id shape width height color x y`");
    std::string extra;
    if (ls >> extra) scene_error(lineno, "trailing token '" + extra + "'");
    if (!names.insert(o.name).second)
      scene_error(lineno, "duplicate object id '" + o.name + "'");
    if (!kShapes.count(o.shape))
      scene_error(lineno, "unknown shape '" + o.shape + "'");
    if (!kColors.count(o.color))
      scene_error(lineno, "unknown color '" + o.color + "'");
    if (o.width <= 0 || o.height <= 0)
      scene_error(lineno, "width and height must be positive");
    if (o.shape == "circle" && o.width != o.height)
      scene_error(lineno, "circles take width = height = diameter");
    o.inst = st.create_instance(
        "SceneObject",
        {{"shape", Atom{Sym{o.shape}}},
         {"width", Atom{o.width}},
         {"height", Atom{o.height}},
         {"color", Atom{Sym{o.color}}}},
        {});
    st.situate(o.inst, info.context, object_place(o));
    info.objects.push_back(std::move(o));
  }
  return info;
}

const std::set<std::string>& demo_lexicon() {
  static const std::set<std::string> lex = {
      "put", "remove", "move", "the", "small", "red", "square", "on", "left"};
  return lex;
}

std::uint32_t lay_out_utterance(BranchState& st, const std::string& text) {
  std::uint32_t form = st.create_instance("LinearContext", {}, {});
  std::istringstream in(text);
  std::string word;
  int i = 0;
  while (in >> word) {
    if (!demo_lexicon().count(word))
      throw RuntimeError("UnknownWord",
                         "'" + word + "' is not in the demo lexicon");
    std::uint32_t w =
        st.create_instance("Word", {{"text", Atom{word}}}, {});
    st.situate(w, form, Place::point(double(i)));
    i++;
  }
  return form;
}

namespace {

struct Candidate {
  std::uint32_t wrapper = 0;
  const SceneObjectInfo* obj = nullptr;
  double measure = 0;
};

const SceneObjectInfo* object_of(const std::vector<SceneObjectInfo>& objs,
                                 std::uint32_t inst) {
  for (const auto& o : objs)
    if (o.inst == inst) return &o;
  return nullptr;
}

bool places_overlap(const Place& a, const Place& b) {
  RelationValue v = eval_native_relation("overlaps", {a, b});
  return std::get<bool>(v);
}

}  // namespace

ResolutionResult resolve_referents(
    BranchState& st, std::uint32_t rc,
    const std::vector<std::string>& predicates) {
  // recover the scene: the single SceneContext2D instance
  std::uint32_t scene_ctx = 0;
  for (const auto& [id, inst] : st.instances())
    if (inst.type == "SceneContext2D") scene_ctx = id;
  if (!scene_ctx)
    throw RuntimeError("EmptyCandidateSet", "no scene to resolve against");
  std::vector<SceneObjectInfo> scene;
  for (const auto* e : st.present_in(scene_ctx)) {
    SceneObjectInfo o;
    o.inst = e->instance;
    o.shape = std::get<Sym>(std::get<Atom>(st.read_slot(o.inst, "shape"))).name;
    o.color = std::get<Sym>(std::get<Atom>(st.read_slot(o.inst, "color"))).name;
    o.width = *atom_number(std::get<Atom>(st.read_slot(o.inst, "width")));
    o.height = *atom_number(std::get<Atom>(st.read_slot(o.inst, "height")));
    auto ext = x_extent(e->place);
    o.x = (ext.first + ext.second) / 2;
    scene.push_back(std::move(o));
  }

  std::vector<Candidate> survivors;
  std::vector<std::uint32_t> dropped;
  for (const auto* e : st.present_in(rc)) {
    Filler f = st.read_slot(e->instance, "object");
    const auto* ref = std::get_if<InstanceRef>(&f);
    if (!ref) continue;
    Candidate c;
    c.wrapper = e->instance;
    c.obj = object_of(scene, ref->id);
    if (c.obj) survivors.push_back(c);
  }

  double top_trust = 1.0;
  bool any_gradable = false;
  for (const auto& pred : predicates) {
    std::vector<Candidate> kept;
    if (pred == "small" || pred == "on-the-left") {
      any_gradable = true;
      for (auto& c : survivors) {
        if (pred == "on-the-left") {
          c.measure = c.obj->x;
          kept.push_back(c);
          continue;
        }
        // "small": area relative to the median of the comparison set --
        // the survivors plus anything overlapping the candidate's
        // 1.5x-inflated footprint (the neighborhood effect)
        std::vector<double> areas;
        for (const auto& s : survivors) areas.push_back(object_area(*s.obj));
        Place inflated = inflated_place(*c.obj, 1.5);
        for (const auto& o : scene) {
          bool already = false;
          for (const auto& s : survivors)
            if (s.obj->inst == o.inst) already = true;
          if (already) continue;
          if (places_overlap(inflated, object_place(o)))
            areas.push_back(object_area(o));
        }
        c.measure = object_area(*c.obj) / median(areas);
        if (c.measure > 1.0)
          dropped.push_back(c.wrapper);
        else
          kept.push_back(c);
      }
      std::sort(kept.begin(), kept.end(),
                [](const Candidate& a, const Candidate& b) {
                  if (a.measure != b.measure) return a.measure < b.measure;
                  return a.obj->inst < b.obj->inst;
                });
      if (kept.size() >= 2) {
        std::vector<double> ms;
        for (const auto& c : kept) ms.push_back(c.measure);
        double gap = ms[1] - ms[0];
        double eps = median(ms);
        top_trust = eps + gap > 0 ? 0.5 + 0.5 * gap / (gap + eps) : 0.5;
      } else {
        top_trust = 1.0;
      }
    } else {
      // categorical: a shape or a color name
      for (auto& c : survivors) {
        bool ok;
        if (kColors.count(pred)) {
          ok = c.obj->color == pred;
        } else if (pred == "square") {
          ok = c.obj->shape != "circle" &&
               eval_predicate("approx-square",
                              {Atom{c.obj->width}, Atom{c.obj->height}});
        } else if (kShapes.count(pred)) {
          ok = c.obj->shape == pred;
        } else {
          throw RuntimeError("UnknownPredicate",
                             "no resolution predicate '" + pred + "'");
        }
        if (ok)
          kept.push_back(c);
        else
          dropped.push_back(c.wrapper);
      }
    }
    survivors = std::move(kept);
    if (survivors.empty()) break;
  }
  if (survivors.size() < 2 || !any_gradable) top_trust = 1.0;

  // write the outcome back into the wrappers
  for (auto id : dropped) st.mutate_role(id, "survived", Atom{false});
  ResolutionResult out;
  for (size_t i = 0; i < survivors.size(); i++) {
    const auto& c = survivors[i];
    st.mutate_role(c.wrapper, "survived", Atom{true});
    st.mutate_role(c.wrapper, "rank", Atom{(long long)(i + 1)});
    if (any_gradable) st.mutate_role(c.wrapper, "measure", Atom{c.measure});
    out.order.push_back(c.wrapper);
  }
  out.top_trust = top_trust;
  if (out.order.empty())
    throw RuntimeError("EmptyCandidateSet",
                       "every candidate was dropped during resolution");
  return out;
}

namespace {

std::string read_string(const BranchState& st, std::uint32_t inst,
                        const std::string& slot) {
  Filler f = st.read_slot(inst, slot);
  if (const auto* a = std::get_if<Atom>(&f))
    if (const auto* s = std::get_if<std::string>(a)) return *s;
  return "";
}

}  // namespace

std::vector<Interpretation> interpret(const Engine& eng,
                                      const std::string& scene_text,
                                      const std::string& utterance,
                                      EngineConfig cfg) {
  const TypeHierarchy& h = eng.program().hierarchy;
  BranchState base(&h);
  SceneInfo scene = load_scene(base, scene_text);
  lay_out_utterance(base, utterance);
  base.create_instance("SetContext", {}, {});  // the meaning pole

  // left third of the scene's bounding box
  double xmin = 1e300, xmax = -1e300;
  for (const auto& o : scene.objects) {
    auto ext = x_extent(object_place(o));
    xmin = std::min(xmin, ext.first);
    xmax = std::max(xmax, ext.second);
  }
  double left_boundary = xmin + (xmax - xmin) / 3.0;

  cfg.halt_on_type = "Request";
  RunResult rr = eng.run(base, cfg);

  std::vector<Interpretation> results;
  for (const auto& terminal : rr.terminals) {
    // every live Request produced by a firing
    for (const auto& f : terminal.firing_log()) {
      for (auto id : f.created) {
        if (!h.is_subtype(terminal.instance(id).type, "Request")) continue;
        if (terminal.removed_everywhere(id)) continue;

        std::string action = read_string(terminal, id, "action");
        std::string goal = read_string(terminal, id, "goal");
        std::string sense = action;
        if (action == "move") sense = goal == "elsewhere" ? "move1" : "move2";

        Filler theme = terminal.read_slot(id, "theme");
        const auto* tref = std::get_if<InstanceRef>(&theme);
        if (!tref) continue;
        std::vector<std::string> preds;
        if (auto s = read_string(terminal, tref->id, "shape"); !s.empty())
          preds.push_back(s);
        if (auto s = read_string(terminal, tref->id, "color"); !s.empty())
          preds.push_back(s);
        if (read_string(terminal, tref->id, "size") == "small")
          preds.push_back("small");
        if (read_string(terminal, tref->id, "location") == "left")
          preds.push_back("on-the-left");

        // resolve on a scratch copy of the terminal branch
        BranchState scratch = terminal;
        std::uint32_t rc = scratch.create_instance("ResolutionContext", {}, {});
        std::map<std::uint32_t, const SceneObjectInfo*> wrapper_obj;
        int k = 0;
        for (const auto& o : scene.objects) {
          std::uint32_t w = scratch.create_instance(
              "Candidate", {{"object", InstanceRef{o.inst}},
                            {"survived", Atom{true}},
                            {"rank", Atom{(long long)0}}},
              {});
          scratch.situate(w, rc, Place::point(double(k++)));
          wrapper_obj[w] = &o;
        }
        ResolutionResult res;
        try {
          res = resolve_referents(scratch, rc, preds);
        } catch (const RuntimeError& e) {
          if (e.code() == "EmptyCandidateSet") continue;
          throw;
        }
        const SceneObjectInfo* top = wrapper_obj.at(res.order.front());

        // per-sense feasibility: put/move2 demand a goal region different
        // from where the referent already is
        if (sense == "put" || sense == "move2") {
          if (goal == "left" && top->x < left_boundary) continue;
        }

        Interpretation it;
        it.score = terminal.score() * res.top_trust;
        it.sense = sense;
        it.referent = top->name;
        it.goal = goal;
        results.push_back(std::move(it));
      }
    }
  }

  // deduplicate equivalent readings reached along different firing orders
  std::map<std::tuple<std::string, std::string, std::string>, Interpretation>
      best;
  for (const auto& it : results) {
    auto key = std::make_tuple(it.sense, it.referent, it.goal);
    auto found = best.find(key);
    if (found == best.end() || it.score > found->second.score)
      best[key] = it;
  }
  std::vector<Interpretation> ranked;
  for (const auto& [key, it] : best) ranked.push_back(it);
  std::sort(ranked.begin(), ranked.end(),
            [](const Interpretation& a, const Interpretation& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.sense != b.sense) return a.sense < b.sense;
              return a.referent < b.referent;
            });
  if (ranked.empty())
    throw RuntimeError("NoInterpretation",
                       "no branch produced a feasible request");
  return ranked;
}

BranchState counting_initial_state(const CompiledProgram& prog) {
  BranchState st(&prog.hierarchy);
  std::uint32_t mem = st.create_instance("SetContext", {}, {});
  long long facts[][2] = {{1, 2}, {2, 3}, {3, 4}, {4, 5}};
  int k = 0;
  for (auto& f : facts) {
    std::uint32_t inst = st.create_instance(
        "CountOrder", {{"first", Atom{f[0]}}, {"second", Atom{f[1]}}}, {});
    st.situate(inst, mem, Place::point(double(k++)));
  }
  std::uint32_t goal = st.create_instance(
      "CountGoal",
      {{"start", Atom{(long long)2}},
       {"end", Atom{(long long)4}},
       {"step", Atom{std::string("start")}}},
      {});
  st.situate(goal, mem, Place::point(double(k)));
  return st;
}

}  // namespace scim
