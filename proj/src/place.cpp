#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "scim/place.hpp"

namespace scim {

namespace {
constexpr double kEps = 1e-9;
}

std::string Place::kind() const {
  struct V {
    std::string operator()(const PointP&) const { return "point"; }
    std::string operator()(const SegmentP&) const { return "segment"; }
    std::string operator()(const MultiSegmentP&) const {
      return "multi-segment";
    }
    std::string operator()(const LineP&) const { return "line"; }
    std::string operator()(const BoxP&) const { return "box"; }
    std::string operator()(const DiscP&) const { return "disc"; }
  };
  return std::visit(V{}, value);
}

std::string Place::to_string() const {
  std::ostringstream os;
  struct V {
    std::ostringstream& os;
    void operator()(const PointP& p) const {
      os << "point(" << p.x;
      if (p.has_y) os << ", " << p.y;
      os << ")";
    }
    void operator()(const SegmentP& s) const {
      os << "segment[" << s.start << ", " << s.end << "]";
    }
    void operator()(const MultiSegmentP& m) const {
      os << "multi-segment{";
      for (size_t i = 0; i < m.parts.size(); i++) {
        if (i > 0) os << ", ";
        os << "[" << m.parts[i].start << ", " << m.parts[i].end << "]";
      }
      os << "}";
    }
    void operator()(const LineP& l) const {
      os << "line(" << l.x1 << ", " << l.y1 << ", " << l.x2 << ", " << l.y2
         << ")";
    }
    void operator()(const BoxP& b) const {
      os << "box(" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2
         << ")";
    }
    void operator()(const DiscP& d) const {
      os << "disc(" << d.cx << ", " << d.cy << ", " << d.radius << ")";
    }
  };
  std::visit(V{os}, value);
  return os.str();
}

Place Place::point(double x) { return Place{PointP{x, 0, false}}; }
Place Place::point(double x, double y) { return Place{PointP{x, y, true}}; }

Place Place::segment(double a, double b) {
  if (a > b)
    throw RuntimeError("PlaceKindMismatch", "segment start exceeds end");
  return Place{SegmentP{a, b}};
}

Place Place::multi(std::vector<SegmentP> parts) {
  std::sort(parts.begin(), parts.end(), [](const SegmentP& a, const SegmentP& b) {
    return a.start < b.start;
  });
  std::vector<SegmentP> merged;
  for (const auto& p : parts) {
    if (!merged.empty() && p.start <= merged.back().end + kEps) {
      merged.back().end = std::max(merged.back().end, p.end);
    } else {
      merged.push_back(p);
    }
  }
  return Place{MultiSegmentP{std::move(merged)}};
}

Place Place::line(double x1, double y1, double x2, double y2) {
  if (std::abs(x1 - x2) < kEps && std::abs(y1 - y2) < kEps)
    throw RuntimeError("PlaceKindMismatch", "line anchors must be distinct");
  return Place{LineP{x1, y1, x2, y2}};
}

Place Place::box(double x1, double y1, double x2, double y2) {
  if (x1 > x2 || y1 > y2)
    throw RuntimeError("PlaceKindMismatch", "box corners are not ordered");
  return Place{BoxP{x1, y1, x2, y2}};
}

Place Place::disc(double cx, double cy, double r) {
  if (r <= 0) throw RuntimeError("PlaceKindMismatch", "disc radius must be > 0");
  return Place{DiscP{cx, cy, r}};
}

bool is_place_kind_name(const std::string& name) {
  return name == "point" || name == "segment" || name == "multi-segment" ||
         name == "line" || name == "box" || name == "disc";
}

namespace {

double center_x(const Place& p) {
  if (const auto* b = std::get_if<BoxP>(&p.value)) return (b->x1 + b->x2) / 2;
  if (const auto* d = std::get_if<DiscP>(&p.value)) return d->cx;
  if (const auto* pt = std::get_if<PointP>(&p.value)) return pt->x;
  throw RuntimeError("PlaceKindMismatch", "place has no horizontal center");
}
double center_y(const Place& p) {
  if (const auto* b = std::get_if<BoxP>(&p.value)) return (b->y1 + b->y2) / 2;
  if (const auto* d = std::get_if<DiscP>(&p.value)) return d->cy;
  if (const auto* pt = std::get_if<PointP>(&p.value)) return pt->y;
  throw RuntimeError("PlaceKindMismatch", "place has no vertical center");
}

BoxP as_box(const Place& p) {
  if (const auto* b = std::get_if<BoxP>(&p.value)) return *b;
  if (const auto* d = std::get_if<DiscP>(&p.value))
    return {d->cx - d->radius, d->cy - d->radius, d->cx + d->radius,
            d->cy + d->radius};
  throw RuntimeError("PlaceKindMismatch", "expected a box or disc place");
}

bool boxes_overlap(const BoxP& a, const BoxP& b) {
  double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  return w > kEps && h > kEps;
}

bool places_overlap_2d(const Place& a, const Place& b) {
  const auto* da = std::get_if<DiscP>(&a.value);
  const auto* db = std::get_if<DiscP>(&b.value);
  if (da && db) {
    double dx = da->cx - db->cx, dy = da->cy - db->cy;
    return std::hypot(dx, dy) < da->radius + db->radius - kEps;
  }
  if (da || db) {
    const DiscP& d = da ? *da : *db;
    BoxP box = as_box(da ? b : a);
    double px = std::clamp(d.cx, box.x1, box.x2);
    double py = std::clamp(d.cy, box.y1, box.y2);
    return std::hypot(d.cx - px, d.cy - py) < d.radius - kEps;
  }
  return boxes_overlap(as_box(a), as_box(b));
}

using RelFn = std::function<RelationValue(const std::vector<Place>&)>;
using OpFn = std::function<Place(const std::vector<Place>&)>;

struct RelEntry {
  std::vector<std::string> sig;
  RelFn fn;
};
struct OpEntry {
  std::vector<std::string> sig;
  OpFn fn;
};

const std::map<std::string, std::vector<RelEntry>>& relation_registry() {
  static const std::map<std::string, std::vector<RelEntry>> reg = [] {
    std::map<std::string, std::vector<RelEntry>> r;
    r["before"].push_back({{"point", "point"}, [](const auto& p) {
                             return Atom{center_x(p[0]) < center_x(p[1]) - kEps};
                           }});
    // successor adjacency in token index space
    r["meets"].push_back({{"point", "point"}, [](const auto& p) {
                            return Atom{
                                std::abs(center_x(p[1]) - center_x(p[0]) - 1.0) <
                                kEps};
                          }});
    r["overlaps"].push_back({{"segment", "segment"}, [](const auto& p) {
                               const auto& a = std::get<SegmentP>(p[0].value);
                               const auto& b = std::get<SegmentP>(p[1].value);
                               return Atom{std::max(a.start, b.start) <
                                           std::min(a.end, b.end) - kEps};
                             }});
    for (const char* ka : {"box", "disc"}) {
      for (const char* kb : {"box", "disc"}) {
        std::vector<std::string> sig = {ka, kb};
        r["left-of"].push_back({sig, [](const auto& p) {
                                  return Atom{center_x(p[0]) <
                                              center_x(p[1]) - kEps};
                                }});
        r["right-of"].push_back({sig, [](const auto& p) {
                                   return Atom{center_x(p[0]) >
                                               center_x(p[1]) + kEps};
                                 }});
        r["above"].push_back({sig, [](const auto& p) {
                                return Atom{center_y(p[0]) >
                                            center_y(p[1]) + kEps};
                              }});
        r["below"].push_back({sig, [](const auto& p) {
                                return Atom{center_y(p[0]) <
                                            center_y(p[1]) - kEps};
                              }});
        r["overlaps"].push_back({sig, [](const auto& p) {
                                   return Atom{places_overlap_2d(p[0], p[1])};
                                 }});
      }
    }
    r["contains"].push_back({{"box", "box"}, [](const auto& p) {
                               const auto& a = std::get<BoxP>(p[0].value);
                               const auto& b = std::get<BoxP>(p[1].value);
                               return Atom{a.x1 <= b.x1 + kEps &&
                                           a.y1 <= b.y1 + kEps &&
                                           b.x2 <= a.x2 + kEps &&
                                           b.y2 <= a.y2 + kEps};
                             }});
    r["on-line"].push_back({{"point", "line"}, [](const auto& p) {
                              const auto& pt = std::get<PointP>(p[0].value);
                              const auto& l = std::get<LineP>(p[1].value);
                              double cross = (l.x2 - l.x1) * (pt.y - l.y1) -
                                             (l.y2 - l.y1) * (pt.x - l.x1);
                              return Atom{std::abs(cross) < 1e-6};
                            }});
    return r;
  }();
  return reg;
}

const std::map<std::string, std::vector<OpEntry>>& operation_registry() {
  static const std::map<std::string, std::vector<OpEntry>> reg = [] {
    std::map<std::string, std::vector<OpEntry>> r;
    r["union"].push_back({{"segment", "segment"}, [](const auto& p) {
                            return Place::multi(
                                {std::get<SegmentP>(p[0].value),
                                 std::get<SegmentP>(p[1].value)});
                          }});
    r["intersection"].push_back(
        {{"segment", "segment"}, [](const auto& p) {
           const auto& a = std::get<SegmentP>(p[0].value);
           const auto& b = std::get<SegmentP>(p[1].value);
           double lo = std::max(a.start, b.start);
           double hi = std::min(a.end, b.end);
           if (lo > hi)
             throw RuntimeError("EmptyResult",
                                "segments do not intersect");
           return Place::segment(lo, hi);
         }});
    r["span"].push_back({{"segment", "segment"}, [](const auto& p) {
                           const auto& a = std::get<SegmentP>(p[0].value);
                           const auto& b = std::get<SegmentP>(p[1].value);
                           return Place::segment(std::min(a.start, b.start),
                                                 std::max(a.end, b.end));
                         }});
    r["bounding-box"].push_back({{"box", "box"}, [](const auto& p) {
                                   BoxP a = as_box(p[0]);
                                   BoxP b = as_box(p[1]);
                                   return Place::box(std::min(a.x1, b.x1),
                                                     std::min(a.y1, b.y1),
                                                     std::max(a.x2, b.x2),
                                                     std::max(a.y2, b.y2));
                                 }});
    r["center"].push_back({{"box"}, [](const auto& p) {
                             return Place::point(center_x(p[0]),
                                                 center_y(p[0]));
                           }});
    return r;
  }();
  return reg;
}

template <typename Entry>
const Entry* find_entry(const std::vector<Entry>& entries,
                        const std::vector<Place>& places) {
  for (const auto& e : entries) {
    if (e.sig.size() != places.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < e.sig.size(); i++)
      if (places[i].kind() != e.sig[i]) ok = false;
    if (ok) return &e;
  }
  return nullptr;
}

template <typename Entry>
bool has_sig(const std::vector<Entry>& entries,
             const std::vector<std::string>& kinds) {
  for (const auto& e : entries)
    if (e.sig == kinds) return true;
  return false;
}

}  // namespace

RelationValue eval_native_relation(const std::string& name,
                                   const std::vector<Place>& places) {
  auto it = relation_registry().find(name);
  if (it == relation_registry().end())
    throw RuntimeError("UnknownRelation", "no relation '" + name + "'");
  const RelEntry* e = find_entry(it->second, places);
  if (!e)
    throw RuntimeError("PlaceKindMismatch",
                       "relation '" + name + "' does not accept these places");
  return e->fn(places);
}

Place eval_native_operation(const std::string& name,
                            const std::vector<Place>& places) {
  auto it = operation_registry().find(name);
  if (it == operation_registry().end())
    throw RuntimeError("UnknownOperation", "no operation '" + name + "'");
  const OpEntry* e = find_entry(it->second, places);
  if (!e)
    throw RuntimeError("PlaceKindMismatch",
                       "operation '" + name + "' does not accept these places");
  return e->fn(places);
}

bool native_relation_exists(const std::string& name,
                            const std::vector<std::string>& param_kinds) {
  auto it = relation_registry().find(name);
  return it != relation_registry().end() && has_sig(it->second, param_kinds);
}

bool native_operation_exists(const std::string& name,
                             const std::vector<std::string>& param_kinds) {
  auto it = operation_registry().find(name);
  return it != operation_registry().end() && has_sig(it->second, param_kinds);
}

const std::string& prelude_source() {
  static const std::string src = R"SCIM(
// Built-in library: atomic enumerations, context topologies and the base
// schemas used by scenes and utterances.

enum Shape { square, rectangle, circle }
enum Color { red, blue, green, black, white }

context LinearContext
  places
    point
    segment
    multi-segment
  relations
    before(point, point) |-> Boolean
    meets(point, point) |-> Boolean
    overlaps(segment, segment) |-> Boolean
  operations
    union(segment, segment) |-> multi-segment
    intersection(segment, segment) |-> segment
    span(segment, segment) |-> segment

context SceneContext2D
  places
    point
    box
    disc
    line
  relations
    left-of(box, box) |-> Boolean
    left-of(box, disc) |-> Boolean
    left-of(disc, box) |-> Boolean
    left-of(disc, disc) |-> Boolean
    right-of(box, box) |-> Boolean
    right-of(box, disc) |-> Boolean
    right-of(disc, box) |-> Boolean
    right-of(disc, disc) |-> Boolean
    above(box, box) |-> Boolean
    above(disc, disc) |-> Boolean
    below(box, box) |-> Boolean
    below(disc, disc) |-> Boolean
    contains(box, box) |-> Boolean
    overlaps(box, box) |-> Boolean
    overlaps(box, disc) |-> Boolean
    overlaps(disc, box) |-> Boolean
    overlaps(disc, disc) |-> Boolean
    on-line(point, line) |-> Boolean
  operations
    bounding-box(box, box) |-> box
    center(box) |-> point

// unstructured storage: the meaning pole
context SetContext
  places
    point

context ResolutionContext
  inherits SetContext

schema Word
  roles
    text : String

schema SceneObject
  roles
    shape : Shape
    width : Float
    height : Float
    color : Color

// wrapper used by the reference-resolution sorting steps
schema Candidate
  roles
    object : SceneObject
    ?rank : Integer
    ?survived : Boolean
    ?measure : Float
)SCIM";
  return src;
}

}  // namespace scim
