#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scim/ast.hpp"
#include "scim/diagnostics.hpp"

namespace scim {

// Position value inside a context. Coordinates are reals: token index
// space for linear contexts, scene units for spatial ones.
struct PointP {
  double x = 0;
  double y = 0;
  bool has_y = false;
  bool operator==(const PointP&) const = default;
};
struct SegmentP {
  double start = 0, end = 0;  // start <= end
  bool operator==(const SegmentP&) const = default;
};
struct MultiSegmentP {
  std::vector<SegmentP> parts;  // normalized: sorted, non-overlapping
  bool operator==(const MultiSegmentP&) const = default;
};
struct LineP {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // two distinct anchors
  bool operator==(const LineP&) const = default;
};
struct BoxP {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // x1<=x2, y1<=y2
  bool operator==(const BoxP&) const = default;
};
struct DiscP {
  double cx = 0, cy = 0, radius = 0;  // radius > 0
  bool operator==(const DiscP&) const = default;
};

struct Place {
  std::variant<PointP, SegmentP, MultiSegmentP, LineP, BoxP, DiscP> value;
  bool operator==(const Place&) const = default;

  std::string kind() const;  // "point", "segment", ...
  std::string to_string() const;

  static Place point(double x);
  static Place point(double x, double y);
  static Place segment(double a, double b);           // checks a <= b
  static Place multi(std::vector<SegmentP> parts);    // normalizes
  static Place line(double x1, double y1, double x2, double y2);
  static Place box(double x1, double y1, double x2, double y2);
  static Place disc(double cx, double cy, double r);  // checks r > 0
};

bool is_place_kind_name(const std::string& name);

// Relation value: Boolean, Integer or Float.
using RelationValue = Atom;

// Native implementations behind the opaque place types. Relations map
// places to an atomic value; operations map places to a place (or report
// EmptyResult). Throws UnknownRelation / UnknownOperation /
// PlaceKindMismatch / EmptyResult.
RelationValue eval_native_relation(const std::string& name,
                                   const std::vector<Place>& places);
Place eval_native_operation(const std::string& name,
                            const std::vector<Place>& places);
bool native_relation_exists(const std::string& name,
                            const std::vector<std::string>& param_kinds);
bool native_operation_exists(const std::string& name,
                             const std::vector<std::string>& param_kinds);

// Source text of the built-in library: the atomic enums and the
// LinearContext / SceneContext2D / SetContext / ResolutionContext
// declarations plus the base schemas the scenario kit relies on.
const std::string& prelude_source();

}  // namespace scim
