#pragma once

#include <map>
#include <string>

#include "conangle/cone.hpp"
#include "conangle/point.hpp"

namespace conangle {

// A named collection of cones and points of one dimension, read from JSON:
//   {"dim": n,
//    "cones": {"K": {"kind": "soc"}, "M": {"kind": "subspace", "basis": [[1, 0, -1]]},
//              "Ko": {"kind": "polar", "of": "K"}},
//    "points": {"z": [0, 1, 0]}}
// Kinds: zero, ray (direction), subspace (basis), generated (generators),
// halfspace (normals), soc (optional rotation, rows), neg / polar / dual (of),
// intersect (parts). "of" and "parts" entries are cone names or inline objects.
struct Scene {
  int dim = 0;
  std::map<std::string, ConeExpr> cones;
  std::map<std::string, Point> points;

  // Error(resolve_error) for unknown names.
  const ConeExpr& cone(const std::string& name) const;
  const Point& point(const std::string& name) const;

  friend bool operator==(const Scene& a, const Scene& b);
};

// Error(parse_error) for malformed input, Error(resolve_error) for unknown or
// cyclic references.
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);

// Composite cones are written inline. Scenes built with polar / dual / negate /
// intersect (as the parser does) reparse to an equal scene.
std::string dump_scene(const Scene& scene, int indent = 2);

}  // namespace conangle
