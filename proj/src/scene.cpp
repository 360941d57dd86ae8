#include "conangle/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "conangle/error.hpp"
#include "scene_json.hpp"

namespace conangle {

using nlohmann::json;

const ConeExpr& Scene::cone(const std::string& name) const {
  auto it = cones.find(name);
  if (it == cones.end()) throw Error(Errc::resolve_error, "unknown cone '" + name + "'");
  return it->second;
}

const Point& Scene::point(const std::string& name) const {
  auto it = points.find(name);
  if (it == points.end()) throw Error(Errc::resolve_error, "unknown point '" + name + "'");
  return it->second;
}

bool operator==(const Scene& a, const Scene& b) {
  if (a.dim != b.dim || a.cones.size() != b.cones.size() || a.points.size() != b.points.size()) return false;
  for (const auto& [name, k] : a.cones) {
    auto it = b.cones.find(name);
    if (it == b.cones.end() || !(it->second == k)) return false;
  }
  for (const auto& [name, p] : a.points) {
    auto it = b.points.find(name);
    if (it == b.points.end() || it->second.size() != p.size() || it->second != p) return false;
  }
  return true;
}

namespace detail {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::parse_error, what); }

Point vector_from(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) parse_fail(where + ": expected an array of numbers");
  if (static_cast<int>(j.size()) != dim) {
    parse_fail(where + ": expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
  }
  Point p(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) parse_fail(where + ": coordinates must be numbers");
    p(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  if (!p.allFinite()) parse_fail(where + ": non-finite coordinate");
  return p;
}

std::vector<Point> vectors_from(const json& j, const char* field, int dim, const std::string& where,
                                bool allow_empty) {
  if (!j.contains(field)) parse_fail(where + ": missing \"" + field + "\"");
  const json& arr = j.at(field);
  if (!arr.is_array()) parse_fail(where + ": \"" + field + "\" must be an array");
  if (arr.empty() && !allow_empty) parse_fail(where + ": \"" + field + "\" is empty");
  std::vector<Point> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(vector_from(arr[i], dim, where + "." + field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

class Resolver {
 public:
  Resolver(const json& cones, int dim) : cones_(cones), dim_(dim) {}

  ConeExpr by_name(const std::string& name) {
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    if (!cones_.contains(name)) throw Error(Errc::resolve_error, "unknown cone '" + name + "'");
    if (!active_.insert(name).second) throw Error(Errc::resolve_error, "cyclic reference through '" + name + "'");
    ConeExpr k = build(cones_.at(name), name);
    active_.erase(name);
    done_.emplace(name, k);
    return k;
  }

  ConeExpr reference(const json& j, const std::string& where) {
    if (j.is_string()) return by_name(j.get<std::string>());
    if (j.is_object()) return build(j, where);
    parse_fail(where + ": expected a cone name or an inline cone object");
  }

 private:
  ConeExpr build(const json& j, const std::string& where) {
    if (!j.is_object()) parse_fail(where + ": cone must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string()) parse_fail(where + ": missing string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    try {
      if (kind == "zero") return ConeExpr::zero(dim_);
      if (kind == "ray") {
        if (!j.contains("direction")) parse_fail(where + ": missing \"direction\"");
        return ConeExpr::ray(vector_from(j.at("direction"), dim_, where + ".direction"));
      }
      if (kind == "subspace") return ConeExpr::subspace(dim_, vectors_from(j, "basis", dim_, where, true));
      if (kind == "generated") return ConeExpr::generated(vectors_from(j, "generators", dim_, where, false));
      if (kind == "halfspace") return ConeExpr::halfspace(vectors_from(j, "normals", dim_, where, false));
      if (kind == "soc") {
        if (!j.contains("rotation")) return ConeExpr::second_order(dim_);
        const std::vector<Point> rows = vectors_from(j, "rotation", dim_, where, false);
        if (static_cast<int>(rows.size()) != dim_) parse_fail(where + ": rotation must be square");
        Matrix r(dim_, dim_);
        for (int i = 0; i < dim_; ++i) r.row(i) = rows[static_cast<std::size_t>(i)].transpose();
        return ConeExpr::second_order(dim_, r);
      }
      if (kind == "neg" || kind == "polar" || kind == "dual") {
        if (!j.contains("of")) parse_fail(where + ": missing \"of\"");
        const ConeExpr inner = reference(j.at("of"), where + ".of");
        if (kind == "neg") return negate(inner);
        if (kind == "polar") return polar(inner);
        return dual(inner);
      }
      if (kind == "intersect") {
        if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty()) {
          parse_fail(where + ": \"parts\" must be a nonempty array");
        }
        std::vector<ConeExpr> parts;
        for (std::size_t i = 0; i < j.at("parts").size(); ++i) {
          parts.push_back(reference(j.at("parts")[i], where + ".parts[" + std::to_string(i) + "]"));
        }
        return intersect(parts);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::parse_error || e.code() == Errc::resolve_error) throw;
      parse_fail(where + ": " + e.what());
    }
    parse_fail(where + ": unknown kind \"" + kind + "\"");
  }

  const json& cones_;
  int dim_;
  std::map<std::string, ConeExpr> done_;
  std::set<std::string> active_;
};

}  // namespace

Scene scene_from_json(const json& j) {
  if (!j.is_object()) parse_fail("scene must be a JSON object");
  if (!j.contains("dim") || !j.at("dim").is_number_integer() || j.at("dim").get<int>() <= 0) {
    parse_fail("scene needs a positive integer \"dim\"");
  }
  Scene s;
  s.dim = j.at("dim").get<int>();
  if (j.contains("cones")) {
    const json& cones = j.at("cones");
    if (!cones.is_object()) parse_fail("\"cones\" must be an object");
    Resolver r(cones, s.dim);
    for (auto it = cones.begin(); it != cones.end(); ++it) s.cones.emplace(it.key(), r.by_name(it.key()));
  }
  if (j.contains("points")) {
    const json& pts = j.at("points");
    if (!pts.is_object()) parse_fail("\"points\" must be an object");
    for (auto it = pts.begin(); it != pts.end(); ++it) {
      s.points.emplace(it.key(), vector_from(it.value(), s.dim, "points." + it.key()));
    }
  }
  return s;
}

json point_to_json(const Point& p) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p(i));
  return arr;
}

json cone_to_json(const ConeExpr& k) {
  json j;
  j["kind"] = to_string(k.kind());
  auto columns = [&k] {
    json arr = json::array();
    for (Eigen::Index c = 0; c < k.vectors().cols(); ++c) arr.push_back(point_to_json(k.vectors().col(c)));
    return arr;
  };
  switch (k.kind()) {
    case ConeKind::zero:
      break;
    case ConeKind::ray:
      j["direction"] = point_to_json(k.vectors().col(0));
      break;
    case ConeKind::subspace:
      j["basis"] = columns();
      break;
    case ConeKind::generated:
      j["generators"] = columns();
      break;
    case ConeKind::halfspace:
      j["normals"] = columns();
      break;
    case ConeKind::second_order:
      if (k.rotation()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < k.rotation()->rows(); ++r) rows.push_back(point_to_json(k.rotation()->row(r)));
        j["rotation"] = rows;
      }
      break;
    case ConeKind::neg:
    case ConeKind::polar:
      j["of"] = cone_to_json(k.inner());
      break;
    case ConeKind::intersect: {
      json parts = json::array();
      for (const ConeExpr& p : k.parts()) parts.push_back(cone_to_json(p));
      j["parts"] = parts;
      break;
    }
  }
  return j;
}

json scene_to_json(const Scene& s) {
  json j;
  j["dim"] = s.dim;
  j["cones"] = json::object();
  for (const auto& [name, k] : s.cones) j["cones"][name] = cone_to_json(k);
  if (!s.points.empty()) {
    j["points"] = json::object();
    for (const auto& [name, p] : s.points) j["points"][name] = point_to_json(p);
  }
  return j;
}

}  // namespace detail

Scene parse_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
  return detail::scene_from_json(j);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string dump_scene(const Scene& scene, int indent) { return detail::scene_to_json(scene).dump(indent); }

}  // namespace conangle
