#pragma once

#include <json.hpp>

#include "conangle/scene.hpp"

namespace conangle::detail {

Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& s);
nlohmann::json cone_to_json(const ConeExpr& k);
nlohmann::json point_to_json(const Point& p);

}  // namespace conangle::detail
