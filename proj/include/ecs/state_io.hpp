#pragma once

#include <json.hpp>

#include "ecs/states.hpp"

namespace ecs {

// JSON layout (also used by the CLI's --dump flag):
//   pure:  {"modeCount": n, "terms": [{"coefficient": [re, im],
//                                      "label": [[re, im], ...]}, ...]}
//   mixed: {"modeCount": n, "components": [{"weight": w, "state": <pure>}, ...]}

nlohmann::json toJson(const SuperposedState& s);
nlohmann::json toJson(const MixedState& rho);

SuperposedState superposedFromJson(const nlohmann::json& j);
MixedState mixedFromJson(const nlohmann::json& j);

}  // namespace ecs
