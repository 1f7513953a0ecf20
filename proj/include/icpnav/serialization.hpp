#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icpnav/domain.hpp"
#include "icpnav/predictor.hpp"

namespace icpnav {

using Json = nlohmann::ordered_json;

Json to_json(const Vec2& v);
Vec2 vec2_from_json(const nlohmann::json& j);
Json to_json(const std::vector<Vec2>& path);
std::vector<Vec2> path_from_json(const nlohmann::json& j);

/// {"pred_len": T, "robot": [[x,y],...], "humans": [[[x,y],...],...]}
Json window_to_json(const ObservationWindow& obs, std::size_t pred_len);
/// {"predictions": [[[x,y],...],...]}, one row of pred_len points per human.
Json prediction_to_json(const HorizonPrediction& p);
HorizonPrediction prediction_from_json(const nlohmann::json& j);

}  // namespace icpnav
