#include "icpnav/serialization.hpp"

#include <stdexcept>

namespace icpnav {

Json to_json(const Vec2& v) { return Json::array({v.x, v.y}); }

Vec2 vec2_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const std::vector<Vec2>& path) {
  Json out = Json::array();
  for (const auto& p : path) out.push_back(to_json(p));
  return out;
}

std::vector<Vec2> path_from_json(const nlohmann::json& j) {
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(vec2_from_json(p));
  return out;
}

Json window_to_json(const ObservationWindow& obs, std::size_t pred_len) {
  Json humans = Json::array();
  for (const auto& h : obs.humans) humans.push_back(to_json(h));
  return Json{{"pred_len", pred_len}, {"robot", to_json(obs.robot)}, {"humans", std::move(humans)}};
}

Json prediction_to_json(const HorizonPrediction& p) {
  Json rows = Json::array();
  for (const auto& h : p.steps) rows.push_back(to_json(h));
  return Json{{"predictions", std::move(rows)}};
}

HorizonPrediction prediction_from_json(const nlohmann::json& j) {
  HorizonPrediction p;
  for (const auto& row : j.at("predictions")) p.steps.push_back(path_from_json(row));
  return p;
}

}  // namespace icpnav
