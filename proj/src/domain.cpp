#include "icpnav/domain.hpp"

#include <algorithm>

namespace icpnav {

std::vector<Vec2> WorldState::human_positions() const {
  std::vector<Vec2> out;
  out.reserve(humans.size());
  for (const auto& h : humans) out.push_back(h.position);
  return out;
}

double Trajectory::max_step_displacement() const {
  double worst = 0.0;
  for (std::size_t k = 1; k < positions.size(); ++k) {
    worst = std::max(worst, euclidean_distance(positions[k], positions[k - 1]));
  }
  return worst;
}

bool Trajectory::respects_speed_limit(double v_max, double eps) const {
  return !positions.empty() && max_step_displacement() <= v_max * dt + eps;
}

bool HorizonPrediction::is_rectangular(std::size_t horizon) const {
  return std::all_of(steps.begin(), steps.end(),
                     [horizon](const auto& s) { return s.size() == horizon; });
}

const char* to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::Feasible:
      return "feasible";
    case PlanStatus::Infeasible:
      return "infeasible";
    case PlanStatus::CachedFallback:
      return "cached";
  }
  return "unknown";
}

}  // namespace icpnav
