#pragma once

#include <cstddef>
#include <vector>

#include "icpnav/geometry.hpp"

namespace icpnav {

struct AgentState {
  Vec2 position;
  Vec2 velocity;
  Vec2 goal;
  double radius = 0.4;
};

/// Snapshot of the robot and the crowd at one discrete timestep.
/// Humans are identified by their index, which is stable across timesteps.
struct WorldState {
  int time_step = 0;
  AgentState robot;
  std::vector<AgentState> humans;
  double dt = 0.25;

  std::size_t human_count() const { return humans.size(); }
  std::vector<Vec2> human_positions() const;
};

/// Time-indexed positions of one agent sampled every `dt` seconds.
struct Trajectory {
  int start_step = 0;
  std::vector<Vec2> positions;
  double dt = 0.25;

  std::size_t size() const { return positions.size(); }
  /// Largest displacement between consecutive samples.
  double max_step_displacement() const;
  /// True when every consecutive displacement is at most v_max * dt + eps.
  bool respects_speed_limit(double v_max, double eps = 1e-9) const;
};

/// Predicted future positions: `steps[i][tau - 1]` is human i at t + tau.
struct HorizonPrediction {
  std::vector<std::vector<Vec2>> steps;

  std::size_t human_count() const { return steps.size(); }
  std::size_t horizon() const { return steps.empty() ? 0 : steps.front().size(); }
  /// Every human has exactly `horizon` entries.
  bool is_rectangular(std::size_t horizon) const;
};

enum class PlanStatus { Feasible, Infeasible, CachedFallback };

/// Planned robot motion over an MPC horizon. positions[0] is the robot
/// position at planning time and positions[k + 1] = positions[k] + velocities[k] * dt.
struct RobotPlan {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  PlanStatus status = PlanStatus::Infeasible;
  double objective = 0.0;
  double max_residual = 0.0;
  int outer_iterations = 0;
  int dropped_constraints = 0;

  std::size_t horizon() const { return velocities.size(); }
  bool feasible() const { return status == PlanStatus::Feasible; }
};

const char* to_string(PlanStatus status);

}  // namespace icpnav
