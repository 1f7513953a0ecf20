#pragma once

#include <cstdint>
#include <vector>

#include "icpnav/domain.hpp"

namespace icpnav::harness {

enum class Geometry { Circle, Square };

struct Scenario {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  AgentState robot;  ///< velocity zero, goal set
  std::vector<AgentState> humans;
  double arena_half_extent = 8.0;  ///< square arena [-h, h]^2

  WorldState initial_world(double dt) const;
};

struct ScenarioParams {
  Geometry geometry = Geometry::Circle;
  double circle_radius = 6.0;
  double angular_jitter = 0.3;  ///< rad
  double radial_jitter = 0.5;   ///< m
  double square_half_extent = 6.0;
  double arena_half_extent = 8.0;
  double robot_radius = 0.4;
  double human_radius = 0.4;
  double min_gap = 0.1;  ///< extra separation over r_a + r_b
  std::size_t max_attempts = 10000;
};

/// Scenario i is drawn from derive_seed(seed, {i}), so any prefix of a
/// longer sequence is identical. Circle geometry places every agent near
/// the circle and sends it to the jittered antipode; the robot starts near
/// the bottom. Starts and goals are rejection-sampled so that every pair is
/// separated by at least r_a + r_b + min_gap. Throws std::runtime_error when
/// an agent cannot be placed within max_attempts draws.
std::vector<Scenario> generate_scenarios(std::size_t humans, std::size_t count, std::uint64_t seed,
                                         const ScenarioParams& params = {});

}  // namespace icpnav::harness
