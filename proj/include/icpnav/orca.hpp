#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icpnav/domain.hpp"
#include "icpnav/geometry.hpp"

namespace icpnav::orca {

struct OrcaParams {
  double neighbor_dist = 10.0;
  std::size_t max_neighbors = 10;
  double time_horizon_agent = 5.0;
  double v_max = 1.0;
  double dt = 0.25;
  double agent_radius = 0.4;
  /// Share of the avoidance effort each agent takes on (reciprocity).
  double responsibility = 0.5;

  void validate() const;
};

/// Permitted-velocity half-plane { v : dot(v - point, normal) >= 0 }.
struct HalfPlane {
  Vec2 point;
  Vec2 normal;

  /// Boundary direction with the permitted side on its left.
  Vec2 direction() const { return {normal.y, -normal.x}; }
  /// Signed violation of `v`; positive means outside the half-plane.
  double violation(const Vec2& v) const { return -dot(v - point, normal); }
  bool contains(const Vec2& v, double eps = 0.0) const { return violation(v) <= eps; }
};

/// Builds the reciprocal velocity constraints of `self` against the closest
/// `max_neighbors` agents within `neighbor_dist`. Overlapping pairs get a
/// constraint over one timestep that pushes them apart.
std::vector<HalfPlane> compute_halfplanes(const AgentState& self,
                                          std::span<const AgentState> neighbors,
                                          const OrcaParams& params);

/// Velocity in the disk of radius v_max closest to `preferred` that satisfies
/// every constraint. When the constraints are jointly infeasible, returns the
/// velocity that minimizes the largest violation instead.
Vec2 solve_velocity_lp(std::span<const HalfPlane> constraints, const Vec2& preferred, double v_max);

/// Preferred velocity toward `goal` at speed min(v_max, distance / dt).
Vec2 preferred_velocity(const AgentState& agent, double v_max, double dt);

}  // namespace icpnav::orca
