#pragma once

#include <cstddef>
#include <optional>

#include "icpnav/conformal.hpp"
#include "icpnav/domain.hpp"

namespace icpnav::mpc {

struct MpcConfig {
  std::size_t horizon = 5;   ///< T_mpc
  std::size_t pred_len = 5;  ///< T_pred; collision constraints span 1..T_pred
  double dt = 0.25;
  double v_max = 1.0;
  double w_goal = 1.0;
  double w_jerk = 5.0;
  double w_reg = 0.5;
  double robot_radius = 0.4;
  double human_radius = 0.4;

  std::size_t max_outer_iterations = 20;
  double displacement_tol = 1e-4;  ///< SCP stops when the plan moves less (m)
  double collision_tol = 1e-4;     ///< allowed collision residual for Feasible (m)
  double speed_tol = 1e-6;
  double penalty = 1e4;  ///< initial weight on collision slack
  double max_penalty = 1e8;
  double barrier_gap = 1e-10;

  void validate() const;
};

struct ResidualReport {
  double initial = 0.0;    ///< |x^0 - robot position| (m)
  double dynamics = 0.0;   ///< max |x^{k+1} - x^k - v^k dt| (m)
  double speed = 0.0;      ///< max(0, |v^k| - v_max) (m/s)
  double collision = 0.0;  ///< max(0, r_r + r_h + r_cp - clearance) (m)
  std::size_t dynamics_checks = 0;
  std::size_t collision_checks = 0;

  bool within_bounds(double dyn_tol = 1e-6, double speed_tol = 1e-6, double collision_tol = 1e-4) const {
    return initial <= dyn_tol && dynamics <= dyn_tol && speed <= speed_tol && collision <= collision_tol;
  }
};

/// Plan objective: goal-reaching, velocity-change and (when `prev` is given)
/// proximal terms, evaluated on the plan's positions and velocities.
double objective(const RobotPlan& plan, const Vec2& goal, const RobotPlan* prev, const MpcConfig& cfg);

/// Solves the collision-constrained planning problem by sequential
/// convexification. Each human disc is replaced by its supporting half-plane
/// at the current iterate, which is conservative: an iterate satisfying the
/// convexified constraints satisfies the true ones. Returns the best iterate
/// labeled Infeasible when no feasible point is found.
RobotPlan plan(const WorldState& state, const Vec2& goal, const HorizonPrediction& predictions,
               const conformal::ConformalRadii& radii, const RobotPlan* prev_plan, const MpcConfig& cfg);

/// Independent residual check of every constraint family.
ResidualReport check_plan(const RobotPlan& plan, const Vec2& start, const HorizonPrediction& predictions,
                          const conformal::ConformalRadii& radii, const MpcConfig& cfg);

/// Rebuilds positions from velocities by forward integration.
RobotPlan integrate(const Vec2& start, std::vector<Vec2> velocities, double dt);

}  // namespace icpnav::mpc
