#pragma once

#include <cstdint>
#include <vector>

#include "icpnav/conformal.hpp"
#include "icpnav/mpc.hpp"
#include "icpnav/predictor.hpp"
#include "icpnav/simulator.hpp"

namespace icpnav::icp {

enum class ExecutionScheme { PredStep, SingleStep };

struct IcpConfig {
  std::size_t iterations = 3;  ///< K (NI)
  double alpha = 0.05;
  ExecutionScheme exec = ExecutionScheme::PredStep;
  double tol_plan = 0.01;   ///< m
  double tol_radii = 0.01;  ///< m
  bool early_stop = true;
  conformal::QuantileRule rule = conformal::QuantileRule::FiniteSample;
  /// Calibration rollouts; `episodes` is the calibration size CS.
  orca::RolloutConfig rollout;

  std::size_t exec_steps() const { return exec == ExecutionScheme::PredStep ? rollout.pred_len : 1; }
  void validate() const;
};

/// Everything ICP plans with; the predictor is borrowed.
struct IcpModules {
  const TrajectoryPredictor* predictor = nullptr;
  orca::OrcaParams orca;
  mpc::MpcConfig mpc;
};

struct IcpStepDiagnostics {
  std::vector<conformal::ConformalRadii> radii;  ///< index 0 is the all-zero start
  std::vector<RobotPlan> plans;                  ///< plans[k] was solved with radii[k]
  std::vector<bool> feasible;
  std::size_t calibration_rounds = 0;
  bool converged = false;
  bool zero_velocity_fallback = false;
  std::size_t executed_plan_index = 0;
  double wall_time_s = 0.0;
};

struct IcpStepResult {
  std::vector<Vec2> actions;  ///< first T_exec velocities of the executed plan
  HorizonPrediction predictions;
  conformal::ConformalRadii radii;  ///< radii from the last calibration round
  RobotPlan executed_plan;
  IcpStepDiagnostics diagnostics;
};

/// Non-strict comparison of consecutive iterates: max positionwise plan gap
/// <= tol_plan and max per-step radii gap <= tol_radii.
bool converged(const RobotPlan& plan_a, const RobotPlan& plan_b, const conformal::ConformalRadii& radii_a,
               const conformal::ConformalRadii& radii_b, double tol_plan, double tol_radii);

/// One planning cycle: predict, plan with zero radii, then alternate
/// plan-conditioned calibration rollouts, conformal radii and regularized
/// re-planning. Rollout randomness for round k comes from
/// derive_seed(episode_seed, {world.time_step, k}).
IcpStepResult icp_step(const WorldState& world, const ObservationHistory& history, const Vec2& goal,
                       const IcpConfig& cfg, const IcpModules& modules, std::uint64_t episode_seed);

}  // namespace icpnav::icp
