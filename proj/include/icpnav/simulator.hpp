#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "icpnav/domain.hpp"
#include "icpnav/orca.hpp"

namespace icpnav::orca {

/// Advances every agent by one timestep. Humans follow ORCA and treat the
/// robot as a neighbor. The robot moves with `robot_override` when given,
/// otherwise with its own ORCA policy.
WorldState step(const WorldState& world, const OrcaParams& params,
                std::optional<Vec2> robot_override = std::nullopt);

/// Advances the humans only; the robot is absent from the scene and its
/// state is carried over unchanged.
WorldState step_humans_only(const WorldState& world, const OrcaParams& params);

/// Random walk applied to human goals during calibration rollouts.
struct GoalNoise {
  double probability = 0.1;  ///< per human, per step
  double magnitude = 0.5;    ///< uniform in [-magnitude, magnitude] per axis (m)
  double arena_half_extent = 8.0;
};

struct RolloutConfig {
  std::size_t episodes = 2;  ///< calibration size
  std::size_t obs_len = 5;
  std::size_t pred_len = 5;
  std::size_t pad = 0;  ///< extra frames beyond one window
  GoalNoise noise;
  std::size_t workers = 1;

  std::size_t frames() const { return obs_len + pred_len + pad; }
};

struct RolloutLog {
  Trajectory robot;
  std::vector<Trajectory> humans;
  std::uint64_t seed = 0;
  std::size_t length = 0;  ///< number of recorded frames
};

/// One sliding window: T_obs past frames and T_pred future human frames.
struct CalibrationSample {
  std::vector<Vec2> robot_past;
  std::vector<std::vector<Vec2>> humans_past;    ///< [human][T_obs]
  std::vector<std::vector<Vec2>> humans_future;  ///< [human][T_pred]
};

struct CalibrationDataset {
  std::size_t obs_len = 0;
  std::size_t pred_len = 0;
  std::vector<CalibrationSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Simulates `frames` frames starting from `world` (frame 0) with the robot
/// forced onto `plan`; after the plan ends the robot holds its final planned
/// position. Human goals are perturbed by `noise` drawn from `seed`.
RolloutLog simulate_plan_rollout(const WorldState& world, const RobotPlan& plan,
                                 const OrcaParams& params, std::size_t frames,
                                 const GoalNoise& noise, std::uint64_t seed);

/// Human-only simulation without a robot. Stops after `max_frames` frames or
/// once every human has reached its goal.
RolloutLog simulate_crowd(const WorldState& world, const OrcaParams& params,
                          std::size_t max_frames, const GoalNoise& noise, std::uint64_t seed);

/// Cuts every window of length obs_len + pred_len out of a rollout.
std::vector<CalibrationSample> extract_windows(const RolloutLog& log, std::size_t obs_len,
                                               std::size_t pred_len);

/// Decision-dependent calibration data: runs cfg.episodes rollouts of the
/// crowd reacting to `plan` and windows them. Episode e draws its randomness
/// from derive_seed(seed, {e}); samples are ordered by episode index.
CalibrationDataset rollout_calibration(const WorldState& world, const RobotPlan& plan,
                                       const OrcaParams& params, const RolloutConfig& cfg,
                                       std::uint64_t seed);

}  // namespace icpnav::orca
