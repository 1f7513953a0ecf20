#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "icpnav/conformal.hpp"
#include "icpnav/orca.hpp"
#include "icpnav/predictor.hpp"
#include "icpnav/simulator.hpp"

namespace icpnav::baselines {

// ---------------------------------------------------------------------------
// Offline conformal prediction
// ---------------------------------------------------------------------------

/// Radii calibrated once on robot-free crowd simulation and never updated.
struct OffcpRadii {
  conformal::ConformalRadii radii;
};

struct OffcpConfig {
  std::size_t episodes = 8;
  double alpha = 0.05;
  std::size_t obs_len = 5;
  std::size_t pred_len = 5;
  std::size_t max_frames = 200;
  /// Goal noise belongs to ICP's calibration simulator; robot-free OffCP
  /// episodes run the plain crowd by default.
  orca::GoalNoise noise{0.0, 0.5, 8.0};
  conformal::QuantileRule rule = conformal::QuantileRule::FiniteSample;
};

/// Produces the initial world of calibration episode `index`.
using ScenarioSource = std::function<WorldState(std::size_t index)>;

OffcpRadii offcp_calibrate(const ScenarioSource& scenarios, const orca::OrcaParams& params,
                           const OffcpConfig& cfg, const TrajectoryPredictor& predictor, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Adaptive conformal prediction
// ---------------------------------------------------------------------------

enum class AcpVariant { Averaged, WorstCase };

/// Realized errors of one past prediction, with the radii it was planned with.
struct AcpObservation {
  std::vector<std::vector<double>> errors;  ///< [human][tau - 1]
  std::vector<double> radii;
};

struct AcpState {
  AcpVariant variant = AcpVariant::Averaged;
  double alpha = 0.05;  ///< alpha_t, kept within [alpha_min, alpha_max]
  double target_alpha = 0.05;
  double learning_rate = 0.05;
  std::size_t window_len = 30;
  std::size_t min_samples = 5;
  double fallback_radius = 0.5;
  std::size_t pred_len = 5;
  std::deque<AcpObservation> window;
  conformal::ConformalRadii radii;
  bool warmup_fallback = true;  ///< radii currently come from the fallback value

  static constexpr double alpha_min = 1e-4;
  static constexpr double alpha_max = 1.0 - 1e-4;

  static AcpState make(AcpVariant variant, std::size_t pred_len, double target_alpha = 0.05);
};

/// Per-human gradient alpha* - 1[miss]; ACP-A averages over humans, ACP-W
/// uses alpha* - 1[any miss]. Clamps alpha and recomputes radii from the
/// window at the new alpha. `covered[i]` says whether human i stayed inside
/// its radii over the whole horizon.
AcpState acp_update(AcpState state, const std::vector<bool>& covered);

/// Appends an observation to the window (dropping the oldest beyond W).
void acp_observe(AcpState& state, AcpObservation obs);

/// Radii from the window's pooled scores at the state's alpha. When the
/// requested rank exceeds the sample count the largest score is used.
conformal::ConformalRadii acp_radii(const AcpState& state);

// ---------------------------------------------------------------------------
// ORCA robot
// ---------------------------------------------------------------------------

/// Robot velocity from the same ORCA step the humans use.
Vec2 orca_robot_policy(const WorldState& world, const Vec2& goal, const orca::OrcaParams& params);

}  // namespace icpnav::baselines
