#include "icpnav/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icpnav/random.hpp"

namespace icpnav::baselines {

OffcpRadii offcp_calibrate(const ScenarioSource& scenarios, const orca::OrcaParams& params,
                           const OffcpConfig& cfg, const TrajectoryPredictor& predictor, std::uint64_t seed) {
  if (cfg.episodes == 0) throw std::invalid_argument("offcp_calibrate: need at least one episode");
  orca::CalibrationDataset dataset{cfg.obs_len, cfg.pred_len, {}};
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const WorldState start = scenarios(e);
    const auto log = orca::simulate_crowd(start, params, cfg.max_frames, cfg.noise, derive_seed(seed, {e}));
    auto samples = orca::extract_windows(log, cfg.obs_len, cfg.pred_len);
    for (auto& s : samples) {
      // No robot in this simulation; the predictor still receives a robot track.
      s.robot_past.assign(cfg.obs_len, start.robot.position);
      dataset.samples.push_back(std::move(s));
    }
  }
  if (dataset.empty()) throw std::invalid_argument("offcp_calibrate: episodes produced no calibration windows");
  const auto scores = conformal::score_dataset(dataset, predictor);
  return {conformal::conformal_radii(scores, cfg.alpha, cfg.rule)};
}

AcpState AcpState::make(AcpVariant variant, std::size_t pred_len, double target_alpha) {
  AcpState s;
  s.variant = variant;
  s.pred_len = pred_len;
  s.target_alpha = target_alpha;
  s.alpha = target_alpha;
  s.learning_rate = variant == AcpVariant::Averaged ? 0.05 : 0.01;
  s.radii = acp_radii(s);
  return s;
}

conformal::ConformalRadii acp_radii(const AcpState& state) {
  std::vector<std::vector<double>> pooled(state.pred_len);
  for (const auto& obs : state.window) {
    for (const auto& human : obs.errors) {
      for (std::size_t tau = 0; tau < state.pred_len && tau < human.size(); ++tau) {
        pooled[tau].push_back(human[tau]);
      }
    }
  }
  conformal::ConformalRadii out;
  out.alpha = state.alpha;
  out.sample_count = pooled.empty() ? 0 : pooled.front().size();
  if (out.sample_count < state.min_samples) {
    out.radii.assign(state.pred_len, state.fallback_radius);
    return out;
  }
  const double n = static_cast<double>(out.sample_count);
  const double target = std::ceil((n + 1.0) * (1.0 - state.alpha) - 1e-9);
  const auto q = static_cast<std::size_t>(std::clamp(target, 1.0, n));
  for (auto& step : pooled) {
    std::nth_element(step.begin(), step.begin() + static_cast<std::ptrdiff_t>(q - 1), step.end());
    out.radii.push_back(step[q - 1]);
  }
  return out;
}

void acp_observe(AcpState& state, AcpObservation obs) {
  state.window.push_back(std::move(obs));
  while (state.window.size() > state.window_len) state.window.pop_front();
}

AcpState acp_update(AcpState state, const std::vector<bool>& covered) {
  if (covered.empty()) throw std::invalid_argument("acp_update: need at least one human");
  const auto misses = static_cast<double>(std::count(covered.begin(), covered.end(), false));
  double gradient = 0.0;
  if (state.variant == AcpVariant::Averaged) {
    gradient = state.target_alpha - misses / static_cast<double>(covered.size());
  } else {
    gradient = state.target_alpha - (misses > 0.0 ? 1.0 : 0.0);
  }
  state.alpha = std::clamp(state.alpha + state.learning_rate * gradient, AcpState::alpha_min, AcpState::alpha_max);
  state.radii = acp_radii(state);
  state.warmup_fallback = state.radii.sample_count < state.min_samples;
  return state;
}

Vec2 orca_robot_policy(const WorldState& world, const Vec2& goal, const orca::OrcaParams& params) {
  AgentState robot = world.robot;
  robot.goal = goal;
  const auto planes = orca::compute_halfplanes(robot, world.humans, params);
  return orca::solve_velocity_lp(planes, orca::preferred_velocity(robot, params.v_max, params.dt), params.v_max);
}

}  // namespace icpnav::baselines
