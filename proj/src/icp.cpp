#include "icpnav/icp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "icpnav/random.hpp"

namespace icpnav::icp {

void IcpConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("IcpConfig: iteration count must be >= 1");
  if (rollout.episodes < 1) throw std::invalid_argument("IcpConfig: calibration size must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("IcpConfig: alpha must lie in (0, 1)");
  if (tol_plan < 0.0 || tol_radii < 0.0) throw std::invalid_argument("IcpConfig: tolerances must be >= 0");
}

bool converged(const RobotPlan& plan_a, const RobotPlan& plan_b, const conformal::ConformalRadii& radii_a,
               const conformal::ConformalRadii& radii_b, double tol_plan, double tol_radii) {
  if (plan_a.positions.size() != plan_b.positions.size() || radii_a.radii.size() != radii_b.radii.size()) {
    throw std::invalid_argument("converged: length mismatch");
  }
  double plan_gap = 0.0;
  for (std::size_t k = 0; k < plan_a.positions.size(); ++k) {
    plan_gap = std::max(plan_gap, euclidean_distance(plan_a.positions[k], plan_b.positions[k]));
  }
  double radii_gap = 0.0;
  for (std::size_t k = 0; k < radii_a.radii.size(); ++k) {
    radii_gap = std::max(radii_gap, std::fabs(radii_a.radii[k] - radii_b.radii[k]));
  }
  return plan_gap <= tol_plan && radii_gap <= tol_radii;
}

IcpStepResult icp_step(const WorldState& world, const ObservationHistory& history, const Vec2& goal,
                       const IcpConfig& cfg, const IcpModules& modules, std::uint64_t episode_seed) {
  cfg.validate();
  if (modules.predictor == nullptr) throw std::invalid_argument("icp_step: no predictor");
  if (cfg.exec_steps() > modules.mpc.horizon) throw std::invalid_argument("icp_step: T_exec exceeds T_mpc");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t pred_len = modules.mpc.pred_len;

  IcpStepResult result;
  IcpStepDiagnostics& diag = result.diagnostics;
  const ObservationWindow obs = history.window(cfg.rollout.obs_len);
  result.predictions = modules.predictor->predict(obs, pred_len);

  auto radii = conformal::ConformalRadii::zeros(pred_len, cfg.alpha);
  RobotPlan plan = mpc::plan(world, goal, result.predictions, radii, nullptr, modules.mpc);
  diag.radii.push_back(radii);
  diag.plans.push_back(plan);
  diag.feasible.push_back(plan.feasible());

  // Most recent feasible iterate; -1 while none exists.
  long cached = plan.feasible() ? 0 : -1;

  if (!world.humans.empty()) {
    for (std::size_t k = 1; k <= cfg.iterations; ++k) {
      const std::size_t anchor = cached >= 0 ? static_cast<std::size_t>(cached) : diag.plans.size() - 1;
      const RobotPlan& conditioning = diag.plans[anchor];

      const auto seed = derive_seed(episode_seed, {static_cast<std::uint64_t>(world.time_step), k});
      const auto dataset = orca::rollout_calibration(world, conditioning, modules.orca, cfg.rollout, seed);
      const auto scores = conformal::score_dataset(dataset, *modules.predictor);
      radii = conformal::conformal_radii(scores, cfg.alpha, cfg.rule);
      ++diag.calibration_rounds;

      RobotPlan next = mpc::plan(world, goal, result.predictions, radii, &conditioning, modules.mpc);
      const bool done = converged(next, conditioning, radii, diag.radii[anchor], cfg.tol_plan, cfg.tol_radii);
      diag.radii.push_back(radii);
      diag.plans.push_back(std::move(next));
      diag.feasible.push_back(diag.plans.back().feasible());
      if (diag.feasible.back()) cached = static_cast<long>(diag.plans.size() - 1);

      if (done) {
        diag.converged = true;
        if (cfg.early_stop) break;
      }
    }
  }

  result.radii = diag.radii.back();
  const std::size_t n_exec = cfg.exec_steps();
  if (cached >= 0) {
    diag.executed_plan_index = static_cast<std::size_t>(cached);
    result.executed_plan = diag.plans[diag.executed_plan_index];
    if (diag.executed_plan_index + 1 != diag.plans.size()) result.executed_plan.status = PlanStatus::CachedFallback;
    result.actions.assign(result.executed_plan.velocities.begin(),
                          result.executed_plan.velocities.begin() + static_cast<std::ptrdiff_t>(n_exec));
  } else {
    diag.zero_velocity_fallback = true;
    diag.executed_plan_index = diag.plans.size() - 1;
    result.executed_plan = diag.plans.back();
    result.actions.assign(n_exec, Vec2{});
  }
  diag.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace icpnav::icp
