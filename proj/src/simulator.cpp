#include "icpnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "icpnav/parallel.hpp"
#include "icpnav/random.hpp"

namespace icpnav::orca {

namespace {

enum class RobotMode { Orca, Override, Absent };

// Nudges the later-indexed agent of any exactly coincident pair by 1e-3 m in
// a direction seeded by (time step, pair).
void separate_coincident(std::vector<AgentState*>& agents, int time_step) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if ((agents[i]->position - agents[j]->position).squared_norm() > 1e-24) continue;
      Rng rng(derive_seed(static_cast<std::uint64_t>(time_step), {i, j}));
      std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
      const double a = angle(rng);
      agents[j]->position += Vec2{std::cos(a), std::sin(a)} * 1e-3;
    }
  }
}

WorldState advance(const WorldState& world, const OrcaParams& params, RobotMode mode,
                   std::optional<Vec2> robot_override) {
  WorldState next = world;

  std::vector<AgentState*> movers;
  if (mode != RobotMode::Absent) movers.push_back(&next.robot);
  for (auto& h : next.humans) movers.push_back(&h);
  separate_coincident(movers, world.time_step);

  std::vector<AgentState> snapshot;
  snapshot.reserve(movers.size());
  for (const auto* a : movers) snapshot.push_back(*a);

  std::vector<Vec2> new_velocity(snapshot.size());
  std::vector<AgentState> others;
  others.reserve(snapshot.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    const bool is_robot = mode != RobotMode::Absent && i == 0;
    if (is_robot && mode == RobotMode::Override) {
      new_velocity[i] = *robot_override;
      continue;
    }
    others.clear();
    for (std::size_t j = 0; j < snapshot.size(); ++j) {
      if (j != i) others.push_back(snapshot[j]);
    }
    const auto planes = compute_halfplanes(snapshot[i], others, params);
    const Vec2 pref = preferred_velocity(snapshot[i], params.v_max, params.dt);
    new_velocity[i] = solve_velocity_lp(planes, pref, params.v_max);
  }

  for (std::size_t i = 0; i < movers.size(); ++i) {
    movers[i]->velocity = new_velocity[i];
    movers[i]->position += new_velocity[i] * params.dt;
  }
  next.time_step = world.time_step + 1;
  return next;
}

void perturb_goals(WorldState& world, const GoalNoise& noise, Rng& rng) {
  if (noise.probability <= 0.0) return;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> offset(-noise.magnitude, noise.magnitude);
  const double a = noise.arena_half_extent;
  for (auto& h : world.humans) {
    if (unit(rng) >= noise.probability) continue;
    const double dx = offset(rng);
    const double dy = offset(rng);
    h.goal.x = std::clamp(h.goal.x + dx, -a, a);
    h.goal.y = std::clamp(h.goal.y + dy, -a, a);
  }
}

RolloutLog start_log(const WorldState& world, std::uint64_t seed) {
  RolloutLog log;
  log.seed = seed;
  log.robot = Trajectory{world.time_step, {world.robot.position}, world.dt};
  log.humans.reserve(world.humans.size());
  for (const auto& h : world.humans) {
    log.humans.push_back(Trajectory{world.time_step, {h.position}, world.dt});
  }
  log.length = 1;
  return log;
}

void record(RolloutLog& log, const WorldState& world) {
  log.robot.positions.push_back(world.robot.position);
  for (std::size_t i = 0; i < world.humans.size(); ++i) {
    log.humans[i].positions.push_back(world.humans[i].position);
  }
  ++log.length;
}

}  // namespace

WorldState step(const WorldState& world, const OrcaParams& params, std::optional<Vec2> robot_override) {
  return advance(world, params, robot_override ? RobotMode::Override : RobotMode::Orca, robot_override);
}

WorldState step_humans_only(const WorldState& world, const OrcaParams& params) {
  return advance(world, params, RobotMode::Absent, std::nullopt);
}

RolloutLog simulate_plan_rollout(const WorldState& world, const RobotPlan& plan,
                                 const OrcaParams& params, std::size_t frames,
                                 const GoalNoise& noise, std::uint64_t seed) {
  if (plan.positions.empty()) throw std::invalid_argument("simulate_plan_rollout: empty plan");
  Rng rng(seed);
  WorldState current = world;
  current.robot.position = plan.positions.front();
  RolloutLog log = start_log(current, seed);

  for (std::size_t k = 0; k + 1 < frames; ++k) {
    perturb_goals(current, noise, rng);
    const std::size_t target = std::min(k + 1, plan.positions.size() - 1);
    const Vec2 velocity = k < plan.velocities.size() ? plan.velocities[k] : Vec2{};
    current = step(current, params, velocity);
    // Forced exactly onto the plan; integration round-off must not leak in.
    current.robot.position = plan.positions[target];
    record(log, current);
  }
  return log;
}

RolloutLog simulate_crowd(const WorldState& world, const OrcaParams& params,
                          std::size_t max_frames, const GoalNoise& noise, std::uint64_t seed) {
  Rng rng(seed);
  WorldState current = world;
  RolloutLog log = start_log(current, seed);
  auto all_home = [&] {
    return std::all_of(current.humans.begin(), current.humans.end(), [](const AgentState& h) {
      return (h.goal - h.position).squared_norm() < 1e-12;
    });
  };
  while (log.length < max_frames && !all_home()) {
    perturb_goals(current, noise, rng);
    current = step_humans_only(current, params);
    record(log, current);
  }
  return log;
}

std::vector<CalibrationSample> extract_windows(const RolloutLog& log, std::size_t obs_len,
                                               std::size_t pred_len) {
  std::vector<CalibrationSample> samples;
  const std::size_t window = obs_len + pred_len;
  if (log.length < window) return samples;
  const std::size_t count = log.length - window + 1;
  samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    CalibrationSample sample;
    if (!log.robot.positions.empty()) {
      const auto& rp = log.robot.positions;
      sample.robot_past.assign(rp.begin() + static_cast<std::ptrdiff_t>(s),
                               rp.begin() + static_cast<std::ptrdiff_t>(s + obs_len));
    }
    for (const auto& h : log.humans) {
      const auto begin = h.positions.begin() + static_cast<std::ptrdiff_t>(s);
      sample.humans_past.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(obs_len));
      sample.humans_future.emplace_back(begin + static_cast<std::ptrdiff_t>(obs_len),
                                        begin + static_cast<std::ptrdiff_t>(window));
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

CalibrationDataset rollout_calibration(const WorldState& world, const RobotPlan& plan,
                                       const OrcaParams& params, const RolloutConfig& cfg,
                                       std::uint64_t seed) {
  if (cfg.episodes == 0) {
    throw std::invalid_argument("rollout_calibration: zero episodes give an empty calibration set");
  }
  if (cfg.obs_len == 0 || cfg.pred_len == 0) {
    throw std::invalid_argument("rollout_calibration: window lengths must be positive");
  }
  std::vector<std::vector<CalibrationSample>> per_episode(cfg.episodes);
  parallel_for(cfg.episodes, cfg.workers, [&](std::size_t e) {
    const auto log = simulate_plan_rollout(world, plan, params, cfg.frames(), cfg.noise,
                                           derive_seed(seed, {e}));
    per_episode[e] = extract_windows(log, cfg.obs_len, cfg.pred_len);
  });

  CalibrationDataset dataset{cfg.obs_len, cfg.pred_len, {}};
  for (auto& samples : per_episode) {
    for (auto& s : samples) dataset.samples.push_back(std::move(s));
  }
  return dataset;
}

}  // namespace icpnav::orca
