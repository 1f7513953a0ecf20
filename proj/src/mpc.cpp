#include "icpnav/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "barrier_qp.hpp"

namespace icpnav::mpc {

namespace {

struct Exclusion {
  std::size_t step;  // tau, 1-based
  Vec2 center;
  double radius;
};

Eigen::VectorXd pack(const std::vector<Vec2>& velocities) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(2 * velocities.size()));
  for (std::size_t k = 0; k < velocities.size(); ++k) {
    u[static_cast<Eigen::Index>(2 * k)] = velocities[k].x;
    u[static_cast<Eigen::Index>(2 * k + 1)] = velocities[k].y;
  }
  return u;
}

std::vector<Vec2> unpack(const Eigen::VectorXd& u) {
  std::vector<Vec2> out(static_cast<std::size_t>(u.size() / 2));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = {u[static_cast<Eigen::Index>(2 * k)], u[static_cast<Eigen::Index>(2 * k + 1)]};
  }
  return out;
}

std::vector<Vec2> straight_line_velocities(const Vec2& start, const Vec2& goal, const MpcConfig& cfg) {
  std::vector<Vec2> v;
  v.reserve(cfg.horizon);
  Vec2 x = start;
  for (std::size_t k = 0; k < cfg.horizon; ++k) {
    const Vec2 to_goal = goal - x;
    const double dist = to_goal.norm();
    const Vec2 vk = dist > 0.0 ? to_goal * (std::min(cfg.v_max, dist / cfg.dt) / dist) : Vec2{};
    v.push_back(vk);
    x += vk * cfg.dt;
  }
  return v;
}

// Quadratic part of the objective in the stacked velocity vector
// u = (vx0, vy0, vx1, vy1, ...).
void build_quadratic(const Vec2& start, const Vec2& goal, const RobotPlan* prev, const MpcConfig& cfg,
                     Eigen::MatrixXd& P, Eigen::VectorXd& q) {
  const auto T = static_cast<Eigen::Index>(cfg.horizon);
  // S maps per-axis velocities to positions x^0..x^T relative to the start.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(T + 1, T);
  for (Eigen::Index k = 1; k <= T; ++k) S.row(k).head(k).setOnes();
  S *= cfg.dt;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(T - 1, 0), T);
  for (Eigen::Index k = 0; k + 1 < T; ++k) {
    D(k, k) = -1.0;
    D(k, k + 1) = 1.0;
  }
  const double w_reg = prev ? cfg.w_reg : 0.0;
  const Eigen::MatrixXd axis_P = 2.0 * (cfg.w_goal + w_reg) * S.transpose() * S + 2.0 * cfg.w_jerk * D.transpose() * D;

  P = Eigen::MatrixXd::Zero(2 * T, 2 * T);
  q = Eigen::VectorXd::Zero(2 * T);
  for (int axis = 0; axis < 2; ++axis) {
    const double x0 = axis == 0 ? start.x : start.y;
    const double g = axis == 0 ? goal.x : goal.y;
    Eigen::VectorXd lin = 2.0 * cfg.w_goal * S.transpose() * Eigen::VectorXd::Constant(T + 1, x0 - g);
    if (prev) {
      Eigen::VectorXd offset(T + 1);
      for (Eigen::Index k = 0; k <= T; ++k) {
        const Vec2& p = prev->positions[static_cast<std::size_t>(k)];
        offset[k] = x0 - (axis == 0 ? p.x : p.y);
      }
      lin += 2.0 * w_reg * S.transpose() * offset;
    }
    for (Eigen::Index r = 0; r < T; ++r) {
      q[2 * r + axis] = lin[r];
      for (Eigen::Index c = 0; c < T; ++c) P(2 * r + axis, 2 * c + axis) = axis_P(r, c);
    }
  }
}

Vec2 separating_normal(const Vec2& iterate, const Vec2& center, const Vec2& start, const Vec2& goal) {
  Vec2 n = iterate - center;
  if (n.squared_norm() > 1e-24) return normalized(n);
  n = start - center;
  if (n.squared_norm() > 1e-24) return normalized(n);
  n = perp(goal - start);
  return n.squared_norm() > 1e-24 ? normalized(n) : Vec2{0.0, 1.0};
}

double max_violation(const std::vector<Vec2>& positions, const std::vector<Exclusion>& discs) {
  double worst = 0.0;
  for (const auto& d : discs) {
    worst = std::max(worst, d.radius - euclidean_distance(positions[d.step], d.center));
  }
  return worst;
}

}  // namespace

void MpcConfig::validate() const {
  if (pred_len < 1 || horizon < pred_len) throw std::invalid_argument("MpcConfig: need T_mpc >= T_pred >= 1");
  if (!(dt > 0.0) || !(v_max > 0.0)) throw std::invalid_argument("MpcConfig: dt and v_max must be positive");
  if (w_goal < 0.0 || w_jerk < 0.0 || w_reg < 0.0) throw std::invalid_argument("MpcConfig: weights must be >= 0");
  if (!(robot_radius > 0.0) || !(human_radius > 0.0)) throw std::invalid_argument("MpcConfig: radii must be positive");
}

RobotPlan integrate(const Vec2& start, std::vector<Vec2> velocities, double dt) {
  RobotPlan p;
  p.positions.reserve(velocities.size() + 1);
  p.positions.push_back(start);
  for (const auto& v : velocities) p.positions.push_back(p.positions.back() + v * dt);
  p.velocities = std::move(velocities);
  return p;
}

double objective(const RobotPlan& plan, const Vec2& goal, const RobotPlan* prev, const MpcConfig& cfg) {
  double f = 0.0;
  for (const auto& x : plan.positions) f += cfg.w_goal * (x - goal).squared_norm();
  for (std::size_t k = 0; k + 1 < plan.velocities.size(); ++k) {
    f += cfg.w_jerk * (plan.velocities[k + 1] - plan.velocities[k]).squared_norm();
  }
  if (prev) {
    for (std::size_t k = 0; k < plan.positions.size(); ++k) {
      f += cfg.w_reg * (plan.positions[k] - prev->positions[k]).squared_norm();
    }
  }
  return f;
}

RobotPlan plan(const WorldState& state, const Vec2& goal, const HorizonPrediction& predictions,
               const conformal::ConformalRadii& radii, const RobotPlan* prev_plan, const MpcConfig& cfg) {
  cfg.validate();
  const Vec2 start = state.robot.position;
  if (prev_plan && prev_plan->horizon() != cfg.horizon) {
    throw std::invalid_argument("mpc::plan: previous plan horizon " + std::to_string(prev_plan->horizon()) +
                                " does not match T_mpc " + std::to_string(cfg.horizon));
  }
  if (predictions.human_count() > 0) {
    if (!predictions.is_rectangular(predictions.horizon()) || predictions.horizon() < cfg.pred_len) {
      throw std::invalid_argument("mpc::plan: predictions must cover T_pred steps for every human");
    }
    if (radii.radii.size() < cfg.pred_len) throw std::invalid_argument("mpc::plan: radii must cover T_pred steps");
  }

  // Discs that can bind within reach of the robot; those that cannot be
  // escaped from any reachable position are dropped and counted.
  std::vector<Exclusion> discs;
  int dropped = 0;
  const double base = cfg.robot_radius + cfg.human_radius;
  for (std::size_t i = 0; i < predictions.human_count(); ++i) {
    for (std::size_t tau = 1; tau <= cfg.pred_len; ++tau) {
      const Exclusion e{tau, predictions.steps[i][tau - 1], base + radii.radii[tau - 1]};
      const double reach = cfg.v_max * cfg.dt * static_cast<double>(tau);
      const double dist = euclidean_distance(start, e.center);
      if (dist - reach > e.radius + 1e-9) continue;
      if (dist + reach <= e.radius) {
        ++dropped;
        continue;
      }
      discs.push_back(e);
    }
  }

  detail::ElasticQp qp;
  build_quadratic(start, goal, prev_plan, cfg, qp.P, qp.q);
  qp.v_max = cfg.v_max;
  qp.penalty = cfg.penalty;

  std::vector<Vec2> velocities = prev_plan ? prev_plan->velocities : straight_line_velocities(start, goal, cfg);
  RobotPlan current = integrate(start, velocities, cfg.dt);

  int iterations = 0;
  while (iterations < static_cast<int>(cfg.max_outer_iterations)) {
    ++iterations;
    qp.a.clear();
    qp.b.clear();
    for (const auto& d : discs) {
      const Vec2 n = separating_normal(current.positions[d.step], d.center, start, goal);
      Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * cfg.horizon));
      for (std::size_t l = 0; l < d.step; ++l) {
        a[static_cast<Eigen::Index>(2 * l)] = cfg.dt * n.x;
        a[static_cast<Eigen::Index>(2 * l + 1)] = cfg.dt * n.y;
      }
      qp.a.push_back(std::move(a));
      qp.b.push_back(dot(n, start - d.center) - d.radius);
    }

    const auto sol = detail::solve_elastic_qp(qp, pack(current.velocities), cfg.barrier_gap);
    RobotPlan next = integrate(start, unpack(sol.u), cfg.dt);
    double displacement = 0.0;
    for (std::size_t k = 0; k < next.positions.size(); ++k) {
      displacement = std::max(displacement, euclidean_distance(next.positions[k], current.positions[k]));
    }
    current = std::move(next);

    if (displacement < cfg.displacement_tol) {
      if (max_violation(current.positions, discs) > cfg.collision_tol && qp.penalty < cfg.max_penalty) {
        qp.penalty *= 10.0;
        continue;
      }
      break;
    }
  }

  const ResidualReport report = check_plan(current, start, predictions, radii, cfg);
  current.outer_iterations = iterations;
  current.dropped_constraints = dropped;
  current.objective = objective(current, goal, prev_plan, cfg);
  current.max_residual = std::max({report.initial, report.dynamics, report.speed, report.collision});
  current.status = report.within_bounds(1e-6, cfg.speed_tol, cfg.collision_tol) ? PlanStatus::Feasible
                                                                                  : PlanStatus::Infeasible;
  return current;
}

ResidualReport check_plan(const RobotPlan& plan, const Vec2& start, const HorizonPrediction& predictions,
                          const conformal::ConformalRadii& radii, const MpcConfig& cfg) {
  ResidualReport r;
  if (plan.positions.size() != plan.velocities.size() + 1) {
    throw std::invalid_argument("check_plan: positions must be one longer than velocities");
  }
  r.initial = euclidean_distance(plan.positions.front(), start);
  for (std::size_t k = 0; k < plan.velocities.size(); ++k) {
    const Vec2 expected = plan.positions[k] + plan.velocities[k] * cfg.dt;
    r.dynamics = std::max(r.dynamics, euclidean_distance(plan.positions[k + 1], expected));
    r.speed = std::max(r.speed, plan.velocities[k].norm() - cfg.v_max);
    ++r.dynamics_checks;
  }
  const double base = cfg.robot_radius + cfg.human_radius;
  const std::size_t steps = std::min(cfg.pred_len, plan.velocities.size());
  for (std::size_t i = 0; i < predictions.human_count(); ++i) {
    for (std::size_t tau = 1; tau <= steps; ++tau) {
      const double clearance = euclidean_distance(plan.positions[tau], predictions.steps[i][tau - 1]);
      r.collision = std::max(r.collision, base + radii.radii[tau - 1] - clearance);
      ++r.collision_checks;
    }
  }
  return r;
}

}  // namespace icpnav::mpc
