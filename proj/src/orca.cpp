#include "icpnav/orca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icpnav/random.hpp"

namespace icpnav::orca {

namespace {

constexpr double kEpsilon = 1e-9;

// Boundary line form used by the incremental LP: permitted side is left of
// `direction` through `point`.
struct Line {
  Vec2 point;
  Vec2 direction;
};

Line to_line(const HalfPlane& h) { return {h.point, h.direction()}; }

HalfPlane to_halfplane(const Line& l) { return {l.point, perp(l.direction)}; }

// Optimizes along line `line_no` subject to lines [0, line_no) and the disk.
bool solve_on_line(std::span<const Line> lines, std::size_t line_no, double radius,
                   const Vec2& opt, bool direction_opt, Vec2& result) {
  const Line& line = lines[line_no];
  const double dot_product = dot(line.point, line.direction);
  const double discriminant = dot_product * dot_product + radius * radius - line.point.squared_norm();
  if (discriminant < 0.0) return false;

  const double sqrt_disc = std::sqrt(discriminant);
  double t_left = -dot_product - sqrt_disc;
  double t_right = -dot_product + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denominator = cross(line.direction, lines[i].direction);
    const double numerator = cross(lines[i].direction, line.point - lines[i].point);
    if (std::fabs(denominator) <= kEpsilon) {
      if (numerator < 0.0) return false;
      continue;
    }
    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = dot(opt, line.direction) > 0.0 ? line.point + t_right * line.direction
                                            : line.point + t_left * line.direction;
  } else {
    const double t = std::clamp(dot(line.direction, opt - line.point), t_left, t_right);
    result = line.point + t * line.direction;
  }
  return true;
}

// Returns the index of the first line that could not be satisfied, or
// lines.size() on success.
std::size_t solve_in_disk(std::span<const Line> lines, double radius, const Vec2& opt,
                          bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else if (opt.squared_norm() > radius * radius) {
    result = normalized(opt) * radius;
  } else {
    result = opt;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cross(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 previous = result;
      if (!solve_on_line(lines, i, radius, opt, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Back-up program: minimizes the largest violation over lines [begin, end).
void minimize_max_violation(std::span<const Line> lines, std::size_t begin, double radius,
                            Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (cross(lines[i].direction, lines[i].point - result) <= distance) continue;

    std::vector<Line> projected;
    projected.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      Line line;
      const double determinant = cross(lines[i].direction, lines[j].direction);
      if (std::fabs(determinant) <= kEpsilon) {
        if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (cross(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                         lines[i].direction;
      }
      line.direction = normalized(lines[j].direction - lines[i].direction);
      projected.push_back(line);
    }

    const Vec2 previous = result;
    if (solve_in_disk(projected, radius, perp(lines[i].direction), true, result) <
        projected.size()) {
      // Only reachable through round-off; the previous result is already
      // feasible for this sub-program.
      result = previous;
    }
    distance = cross(lines[i].direction, lines[i].point - result);
  }
}

}  // namespace

void OrcaParams::validate() const {
  if (!(neighbor_dist > 0.0) || max_neighbors == 0 || !(time_horizon_agent > 0.0) ||
      !(v_max > 0.0) || !(dt > 0.0) || !(agent_radius > 0.0) || !(responsibility > 0.0) ||
      !(responsibility <= 1.0)) {
    throw std::invalid_argument("OrcaParams: all parameters must be positive");
  }
}

std::vector<HalfPlane> compute_halfplanes(const AgentState& self,
                                          std::span<const AgentState> neighbors,
                                          const OrcaParams& params) {
  const double range_sq = params.neighbor_dist * params.neighbor_dist;

  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const double d2 = (neighbors[j].position - self.position).squared_norm();
    if (d2 < range_sq) candidates.emplace_back(d2, j);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (candidates.size() > params.max_neighbors) candidates.resize(params.max_neighbors);

  const double inv_horizon = 1.0 / params.time_horizon_agent;
  const double inv_dt = 1.0 / params.dt;

  std::vector<HalfPlane> planes;
  planes.reserve(candidates.size());
  for (const auto& [dist_sq_raw, j] : candidates) {
    const AgentState& other = neighbors[j];
    Vec2 rel_pos = other.position - self.position;
    double dist_sq = dist_sq_raw;
    if (dist_sq < 1e-18) {
      // Coincident centers: fall back to a fixed, index-derived separation axis.
      const double angle = static_cast<double>(mix64(j) >> 11) * 0x1.0p-53 * 2.0 * M_PI;
      rel_pos = Vec2{std::cos(angle), std::sin(angle)} * 1e-3;
      dist_sq = rel_pos.squared_norm();
    }
    const Vec2 rel_vel = self.velocity - other.velocity;
    const double combined_radius = self.radius + other.radius;
    const double combined_radius_sq = combined_radius * combined_radius;

    Line line;
    Vec2 u;
    if (dist_sq > combined_radius_sq) {
      const Vec2 w = rel_vel - inv_horizon * rel_pos;
      const double w_length_sq = w.squared_norm();
      const double dot_product = dot(w, rel_pos);

      if (dot_product < 0.0 && dot_product * dot_product > combined_radius_sq * w_length_sq) {
        // Closest boundary point lies on the cut-off circle.
        const double w_length = std::sqrt(w_length_sq);
        const Vec2 unit_w = w / w_length;
        line.direction = Vec2{unit_w.y, -unit_w.x};
        u = (combined_radius * inv_horizon - w_length) * unit_w;
      } else {
        const double leg = std::sqrt(dist_sq - combined_radius_sq);
        if (cross(rel_pos, w) > 0.0) {
          line.direction = Vec2{rel_pos.x * leg - rel_pos.y * combined_radius,
                                rel_pos.x * combined_radius + rel_pos.y * leg} /
                           dist_sq;
        } else {
          line.direction = -Vec2{rel_pos.x * leg + rel_pos.y * combined_radius,
                                 -rel_pos.x * combined_radius + rel_pos.y * leg} /
                           dist_sq;
        }
        u = dot(rel_vel, line.direction) * line.direction - rel_vel;
      }
    } else {
      // Already overlapping: resolve within one timestep.
      Vec2 w = rel_vel - inv_dt * rel_pos;
      double w_length = w.norm();
      if (w_length < 1e-12) {
        w = -rel_pos;
        w_length = w.norm();
      }
      const Vec2 unit_w = w / w_length;
      line.direction = Vec2{unit_w.y, -unit_w.x};
      u = (combined_radius * inv_dt - w_length) * unit_w;
    }
    line.point = self.velocity + params.responsibility * u;
    planes.push_back(to_halfplane(line));
  }
  return planes;
}

Vec2 solve_velocity_lp(std::span<const HalfPlane> constraints, const Vec2& preferred, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("solve_velocity_lp: v_max must be positive");
  std::vector<Line> lines;
  lines.reserve(constraints.size());
  for (const auto& h : constraints) lines.push_back(to_line(h));

  Vec2 result;
  const std::size_t failed = solve_in_disk(lines, v_max, preferred, false, result);
  if (failed < lines.size()) minimize_max_violation(lines, failed, v_max, result);
  return clamp_norm(result, v_max);
}

Vec2 preferred_velocity(const AgentState& agent, double v_max, double dt) {
  const Vec2 to_goal = agent.goal - agent.position;
  const double dist = to_goal.norm();
  if (dist < 1e-9) return {};
  const double speed = std::min(v_max, dist / dt);
  return to_goal * (speed / dist);
}

}  // namespace icpnav::orca
