#include "icpnav/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "icpnav/random.hpp"

namespace icpnav::harness {

WorldState Scenario::initial_world(double dt) const {
  WorldState w;
  w.time_step = 0;
  w.dt = dt;
  w.robot = robot;
  w.humans = humans;
  return w;
}

namespace {

struct Placement {
  Vec2 start;
  Vec2 goal;
};

bool separated(const Vec2& p, double radius, const std::vector<Vec2>& others, const std::vector<double>& radii,
               double gap) {
  for (std::size_t j = 0; j < others.size(); ++j) {
    if (euclidean_distance(p, others[j]) < radius + radii[j] + gap) return false;
  }
  return true;
}

Placement draw(Rng& rng, const ScenarioParams& p, bool is_robot) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  if (p.geometry == Geometry::Square) {
    const double h = p.square_half_extent;
    return {{h * unit(rng), h * unit(rng)}, {h * unit(rng), h * unit(rng)}};
  }
  constexpr double pi = std::numbers::pi;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  const double base = is_robot ? -pi / 2.0 : angle(rng);
  const double a0 = base + p.angular_jitter * unit(rng);
  const double r0 = p.circle_radius + p.radial_jitter * unit(rng);
  const double a1 = base + pi + p.angular_jitter * unit(rng);
  const double r1 = p.circle_radius + p.radial_jitter * unit(rng);
  return {{r0 * std::cos(a0), r0 * std::sin(a0)}, {r1 * std::cos(a1), r1 * std::sin(a1)}};
}

bool inside(const Vec2& v, double h) { return std::fabs(v.x) <= h && std::fabs(v.y) <= h; }

}  // namespace

std::vector<Scenario> generate_scenarios(std::size_t humans, std::size_t count, std::uint64_t seed,
                                         const ScenarioParams& params) {
  if (count == 0) throw std::invalid_argument("generate_scenarios: count must be >= 1");
  const double reach = params.geometry == Geometry::Circle ? params.circle_radius + params.radial_jitter
                                                           : params.square_half_extent;
  if (reach > params.arena_half_extent) throw std::invalid_argument("generate_scenarios: arena too small");

  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    Scenario sc;
    sc.index = c;
    sc.seed = derive_seed(seed, {c});
    sc.arena_half_extent = params.arena_half_extent;
    Rng rng(sc.seed);

    std::vector<Vec2> starts, goals;
    std::vector<double> radii;
    for (std::size_t a = 0; a <= humans; ++a) {
      const bool is_robot = a == 0;
      const double r = is_robot ? params.robot_radius : params.human_radius;
      std::size_t attempts = 0;
      Placement pl;
      for (;;) {
        if (attempts++ >= params.max_attempts) {
          throw std::runtime_error("generate_scenarios: could not place agent " + std::to_string(a) + " of case " +
                                   std::to_string(c) + " after " + std::to_string(params.max_attempts) +
                                   " attempts (arena too crowded)");
        }
        pl = draw(rng, params, is_robot);
        if (!inside(pl.start, params.arena_half_extent) || !inside(pl.goal, params.arena_half_extent)) continue;
        if (separated(pl.start, r, starts, radii, params.min_gap) &&
            separated(pl.goal, r, goals, radii, params.min_gap)) {
          break;
        }
      }
      starts.push_back(pl.start);
      goals.push_back(pl.goal);
      radii.push_back(r);
      AgentState agent{pl.start, Vec2{}, pl.goal, r};
      if (is_robot) {
        sc.robot = agent;
      } else {
        sc.humans.push_back(agent);
      }
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace icpnav::harness
