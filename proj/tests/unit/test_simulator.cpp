#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "icpnav/mpc.hpp"
#include "icpnav/random.hpp"
#include "icpnav/simulator.hpp"

using namespace icpnav;

namespace {

AgentState human(Vec2 p, Vec2 goal) { return {p, {}, goal, 0.4}; }

WorldState world_with(std::vector<AgentState> humans, Vec2 robot = {50, 50}) {
  WorldState w;
  w.robot = {robot, {}, robot, 0.4};
  w.humans = std::move(humans);
  return w;
}

double min_pairwise(const std::vector<AgentState>& agents) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      best = std::min(best, euclidean_distance(agents[i].position, agents[j].position));
    }
  }
  return best;
}

RobotPlan straight_plan(Vec2 start, Vec2 velocity, std::size_t horizon) {
  return mpc::integrate(start, std::vector<Vec2>(horizon, velocity), 0.25);
}

}  // namespace

TEST_CASE("human at its goal stays put") {
  orca::OrcaParams p;
  const auto next = orca::step_humans_only(world_with({human({1, 2}, {1, 2})}), p);
  CHECK(next.humans[0].position.x == 1.0);
  CHECK(next.humans[0].position.y == 2.0);
  CHECK(next.humans[0].velocity.norm() == 0.0);
}

TEST_CASE("free human walks straight at full speed") {
  orca::OrcaParams p;
  const auto next = orca::step_humans_only(world_with({human({0, 0}, {10, 0})}), p);
  CHECK(next.humans[0].velocity.x == doctest::Approx(1.0));
  CHECK(next.humans[0].velocity.y == doctest::Approx(0.0));
  CHECK(next.humans[0].position.x == doctest::Approx(0.25));
  CHECK(next.time_step == 1);
}

TEST_CASE("head-on swap keeps humans apart") {
  orca::OrcaParams p;
  WorldState w = world_with({human({-4, 0}, {4, 0}), human({4, 0}, {-4, 0})});
  double closest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    w = orca::step_humans_only(w, p);
    closest = std::min(closest, min_pairwise(w.humans));
  }
  CHECK(closest >= 0.8 - 1e-6);
}

TEST_CASE("randomized 5-human crowds stay separated and under the speed limit") {
  orca::OrcaParams p;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double closest = std::numeric_limits<double>::infinity();
  double fastest = 0.0;
  for (int episode = 0; episode < 1000; ++episode) {
    std::vector<AgentState> hs;
    while (hs.size() < 5) {
      AgentState h = human({u(rng), u(rng)}, {u(rng), u(rng)});
      bool ok = true;
      for (const auto& o : hs) ok = ok && euclidean_distance(o.position, h.position) >= 0.9;
      if (ok) hs.push_back(h);
    }
    WorldState w = world_with(hs);
    for (int k = 0; k < 60; ++k) {
      w = orca::step_humans_only(w, p);
      closest = std::min(closest, min_pairwise(w.humans));
      for (const auto& h : w.humans) fastest = std::max(fastest, h.velocity.norm());
    }
  }
  CHECK(closest >= 0.8 - 0.05);
  CHECK(fastest <= p.v_max + 1e-9);
}

TEST_CASE("robot override is followed exactly") {
  orca::OrcaParams p;
  const WorldState w = world_with({human({2, 1}, {-3, 1}), human({2, -1}, {-3, -1})}, {0, 0});
  const RobotPlan plan = straight_plan({0, 0}, {0.8, 0.1}, 5);
  const auto log = orca::simulate_plan_rollout(w, plan, p, 9, {}, 42);
  REQUIRE(log.length == 9);
  for (std::size_t k = 0; k < log.length; ++k) {
    const Vec2 expected = plan.positions[std::min<std::size_t>(k, 5)];
    CHECK(log.robot.positions[k].x == expected.x);
    CHECK(log.robot.positions[k].y == expected.y);
  }
  for (const auto& h : log.humans) CHECK(h.respects_speed_limit(p.v_max));
}

TEST_CASE("calibration window arithmetic") {
  orca::OrcaParams p;
  const WorldState w = world_with({human({2, 1}, {-3, 1}), human({2, -1}, {-3, -1})}, {0, 0});
  const RobotPlan plan = straight_plan({0, 0}, {0.5, 0}, 5);
  orca::RolloutConfig cfg;
  cfg.episodes = 1;
  cfg.pad = 0;
  auto d = orca::rollout_calibration(w, plan, p, cfg, 1);
  CHECK(d.size() == 1);
  CHECK(d.samples[0].humans_past.size() == 2);
  CHECK(d.samples[0].humans_past[0].size() == cfg.obs_len);
  CHECK(d.samples[0].humans_future[0].size() == cfg.pred_len);
  CHECK(d.samples[0].robot_past.size() == cfg.obs_len);

  cfg.episodes = 2;
  cfg.pad = 3;
  d = orca::rollout_calibration(w, plan, p, cfg, 1);
  CHECK(d.size() == 8);

  cfg.episodes = 0;
  CHECK_THROWS_AS(orca::rollout_calibration(w, plan, p, cfg, 1), std::invalid_argument);
}

TEST_CASE("rollouts are deterministic and independent of worker count") {
  orca::OrcaParams p;
  std::vector<AgentState> hs;
  for (int i = 0; i < 6; ++i) hs.push_back(human({3.0 + i * 0.3, -2.0 + i}, {-4.0, 2.0 - i}));
  const WorldState w = world_with(hs, {0, 0});
  const RobotPlan plan = straight_plan({0, 0}, {1, 0}, 5);
  orca::RolloutConfig cfg;
  cfg.episodes = 6;
  cfg.pad = 4;
  cfg.noise.probability = 0.5;
  const auto a = orca::rollout_calibration(w, plan, p, cfg, 99);
  cfg.workers = 4;
  const auto b = orca::rollout_calibration(w, plan, p, cfg, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t k = 0; k < cfg.pred_len; ++k) {
        CHECK(a.samples[s].humans_future[i][k].x == b.samples[s].humans_future[i][k].x);
        CHECK(a.samples[s].humans_future[i][k].y == b.samples[s].humans_future[i][k].y);
      }
    }
  }
  const auto c = orca::rollout_calibration(w, plan, p, cfg, 100);
  bool differs = false;
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      differs = differs || a.samples[s].humans_future[i].back().x != c.samples[s].humans_future[i].back().x;
    }
  }
  CHECK(differs);
}

TEST_CASE("goal noise keeps goals inside the arena") {
  orca::OrcaParams p;
  orca::GoalNoise noise{1.0, 3.0, 2.0};
  const WorldState w = world_with({human({0, 0}, {1.9, 1.9})});
  const auto log = orca::simulate_crowd(w, p, 200, noise, 5);
  for (const auto& q : log.humans[0].positions) {
    CHECK(std::fabs(q.x) <= 2.0 + 0.25);
    CHECK(std::fabs(q.y) <= 2.0 + 0.25);
  }
}

TEST_CASE("crowd simulation stops once everyone is home") {
  orca::OrcaParams p;
  const WorldState w = world_with({human({0, 0}, {2, 0})});
  const auto log = orca::simulate_crowd(w, p, 500, {0.0, 0.5, 8.0}, 1);
  CHECK(log.length < 20);
  CHECK(log.humans[0].positions.back().x == doctest::Approx(2.0));
}

TEST_CASE("sliding windows over a log") {
  orca::RolloutLog log;
  log.length = 12;
  log.robot.positions.assign(12, Vec2{});
  log.humans.resize(1);
  for (int k = 0; k < 12; ++k) log.humans[0].positions.push_back({double(k), 0});
  const auto w = orca::extract_windows(log, 5, 5);
  REQUIRE(w.size() == 3);
  CHECK(w[2].humans_past[0].front().x == 2.0);
  CHECK(w[2].humans_future[0].back().x == 11.0);
}
