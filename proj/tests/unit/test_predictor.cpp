#include <doctest.h>

#include <random>
#include <string>

#include "icpnav/predictor.hpp"
#include "icpnav/serialization.hpp"

using namespace icpnav;

namespace {

/// One human walking with constant per-frame displacement `step`.
ObservationWindow walking(Vec2 start, Vec2 step, std::size_t frames, std::size_t humans = 1) {
  ObservationWindow w;
  w.humans.resize(humans);
  for (std::size_t k = 0; k < frames; ++k) {
    w.robot.push_back({0, 0});
    for (std::size_t i = 0; i < humans; ++i) {
      w.humans[i].push_back(start + Vec2{double(i), 0} + step * double(k));
    }
  }
  return w;
}

const std::string kScript = std::string("python3 ") + ICPNAV_SOURCE_DIR + "/tools/predictors/constant_velocity.py";

}  // namespace

TEST_CASE("stationary human is predicted in place") {
  ConstantVelocityPredictor cv;
  const auto p = cv.predict(walking({1, 2}, {0, 0}, 5), 5);
  REQUIRE(p.is_rectangular(5));
  for (const auto& q : p.steps[0]) {
    CHECK(q.x == 1.0);
    CHECK(q.y == 2.0);
  }
}

TEST_CASE("half a metre per second extrapolates linearly") {
  ConstantVelocityPredictor cv;
  // 0.5 m/s at dt = 0.25 is 0.125 m per frame
  const auto w = walking({0, 0}, {0.125, 0}, 5);
  const auto p = cv.predict(w, 5);
  const Vec2 last = w.humans[0].back();
  for (std::size_t tau = 1; tau <= 5; ++tau) {
    CHECK(p.steps[0][tau - 1].x == doctest::Approx(last.x + 0.125 * tau).epsilon(1e-12));
    CHECK(p.steps[0][tau - 1].y == doctest::Approx(0.0));
  }
}

TEST_CASE("exact on every constant-velocity track") {
  ConstantVelocityPredictor cv;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5.0, 5.0), v(-0.25, 0.25);
  std::uniform_int_distribution<int> len(2, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 start{u(rng), u(rng)}, step{v(rng), v(rng)};
    const auto w = walking(start, step, len(rng), 3);
    const auto p = cv.predict(w, 7);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t tau = 1; tau <= 7; ++tau) {
        const Vec2 expected = w.humans[i].back() + step * double(tau);
        CHECK(euclidean_distance(p.steps[i][tau - 1], expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("prediction commutes with translation") {
  ConstantVelocityPredictor cv;
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    ObservationWindow w;
    w.humans.resize(2);
    for (int k = 0; k < 5; ++k) {
      w.robot.push_back({u(rng), u(rng)});
      for (auto& h : w.humans) h.push_back({u(rng), u(rng)});
    }
    const Vec2 shift{u(rng), u(rng)};
    ObservationWindow s = w;
    for (auto& q : s.robot) q = q + shift;
    for (auto& h : s.humans)
      for (auto& q : h) q = q + shift;
    const auto a = cv.predict(w, 5), b = cv.predict(s, 5);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 5; ++k) CHECK(euclidean_distance(a.steps[i][k] + shift, b.steps[i][k]) <= 1e-12);
    }
  }
}

TEST_CASE("prediction shape and short windows") {
  ConstantVelocityPredictor cv;
  const auto p = cv.predict(walking({0, 0}, {0.1, 0}, 5, 4), 3);
  CHECK(p.human_count() == 4);
  CHECK(p.horizon() == 3);
  CHECK_THROWS_AS(cv.predict(walking({0, 0}, {0.1, 0}, 1), 5), std::invalid_argument);
  CHECK(cv.predict(walking({0, 0}, {}, 5, 0), 5).human_count() == 0);
}

TEST_CASE("observation history pads with its earliest frame") {
  ObservationHistory hist(5);
  CHECK_THROWS(hist.window(5));
  WorldState w;
  w.humans.push_back({{1, 1}, {}, {}, 0.4});
  hist.push(w);
  w.humans[0].position = {2, 1};
  hist.push(w);
  auto win = hist.window(5);
  REQUIRE(win.humans[0].size() == 5);
  CHECK(win.humans[0][0].x == 1.0);
  CHECK(win.humans[0][2].x == 1.0);
  CHECK(win.humans[0][3].x == 1.0);
  CHECK(win.humans[0][4].x == 2.0);
  for (int k = 3; k <= 8; ++k) {
    w.humans[0].position = {double(k), 1};
    hist.push(w);
  }
  CHECK(hist.size() == 5);
  win = hist.window(5);
  CHECK(win.humans[0].front().x == 4.0);
  CHECK(win.humans[0].back().x == 8.0);
}

TEST_CASE("window and prediction JSON round trip") {
  const auto w = walking({0.1, -0.2}, {0.3, 0.05}, 4, 2);
  const auto j = window_to_json(w, 6);
  CHECK(j.at("pred_len").get<std::size_t>() == 6);
  CHECK(j.at("humans").size() == 2);
  CHECK(j.at("robot").size() == 4);
  const auto p = ConstantVelocityPredictor().predict(w, 6);
  const auto back = prediction_from_json(nlohmann::json::parse(prediction_to_json(p).dump()));
  REQUIRE(back.is_rectangular(6));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(back.steps[i][k].x == p.steps[i][k].x);
      CHECK(back.steps[i][k].y == p.steps[i][k].y);
    }
  }
  CHECK_THROWS(vec2_from_json(nlohmann::json::array({1.0})));
}

TEST_CASE("external command predictor agrees with the built-in one") {
  const CommandPredictor ext(kScript, 2);
  const ConstantVelocityPredictor cv;
  const auto w = walking({0.5, 1.5}, {0.1, -0.07}, 5, 3);
  const auto a = ext.predict(w, 5), b = cv.predict(w, 5);
  REQUIRE(a.is_rectangular(5));
  REQUIRE(a.human_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 5; ++k) CHECK(euclidean_distance(a.steps[i][k], b.steps[i][k]) <= 1e-12);
  }
}

TEST_CASE("external command failures surface as exceptions") {
  const auto w = walking({0, 0}, {0.1, 0}, 5, 2);
  CHECK_THROWS_AS(CommandPredictor("false").predict(w, 5), std::runtime_error);
  // wrong shape: empty prediction for two humans
  CHECK_THROWS_AS(CommandPredictor("echo '{\"predictions\": []}'").predict(w, 5), std::runtime_error);
}
