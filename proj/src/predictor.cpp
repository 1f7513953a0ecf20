#include "icpnav/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "icpnav/serialization.hpp"

namespace icpnav {

bool ObservationWindow::is_aligned() const {
  return std::all_of(humans.begin(), humans.end(),
                     [n = robot.size()](const auto& h) { return h.size() == n; });
}

HorizonPrediction ConstantVelocityPredictor::predict(const ObservationWindow& obs,
                                                     std::size_t pred_len) const {
  if (!obs.is_aligned()) throw std::invalid_argument("predict: misaligned observation window");
  const std::size_t n = obs.length();
  if (n < min_observation()) {
    throw std::invalid_argument("predict: constant-velocity prediction needs at least 2 observed frames, got " +
                                std::to_string(n));
  }
  HorizonPrediction out;
  out.steps.reserve(obs.humans.size());
  for (const auto& track : obs.humans) {
    const Vec2& last = track[n - 1];
    // Mean of the last two displacements telescopes to a chord over two steps.
    const Vec2 per_step = n >= 3 ? (last - track[n - 3]) * 0.5 : last - track[n - 2];
    std::vector<Vec2> future;
    future.reserve(pred_len);
    for (std::size_t tau = 1; tau <= pred_len; ++tau) {
      future.push_back(last + per_step * static_cast<double>(tau));
    }
    out.steps.push_back(std::move(future));
  }
  return out;
}

HorizonPrediction CommandPredictor::predict(const ObservationWindow& obs, std::size_t pred_len) const {
  if (obs.length() < min_obs_) throw std::invalid_argument("predict: observation window too short");
  namespace fs = std::filesystem;
  static std::atomic<std::uint64_t> counter{0};
  const auto stamp = std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1));
  const fs::path in = fs::temp_directory_path() / ("icpnav_window_" + stamp + ".json");
  const fs::path out = fs::temp_directory_path() / ("icpnav_pred_" + stamp + ".json");
  {
    std::ofstream f(in);
    if (!f) throw std::runtime_error("predict: cannot write " + in.string());
    f << window_to_json(obs, pred_len).dump();
  }
  const std::string cmd = command_ + " < \"" + in.string() + "\" > \"" + out.string() + "\"";
  const int rc = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(in, ec);
  if (rc != 0) {
    fs::remove(out, ec);
    throw std::runtime_error("predict: external predictor exited with status " + std::to_string(rc));
  }
  std::ifstream f(out);
  std::stringstream buffer;
  buffer << f.rdbuf();
  fs::remove(out, ec);
  auto prediction = prediction_from_json(nlohmann::json::parse(buffer.str()));
  if (prediction.human_count() != obs.humans.size() || !prediction.is_rectangular(pred_len)) {
    throw std::runtime_error("predict: external predictor returned wrong shape");
  }
  return prediction;
}

void ObservationHistory::push(const WorldState& world) {
  frames_.push_back(Frame{world.robot.position, world.human_positions()});
  while (frames_.size() > capacity_) frames_.pop_front();
}

ObservationWindow ObservationHistory::window(std::size_t obs_len) const {
  if (frames_.empty()) throw std::logic_error("ObservationHistory: no frames recorded");
  ObservationWindow w;
  const std::size_t humans = frames_.back().humans.size();
  w.humans.resize(humans);
  const std::size_t missing = obs_len > frames_.size() ? obs_len - frames_.size() : 0;
  const std::size_t first = frames_.size() + missing - obs_len;
  for (std::size_t k = 0; k < obs_len; ++k) {
    const Frame& f = k < missing ? frames_.front() : frames_[first + k - missing];
    w.robot.push_back(f.robot);
    for (std::size_t i = 0; i < humans; ++i) w.humans[i].push_back(f.humans[i]);
  }
  return w;
}

}  // namespace icpnav
