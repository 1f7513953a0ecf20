#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include "icpnav/domain.hpp"

namespace icpnav {

/// Robot and human positions over the last T_obs frames, oldest first.
struct ObservationWindow {
  std::vector<Vec2> robot;
  std::vector<std::vector<Vec2>> humans;  ///< [human][T_obs]

  std::size_t length() const { return robot.size(); }
  /// All sub-sequences have the same length.
  bool is_aligned() const;
};

/// Trajectory predictor interface. Implementations must be deterministic
/// given the window.
class TrajectoryPredictor {
 public:
  virtual ~TrajectoryPredictor() = default;
  virtual HorizonPrediction predict(const ObservationWindow& obs, std::size_t pred_len) const = 0;
  virtual std::size_t min_observation() const { return 1; }
};

/// Extrapolates each human with the mean of its last two observed
/// displacements (a single displacement when only two frames exist).
class ConstantVelocityPredictor final : public TrajectoryPredictor {
 public:
  HorizonPrediction predict(const ObservationWindow& obs, std::size_t pred_len) const override;
  std::size_t min_observation() const override { return 2; }
};

/// Delegates prediction to an external program. The window is written as
/// JSON to a temporary file passed on stdin; the program prints the
/// prediction JSON on stdout. See README for the schema.
class CommandPredictor final : public TrajectoryPredictor {
 public:
  explicit CommandPredictor(std::string command, std::size_t min_obs = 1)
      : command_(std::move(command)), min_obs_(min_obs) {}
  HorizonPrediction predict(const ObservationWindow& obs, std::size_t pred_len) const override;
  std::size_t min_observation() const override { return min_obs_; }

 private:
  std::string command_;
  std::size_t min_obs_;
};

/// Rolling buffer of observed frames. Requests for more frames than stored
/// are padded by repeating the earliest frame.
class ObservationHistory {
 public:
  explicit ObservationHistory(std::size_t capacity) : capacity_(capacity) {}

  void push(const WorldState& world);
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  ObservationWindow window(std::size_t obs_len) const;

 private:
  struct Frame {
    Vec2 robot;
    std::vector<Vec2> humans;
  };
  std::size_t capacity_;
  std::deque<Frame> frames_;
};

}  // namespace icpnav
