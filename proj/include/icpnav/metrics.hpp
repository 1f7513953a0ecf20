#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "icpnav/domain.hpp"

namespace icpnav::metrics {

enum class Outcome { Success, Collision, Timeout, Error };

const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

/// Prediction and radii produced by the planning cycle at frame `step`.
struct PlanningRecord {
  std::size_t step = 0;
  HorizonPrediction prediction;
  std::vector<double> radii;  ///< empty for methods without uncertainty sets
};

/// Closed-loop record of one test case. Frames 0..T are the states after
/// 0..T executed steps.
struct EpisodeRecord {
  std::vector<Vec2> robot;                ///< T + 1 frames
  std::vector<std::vector<Vec2>> humans;  ///< [human][T + 1]
  std::vector<PlanningRecord> cycles;     ///< one per planning cycle, in step order
  Outcome outcome = Outcome::Timeout;
  double dt = 0.25;
  std::vector<double> cycle_wall_time_s;

  std::size_t steps() const { return robot.empty() ? 0 : robot.size() - 1; }
};

struct EpisodeMetrics {
  Outcome outcome = Outcome::Timeout;
  double nt = 0.0;  ///< s
  double pl = 0.0;  ///< m
  double itr = 0.0;
  std::optional<double> sd;  ///< m; absent without intrusions
  std::optional<double> cr;  ///< absent without predictions/radii
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

struct SuiteSummary {
  std::size_t cases = 0;
  double sr = 0.0;
  Stat itr, sd, pl, nt, cr;
};

/// NT, PL, ITR, SD and CR of one episode. ITR and SD look T_pred frames
/// ahead (as far as recorded). CR averages over planning cycles with radii
/// and a fully realized horizon, comparing error < radius strictly.
EpisodeMetrics episode_metrics(const EpisodeRecord& rec, std::size_t pred_len, double robot_radius,
                               double human_radius);

/// SR over all cases; NT, PL, ITR and SD over successful cases; CR over every
/// case where it is defined. Population standard deviation.
SuiteSummary aggregate(const std::vector<EpisodeMetrics>& records);

}  // namespace icpnav::metrics
