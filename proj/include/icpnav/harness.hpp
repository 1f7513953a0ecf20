#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icpnav/config.hpp"
#include "icpnav/metrics.hpp"
#include "icpnav/scenario.hpp"
#include "icpnav/serialization.hpp"

namespace icpnav::harness {

/// One closed-loop test case: the record the metrics read, plus the replay
/// lines (header first) that reproduce it.
struct EpisodeResult {
  Scenario scenario;
  metrics::EpisodeRecord record;
  metrics::EpisodeMetrics metrics;
  std::vector<Json> replay;
  std::string error;  ///< set when the episode aborted with an exception
};

struct SuiteResult {
  metrics::SuiteSummary summary;
  std::vector<EpisodeResult> episodes;
  std::optional<conformal::ConformalRadii> offcp_radii;
};

/// Predictor named by the config: the external command when given, else
/// constant velocity.
std::unique_ptr<TrajectoryPredictor> make_predictor(const RunConfig& cfg);

/// OffCP radii from robot-free crowd episodes drawn from the config's
/// scenario distribution under a seed stream disjoint from the test cases.
conformal::ConformalRadii calibrate_offcp(const RunConfig& cfg, const TrajectoryPredictor& predictor);

Json radii_to_json(const conformal::ConformalRadii& r);
conformal::ConformalRadii radii_from_json(const nlohmann::json& j);

/// Runs one scenario closed-loop. Exceptions are caught: the partial record
/// is kept, the outcome is Error and `error` holds the message.
EpisodeResult run_episode(const Scenario& scenario, const RunConfig& cfg, const TrajectoryPredictor& predictor,
                          const conformal::ConformalRadii* offcp_radii);

/// Runs every case (concurrently up to cfg.workers), aggregates and returns.
/// Results are ordered by case index.
SuiteResult run_suite(const RunConfig& cfg);

/// Writes replay_NNNN.jsonl per case, metrics.csv and summary.json into
/// cfg.out_dir (created if needed). I/O errors name the offending path.
void write_artifacts(const RunConfig& cfg, const SuiteResult& result);

std::string csv_header();
std::string csv_row(const RunConfig& cfg, const metrics::SuiteSummary& s);

/// Recomputes an episode's metrics from its replay file alone.
metrics::EpisodeMetrics replay_metrics(const std::string& path);
metrics::EpisodeRecord record_from_replay(const std::vector<nlohmann::json>& lines, std::size_t* pred_len,
                                          double* robot_radius, double* human_radius);

/// Worker count after applying the ICP_WORKERS override.
std::size_t effective_workers(std::size_t configured);

}  // namespace icpnav::harness
