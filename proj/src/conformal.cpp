#include "icpnav/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace icpnav::conformal {

namespace {

// Products like 20 * 0.95 land a hair above the integer they represent.
constexpr double kRankSlack = 1e-9;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("conformal: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

bool covered(double score, double radius, Comparison cmp) {
  return cmp == Comparison::Strict ? score < radius : score <= radius;
}

}  // namespace

std::size_t quantile_rank(std::size_t n, double alpha, QuantileRule rule) {
  check_alpha(alpha);
  const double nd = static_cast<double>(n);
  const double target = rule == QuantileRule::FiniteSample ? (nd + 1.0) * (1.0 - alpha) : nd * (1.0 - alpha);
  const auto q = static_cast<std::size_t>(std::max(1.0, std::ceil(target - kRankSlack)));
  if (n == 0 || q > n) {
    throw std::invalid_argument("conformal: " + std::to_string(n) + " calibration scores are too few for alpha = " +
                                std::to_string(alpha) + "; need at least " +
                                std::to_string(minimum_samples(alpha, rule)));
  }
  return q;
}

std::size_t minimum_samples(double alpha, QuantileRule rule) {
  check_alpha(alpha);
  if (rule == QuantileRule::Empirical) return 1;
  // (n + 1)(1 - alpha) <= n  <=>  n >= (1 - alpha) / alpha
  return static_cast<std::size_t>(std::max(1.0, std::ceil((1.0 - alpha) / alpha - kRankSlack)));
}

ScoreSet score_dataset(const orca::CalibrationDataset& dataset, const TrajectoryPredictor& predictor) {
  if (dataset.empty()) throw std::invalid_argument("score_dataset: empty calibration dataset");
  ScoreSet scores;
  scores.per_step.resize(dataset.pred_len);
  for (const auto& sample : dataset.samples) {
    ObservationWindow obs{sample.robot_past, sample.humans_past};
    if (obs.robot.empty() && !obs.humans.empty()) {
      obs.robot.assign(obs.humans.front().size(), Vec2{});
    }
    if (obs.length() != dataset.obs_len) {
      throw std::invalid_argument("score_dataset: window length does not match the dataset");
    }
    const HorizonPrediction pred = predictor.predict(obs, dataset.pred_len);
    if (pred.human_count() != sample.humans_future.size() || !pred.is_rectangular(dataset.pred_len)) {
      throw std::runtime_error("score_dataset: predictor returned a prediction of the wrong shape");
    }
    for (std::size_t i = 0; i < sample.humans_future.size(); ++i) {
      for (std::size_t tau = 0; tau < dataset.pred_len; ++tau) {
        scores.per_step[tau].push_back(euclidean_distance(pred.steps[i][tau], sample.humans_future[i][tau]));
      }
    }
  }
  return scores;
}

ConformalRadii conformal_radii(const ScoreSet& scores, double alpha, QuantileRule rule) {
  check_alpha(alpha);
  ConformalRadii out;
  out.alpha = alpha;
  out.sample_count = scores.count();
  const std::size_t q = quantile_rank(scores.count(), alpha, rule);
  out.radii.reserve(scores.horizon());
  for (const auto& step : scores.per_step) {
    if (step.size() != scores.count()) {
      throw std::invalid_argument("conformal_radii: steps have different sample counts");
    }
    std::vector<double> sorted = step;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q - 1), sorted.end());
    out.radii.push_back(sorted[q - 1]);
  }
  return out;
}

std::vector<double> empirical_coverage(const ConformalRadii& radii, const ScoreSet& test_scores, Comparison cmp) {
  if (radii.radii.size() != test_scores.horizon()) {
    throw std::invalid_argument("empirical_coverage: horizon mismatch");
  }
  std::vector<double> coverage;
  coverage.reserve(test_scores.horizon());
  for (std::size_t tau = 0; tau < test_scores.horizon(); ++tau) {
    const auto& s = test_scores.per_step[tau];
    const auto hits = std::count_if(s.begin(), s.end(), [&](double e) { return covered(e, radii.radii[tau], cmp); });
    coverage.push_back(s.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(s.size()));
  }
  return coverage;
}

double joint_coverage(const ConformalRadii& radii, const ScoreSet& test_scores, Comparison cmp) {
  if (radii.radii.size() != test_scores.horizon()) {
    throw std::invalid_argument("joint_coverage: horizon mismatch");
  }
  const std::size_t n = test_scores.count();
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bool all = true;
    for (std::size_t tau = 0; tau < test_scores.horizon() && all; ++tau) {
      all = covered(test_scores.per_step[tau][k], radii.radii[tau], cmp);
    }
    hits += all ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace icpnav::conformal
