#pragma once

#include <cstddef>
#include <vector>

#include "icpnav/predictor.hpp"
#include "icpnav/simulator.hpp"

namespace icpnav::conformal {

/// Nonconformity scores grouped by prediction step: per_step[tau - 1] holds
/// the pooled errors of every (sample, human) pair at step tau. Within a
/// ScoreSet all steps share the same (sample, human) ordering.
struct ScoreSet {
  std::vector<std::vector<double>> per_step;

  std::size_t horizon() const { return per_step.size(); }
  std::size_t count() const { return per_step.empty() ? 0 : per_step.front().size(); }
};

struct ConformalRadii {
  std::vector<double> radii;  ///< r_cp per prediction step (m)
  double alpha = 0.05;
  std::size_t sample_count = 0;

  static ConformalRadii zeros(std::size_t horizon, double alpha = 0.05) {
    return {std::vector<double>(horizon, 0.0), alpha, 0};
  }
};

enum class QuantileRule {
  /// q = ceil((n + 1)(1 - alpha)): finite-sample valid.
  FiniteSample,
  /// q = ceil((1 - alpha) n): the empirical quantile.
  Empirical,
};

enum class Comparison { NonStrict, Strict };

/// Rank (1-based) of the order statistic used as the radius.
/// Throws std::invalid_argument when n is too small for alpha under `rule`.
std::size_t quantile_rank(std::size_t n, double alpha, QuantileRule rule = QuantileRule::FiniteSample);

/// Smallest n for which quantile_rank(n, alpha, rule) exists.
std::size_t minimum_samples(double alpha, QuantileRule rule = QuantileRule::FiniteSample);

/// Euclidean prediction error of `predictor` on every human, sample and step.
ScoreSet score_dataset(const orca::CalibrationDataset& dataset, const TrajectoryPredictor& predictor);

/// Split-conformal radius per step: the q-th smallest score.
ConformalRadii conformal_radii(const ScoreSet& scores, double alpha,
                               QuantileRule rule = QuantileRule::FiniteSample);

/// Fraction of test scores with score <= radius (or < under Strict), per step.
std::vector<double> empirical_coverage(const ConformalRadii& radii, const ScoreSet& test_scores,
                                       Comparison cmp = Comparison::NonStrict);

/// Fraction of (sample, human) entries covered at every step simultaneously.
double joint_coverage(const ConformalRadii& radii, const ScoreSet& test_scores,
                      Comparison cmp = Comparison::NonStrict);

}  // namespace icpnav::conformal
