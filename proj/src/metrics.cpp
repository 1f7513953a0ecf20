#include "icpnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace icpnav::metrics {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success:
      return "success";
    case Outcome::Collision:
      return "collision";
    case Outcome::Timeout:
      return "timeout";
    case Outcome::Error:
      return "error";
  }
  return "error";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "success") return Outcome::Success;
  if (s == "collision") return Outcome::Collision;
  if (s == "timeout") return Outcome::Timeout;
  if (s == "error") return Outcome::Error;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

EpisodeMetrics episode_metrics(const EpisodeRecord& rec, std::size_t pred_len, double robot_radius,
                               double human_radius) {
  if (rec.robot.empty()) throw std::invalid_argument("episode_metrics: empty record");
  for (const auto& h : rec.humans) {
    if (h.size() != rec.robot.size()) throw std::invalid_argument("episode_metrics: trajectories not time-aligned");
  }
  EpisodeMetrics m;
  m.outcome = rec.outcome;
  const std::size_t T = rec.steps();
  const double contact = robot_radius + human_radius;

  m.nt = static_cast<double>(T) * rec.dt;
  for (std::size_t t = 0; t < T; ++t) m.pl += euclidean_distance(rec.robot[t + 1], rec.robot[t]);

  std::size_t intrusions = 0;
  double sd_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double closest = std::numeric_limits<double>::infinity();
    bool intruded = false;
    for (const auto& h : rec.humans) {
      bool hit = false;
      for (std::size_t tau = 1; tau <= pred_len && t + tau <= T; ++tau) {
        if (euclidean_distance(rec.robot[t], h[t + tau]) < contact) {
          hit = true;
          break;
        }
      }
      if (hit) {
        intruded = true;
        closest = std::min(closest, euclidean_distance(rec.robot[t], h[t]));
      }
    }
    if (intruded) {
      ++intrusions;
      sd_sum += closest;
    }
  }
  m.itr = T > 0 ? static_cast<double>(intrusions) / static_cast<double>(T) : 0.0;
  if (intrusions > 0) m.sd = sd_sum / static_cast<double>(intrusions);

  const std::size_t N = rec.humans.size();
  std::size_t covered = 0;
  std::size_t total = 0;
  for (const auto& cycle : rec.cycles) {
    if (N == 0 || cycle.radii.empty() || cycle.step + pred_len > T) continue;
    if (cycle.prediction.human_count() != N || cycle.radii.size() < pred_len) {
      throw std::invalid_argument("episode_metrics: planning record does not match the episode");
    }
    for (std::size_t i = 0; i < N; ++i) {
      bool inside = true;
      for (std::size_t tau = 1; tau <= pred_len && inside; ++tau) {
        inside = euclidean_distance(cycle.prediction.steps[i].at(tau - 1), rec.humans[i][cycle.step + tau]) <
                 cycle.radii[tau - 1];
      }
      covered += inside ? 1 : 0;
      ++total;
    }
  }
  if (total > 0) m.cr = static_cast<double>(covered) / static_cast<double>(total);
  return m;
}

namespace {

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

}  // namespace

SuiteSummary aggregate(const std::vector<EpisodeMetrics>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no episodes");
  SuiteSummary out;
  out.cases = records.size();
  std::vector<double> itr, sd, pl, nt, cr;
  std::size_t successes = 0;
  for (const auto& m : records) {
    if (m.cr) cr.push_back(*m.cr);
    if (m.outcome != Outcome::Success) continue;
    ++successes;
    itr.push_back(m.itr);
    pl.push_back(m.pl);
    nt.push_back(m.nt);
    if (m.sd) sd.push_back(*m.sd);
  }
  out.sr = static_cast<double>(successes) / static_cast<double>(records.size());
  out.itr = summarize(itr);
  out.sd = summarize(sd);
  out.pl = summarize(pl);
  out.nt = summarize(nt);
  out.cr = summarize(cr);
  return out;
}

}  // namespace icpnav::metrics
