#include "icpnav/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "icpnav/baselines.hpp"
#include "icpnav/icp.hpp"
#include "icpnav/mpc.hpp"
#include "icpnav/parallel.hpp"
#include "icpnav/random.hpp"
#include "icpnav/simulator.hpp"

namespace icpnav::harness {

namespace {

constexpr std::uint64_t kOffcpScenarioStream = 0x0ffc5ce7a410ULL;
constexpr std::uint64_t kOffcpRolloutStream = 0x0ffc0011a7e0ULL;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json radii_array(const std::vector<double>& r) {
  Json out = Json::array();
  for (double v : r) out.push_back(v);
  return out;
}

Json frame_json(const WorldState& w) {
  Json j;
  j["t"] = w.time_step;
  j["robot"] = to_json(w.robot.position);
  Json humans = Json::array();
  for (const auto& h : w.humans) humans.push_back(to_json(h.position));
  j["humans"] = std::move(humans);
  j["predictions"] = nullptr;
  j["radii"] = nullptr;
  j["plan"] = nullptr;
  return j;
}

bool collided(const WorldState& w, double contact) {
  for (const auto& h : w.humans) {
    if (euclidean_distance(w.robot.position, h.position) < contact) return true;
  }
  return false;
}

std::vector<Vec2> leading_actions(const RobotPlan& plan, std::size_t n) {
  if (!plan.feasible()) return std::vector<Vec2>(n, Vec2{});
  return {plan.velocities.begin(), plan.velocities.begin() + static_cast<std::ptrdiff_t>(n)};
}

/// Feeds every planning cycle whose horizon has been fully observed by frame
/// `now` into the ACP state. `next` is the first cycle not yet consumed.
void mature_acp_cycles(baselines::AcpState& state, const metrics::EpisodeRecord& rec, std::size_t& next,
                       std::size_t now, std::size_t pred_len) {
  for (; next < rec.cycles.size() && rec.cycles[next].step + pred_len <= now; ++next) {
    const auto& cyc = rec.cycles[next];
    baselines::AcpObservation obs;
    obs.radii = cyc.radii;
    std::vector<bool> covered;
    for (std::size_t i = 0; i < rec.humans.size(); ++i) {
      std::vector<double> errors(pred_len);
      bool inside = true;
      for (std::size_t tau = 1; tau <= pred_len; ++tau) {
        errors[tau - 1] = euclidean_distance(cyc.prediction.steps[i][tau - 1], rec.humans[i][cyc.step + tau]);
        inside = inside && errors[tau - 1] < cyc.radii[tau - 1];
      }
      obs.errors.push_back(std::move(errors));
      covered.push_back(inside);
    }
    baselines::acp_observe(state, std::move(obs));
    state = baselines::acp_update(std::move(state), covered);
  }
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json stat_json(const metrics::Stat& s) {
  Json j;
  j["mean"] = number_or_null(s.mean);
  j["std"] = number_or_null(s.std);
  j["count"] = s.count;
  return j;
}

}  // namespace

std::unique_ptr<TrajectoryPredictor> make_predictor(const RunConfig& cfg) {
  if (!cfg.predictor_command.empty()) {
    return std::make_unique<CommandPredictor>(cfg.predictor_command, cfg.obs_len);
  }
  return std::make_unique<ConstantVelocityPredictor>();
}

conformal::ConformalRadii calibrate_offcp(const RunConfig& cfg, const TrajectoryPredictor& predictor) {
  if (cfg.humans == 0) return conformal::ConformalRadii::zeros(cfg.pred_len, cfg.icp.alpha);
  const auto scenarios = generate_scenarios(cfg.humans, cfg.offcp.episodes,
                                            derive_seed(cfg.seed, {kOffcpScenarioStream}), cfg.scenario);
  const baselines::ScenarioSource source = [&](std::size_t i) { return scenarios.at(i).initial_world(cfg.dt); };
  return baselines::offcp_calibrate(source, cfg.orca, cfg.offcp, predictor,
                                    derive_seed(cfg.seed, {kOffcpRolloutStream}))
      .radii;
}

Json radii_to_json(const conformal::ConformalRadii& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["sample_count"] = r.sample_count;
  j["radii"] = radii_array(r.radii);
  return j;
}

conformal::ConformalRadii radii_from_json(const nlohmann::json& j) {
  conformal::ConformalRadii r;
  r.alpha = j.at("alpha").get<double>();
  r.sample_count = j.at("sample_count").get<std::size_t>();
  r.radii = j.at("radii").get<std::vector<double>>();
  for (double v : r.radii) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("radii file: radii must be finite and >= 0");
  }
  return r;
}

EpisodeResult run_episode(const Scenario& scenario, const RunConfig& cfg, const TrajectoryPredictor& predictor,
                          const conformal::ConformalRadii* offcp_radii) {
  EpisodeResult res;
  res.scenario = scenario;
  auto& rec = res.record;
  rec.dt = cfg.dt;
  const std::size_t N = scenario.humans.size();
  const std::size_t pred_len = cfg.pred_len;
  const double contact = cfg.robot_radius + cfg.human_radius;
  const Vec2 goal = scenario.robot.goal;
  const bool is_acp = cfg.method == Method::AcpA || cfg.method == Method::AcpW;

  WorldState world = scenario.initial_world(cfg.dt);
  ObservationHistory history(std::max<std::size_t>(cfg.obs_len, 1));
  std::vector<Json> frames;
  rec.humans.resize(N);
  auto record_frame = [&](const WorldState& w) {
    rec.robot.push_back(w.robot.position);
    for (std::size_t i = 0; i < N; ++i) rec.humans[i].push_back(w.humans[i].position);
    history.push(w);
    frames.push_back(frame_json(w));
  };
  record_frame(world);

  baselines::AcpState acp = baselines::AcpState::make(
      cfg.method == Method::AcpW ? baselines::AcpVariant::WorstCase : baselines::AcpVariant::Averaged, pred_len,
      cfg.icp.alpha);
  acp.learning_rate = cfg.method == Method::AcpW ? cfg.acp.eta_worst : cfg.acp.eta_averaged;
  acp.window_len = cfg.acp.window;
  acp.min_samples = cfg.acp.min_samples;
  acp.fallback_radius = cfg.acp.fallback_radius;
  acp.radii = baselines::acp_radii(acp);
  std::size_t acp_next = 0;

  const icp::IcpModules modules{&predictor, cfg.orca, cfg.mpc};
  const std::size_t n_exec = cfg.icp.exec_steps();

  try {
    rec.outcome = metrics::Outcome::Timeout;
    if (collided(world, contact)) {
      rec.outcome = metrics::Outcome::Collision;
    }
    while (rec.outcome == metrics::Outcome::Timeout) {
      if (euclidean_distance(world.robot.position, goal) <= cfg.goal_tolerance) {
        rec.outcome = metrics::Outcome::Success;
        break;
      }
      const auto t = static_cast<std::size_t>(world.time_step);
      if (t >= cfg.max_steps) break;

      const auto started = std::chrono::steady_clock::now();
      std::vector<Vec2> actions;
      Json& frame = frames.at(t);
      std::optional<metrics::PlanningRecord> cycle;

      if (cfg.method == Method::Orca) {
        actions = {baselines::orca_robot_policy(world, goal, cfg.orca)};
      } else if (cfg.method == Method::Icp) {
        const auto step = icp::icp_step(world, history, goal, cfg.icp, modules, scenario.seed);
        actions = step.actions;
        cycle = metrics::PlanningRecord{t, step.predictions, step.radii.radii};
        frame["plan"] = to_json(step.executed_plan.positions);
        frame["iterations"] = step.diagnostics.calibration_rounds;
        frame["status"] = to_string(step.executed_plan.status);
      } else {
        const auto prediction = predictor.predict(history.window(cfg.obs_len), pred_len);
        conformal::ConformalRadii radii = conformal::ConformalRadii::zeros(pred_len, cfg.icp.alpha);
        if (N > 0 && is_acp) {
          mature_acp_cycles(acp, rec, acp_next, t, pred_len);
          radii = acp.radii;
          frame["alpha"] = acp.alpha;
        } else if (N > 0) {
          if (offcp_radii == nullptr) throw std::invalid_argument("run_episode: offcp needs calibrated radii");
          radii = *offcp_radii;
        }
        const RobotPlan plan = mpc::plan(world, goal, prediction, radii, nullptr, cfg.mpc);
        actions = leading_actions(plan, n_exec);
        cycle = metrics::PlanningRecord{t, prediction, radii.radii};
        frame["plan"] = to_json(plan.positions);
        frame["status"] = to_string(plan.status);
      }
      rec.cycle_wall_time_s.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
      if (cycle) {
        frame["predictions"] = prediction_to_json(cycle->prediction).at("predictions");
        frame["radii"] = radii_array(cycle->radii);
        rec.cycles.push_back(std::move(*cycle));
      }

      for (const Vec2& action : actions) {
        world = orca::step(world, cfg.orca, action);
        record_frame(world);
        if (collided(world, contact)) {
          rec.outcome = metrics::Outcome::Collision;
          break;
        }
        if (euclidean_distance(world.robot.position, goal) <= cfg.goal_tolerance) break;
        if (static_cast<std::size_t>(world.time_step) >= cfg.max_steps) break;
      }
    }
  } catch (const std::exception& e) {
    rec.outcome = metrics::Outcome::Error;
    res.error = e.what();
  }
  res.metrics = metrics::episode_metrics(rec, pred_len, cfg.robot_radius, cfg.human_radius);

  Json header;
  header["type"] = "header";
  header["method"] = to_string(cfg.method);
  header["case"] = scenario.index;
  header["seed"] = scenario.seed;
  header["humans"] = N;
  header["dt"] = cfg.dt;
  header["pred_len"] = pred_len;
  header["robot_radius"] = cfg.robot_radius;
  header["human_radius"] = cfg.human_radius;
  header["goal_tolerance"] = cfg.goal_tolerance;
  header["robot_goal"] = to_json(goal);
  Json goals = Json::array();
  for (const auto& h : scenario.humans) goals.push_back(to_json(h.goal));
  header["human_goals"] = std::move(goals);
  header["outcome"] = metrics::to_string(rec.outcome);
  header["steps"] = rec.steps();
  if (!res.error.empty()) header["error"] = res.error;
  res.replay.reserve(frames.size() + 1);
  res.replay.push_back(std::move(header));
  for (auto& f : frames) res.replay.push_back(std::move(f));
  return res;
}

std::size_t effective_workers(std::size_t configured) {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0' || v == 0) {
      throw std::invalid_argument(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
    }
    return static_cast<std::size_t>(v);
  }
  return configured;
}

SuiteResult run_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto predictor = make_predictor(cfg);
  const auto scenarios = generate_scenarios(cfg.humans, cfg.cases, cfg.seed, cfg.scenario);

  SuiteResult out;
  if (cfg.method == Method::Offcp) {
    if (!cfg.offcp_radii_file.empty()) {
      std::ifstream in(cfg.offcp_radii_file);
      if (!in) throw std::runtime_error("cannot open radii file '" + cfg.offcp_radii_file + "'");
      try {
        out.offcp_radii = radii_from_json(nlohmann::json::parse(in));
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad radii file '" + cfg.offcp_radii_file + "': " + e.what());
      }
      if (out.offcp_radii->radii.size() != cfg.pred_len) {
        throw std::invalid_argument("radii file '" + cfg.offcp_radii_file + "' does not match pred_len");
      }
    } else {
      out.offcp_radii = calibrate_offcp(cfg, *predictor);
    }
  }

  out.episodes.resize(scenarios.size());
  const conformal::ConformalRadii* radii = out.offcp_radii ? &*out.offcp_radii : nullptr;
  parallel_for(scenarios.size(), effective_workers(cfg.workers), [&](std::size_t i) {
    out.episodes[i] = run_episode(scenarios[i], cfg, *predictor, radii);
  });

  std::vector<metrics::EpisodeMetrics> per_case;
  per_case.reserve(out.episodes.size());
  for (const auto& e : out.episodes) per_case.push_back(e.metrics);
  out.summary = metrics::aggregate(per_case);
  return out;
}

std::string csv_header() {
  return "method,NI,CS,ES,SR,ITR_mean,ITR_std,SD_mean,SD_std,PL_mean,PL_std,NT_mean,NT_std,CR_mean,CR_std";
}

std::string csv_row(const RunConfig& cfg, const metrics::SuiteSummary& s) {
  std::string row = to_string(cfg.method);
  row += "," + std::to_string(cfg.icp.iterations);
  row += "," + std::to_string(cfg.icp.rollout.episodes);
  row += std::string(",") + to_string(cfg.icp.exec);
  row += "," + format_double(s.sr);
  for (const auto* st : {&s.itr, &s.sd, &s.pl, &s.nt, &s.cr}) {
    row += "," + format_double(st->mean) + "," + format_double(st->std);
  }
  return row;
}

void write_artifacts(const RunConfig& cfg, const SuiteResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    return f;
  };
  auto close = [](std::ofstream& f, const fs::path& p) {
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + p.string() + "'");
  };

  for (const auto& ep : result.episodes) {
    char name[32];
    std::snprintf(name, sizeof name, "replay_%04zu.jsonl", ep.scenario.index);
    const fs::path p = dir / name;
    auto f = open(p);
    for (const auto& line : ep.replay) f << line.dump() << '\n';
    close(f, p);
  }

  {
    const fs::path p = dir / "metrics.csv";
    auto f = open(p);
    f << csv_header() << '\n' << csv_row(cfg, result.summary) << '\n';
    close(f, p);
  }

  Json summary;
  summary["method"] = to_string(cfg.method);
  summary["humans"] = cfg.humans;
  summary["cases"] = result.summary.cases;
  summary["seed"] = cfg.seed;
  summary["NI"] = cfg.icp.iterations;
  summary["CS"] = cfg.icp.rollout.episodes;
  summary["ES"] = to_string(cfg.icp.exec);
  summary["alpha"] = cfg.icp.alpha;
  summary["SR"] = result.summary.sr;
  summary["ITR"] = stat_json(result.summary.itr);
  summary["SD"] = stat_json(result.summary.sd);
  summary["PL"] = stat_json(result.summary.pl);
  summary["NT"] = stat_json(result.summary.nt);
  summary["CR"] = stat_json(result.summary.cr);
  if (result.offcp_radii) summary["offcp_radii"] = radii_to_json(*result.offcp_radii);
  Json episodes = Json::array();
  for (const auto& ep : result.episodes) {
    Json e;
    e["case"] = ep.scenario.index;
    e["outcome"] = metrics::to_string(ep.metrics.outcome);
    e["NT"] = ep.metrics.nt;
    e["PL"] = ep.metrics.pl;
    e["ITR"] = ep.metrics.itr;
    e["SD"] = ep.metrics.sd ? Json(*ep.metrics.sd) : Json(nullptr);
    e["CR"] = ep.metrics.cr ? Json(*ep.metrics.cr) : Json(nullptr);
    if (!ep.error.empty()) e["error"] = ep.error;
    episodes.push_back(std::move(e));
  }
  summary["episodes"] = std::move(episodes);
  const fs::path p = dir / "summary.json";
  auto f = open(p);
  f << summary.dump(2) << '\n';
  close(f, p);
}

metrics::EpisodeRecord record_from_replay(const std::vector<nlohmann::json>& lines, std::size_t* pred_len,
                                          double* robot_radius, double* human_radius) {
  if (lines.empty() || lines.front().value("type", "") != "header") {
    throw std::invalid_argument("replay: first line must be the header");
  }
  const auto& header = lines.front();
  metrics::EpisodeRecord rec;
  rec.dt = header.at("dt").get<double>();
  rec.outcome = metrics::outcome_from_string(header.at("outcome").get<std::string>());
  const auto N = header.at("humans").get<std::size_t>();
  *pred_len = header.at("pred_len").get<std::size_t>();
  *robot_radius = header.at("robot_radius").get<double>();
  *human_radius = header.at("human_radius").get<double>();
  rec.humans.resize(N);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& f = lines[k];
    if (f.at("t").get<std::size_t>() != k - 1) throw std::invalid_argument("replay: frames out of order");
    rec.robot.push_back(vec2_from_json(f.at("robot")));
    const auto& humans = f.at("humans");
    if (humans.size() != N) throw std::invalid_argument("replay: human count changes between frames");
    for (std::size_t i = 0; i < N; ++i) rec.humans[i].push_back(vec2_from_json(humans[i]));
    if (!f.at("radii").is_null() && !f.at("predictions").is_null()) {
      nlohmann::json wrapped;
      wrapped["predictions"] = f.at("predictions");
      rec.cycles.push_back({k - 1, prediction_from_json(wrapped), f.at("radii").get<std::vector<double>>()});
    }
  }
  return rec;
}

metrics::EpisodeMetrics replay_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay '" + path + "'");
  std::vector<nlohmann::json> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  std::size_t pred_len = 0;
  double rr = 0.0, rh = 0.0;
  const auto rec = record_from_replay(lines, &pred_len, &rr, &rh);
  return metrics::episode_metrics(rec, pred_len, rr, rh);
}

}  // namespace icpnav::harness
