#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "icpnav/harness.hpp"

using namespace icpnav;
using namespace icpnav::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("icpnav_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

RunConfig small_run(Method m, std::size_t humans, std::size_t cases) {
  RunConfig cfg;
  cfg.method = m;
  cfg.humans = humans;
  cfg.cases = cases;
  cfg.max_steps = 120;
  cfg.workers = 1;
  cfg.synchronize();
  return cfg;
}

void check_same_metrics(const metrics::EpisodeMetrics& a, const metrics::EpisodeMetrics& b) {
  CHECK(a.outcome == b.outcome);
  CHECK(a.nt == b.nt);
  CHECK(a.pl == b.pl);
  CHECK(a.itr == b.itr);
  CHECK(a.sd == b.sd);
  CHECK(a.cr == b.cr);
}

}  // namespace

TEST_CASE("generated scenarios respect separation and the arena") {
  ScenarioParams p;
  const auto cases = generate_scenarios(20, 20, 3, p);
  REQUIRE(cases.size() == 20);
  for (const auto& s : cases) {
    CHECK(s.humans.size() == 20);
    std::vector<AgentState> all{s.robot};
    all.insert(all.end(), s.humans.begin(), s.humans.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(std::fabs(all[i].position.x) <= p.arena_half_extent);
      CHECK(std::fabs(all[i].position.y) <= p.arena_half_extent);
      CHECK(std::fabs(all[i].goal.x) <= p.arena_half_extent);
      CHECK(std::fabs(all[i].goal.y) <= p.arena_half_extent);
      CHECK(all[i].velocity.norm() == 0.0);
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        CHECK(euclidean_distance(all[i].position, all[j].position) >= 0.9 - 1e-12);
        CHECK(euclidean_distance(all[i].goal, all[j].goal) >= 0.9 - 1e-12);
      }
    }
  }
}

TEST_CASE("scenario sequences are reproducible and prefix-stable") {
  const auto a = generate_scenarios(6, 10, 11);
  const auto b = generate_scenarios(6, 4, 11);
  const auto c = generate_scenarios(6, 4, 12);
  bool differs = false;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a[i].seed == b[i].seed);
    for (std::size_t h = 0; h < 6; ++h) {
      CHECK(a[i].humans[h].position.x == b[i].humans[h].position.x);
      CHECK(a[i].humans[h].goal.y == b[i].humans[h].goal.y);
      differs = differs || a[i].humans[h].position.x != c[i].humans[h].position.x;
    }
  }
  CHECK(differs);
  CHECK(a[0].seed != a[1].seed);
}

TEST_CASE("overcrowded scenarios fail loudly") {
  ScenarioParams p;
  p.circle_radius = 1.0;
  p.arena_half_extent = 1.5;
  p.max_attempts = 200;
  CHECK_THROWS_AS(generate_scenarios(40, 1, 1, p), std::runtime_error);
  CHECK_THROWS_AS(generate_scenarios(3, 0, 1), std::invalid_argument);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const auto good = write_file(dir / "good.ini",
                               "[run]\nmethod = acp_w\nhumans = 7\nseed = 9\n[icp]\niterations = 2\nexec = sse\n"
                               "[scene]\ndt = 0.5\n");
  const auto cfg = load_config(good.string());
  CHECK(cfg.method == Method::AcpW);
  CHECK(cfg.humans == 7);
  CHECK(cfg.seed == 9);
  CHECK(cfg.icp.iterations == 2);
  CHECK(cfg.icp.exec == icp::ExecutionScheme::SingleStep);
  CHECK(cfg.mpc.dt == 0.5);  // synchronized into the sub-configs
  CHECK(cfg.orca.dt == 0.5);

  CHECK_THROWS_AS(load_config(write_file(dir / "typo.ini", "[run]\nhumanz = 3\n").string()), std::invalid_argument);
  CHECK_THROWS_AS(load_config(write_file(dir / "bare.ini", "humans = 3\n").string()), std::invalid_argument);
  CHECK_THROWS_AS(load_config(write_file(dir / "nan.ini", "[scene]\ndt = fast\n").string()), std::invalid_argument);
  CHECK_THROWS(load_config((dir / "missing.ini").string()));

  const auto shipped = load_config(std::string(ICPNAV_SOURCE_DIR) + "/configs/default.ini");
  CHECK(shipped.method == Method::Icp);
  CHECK_NOTHROW(shipped.validate());
  fs::remove_all(dir);
}

TEST_CASE("ICP configs with too little calibration data are rejected") {
  auto cfg = small_run(Method::Icp, 1, 1);
  cfg.icp.rollout.episodes = 1;
  cfg.icp.rollout.pad = 0;
  cfg.synchronize();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.humans = 19;
  cfg.synchronize();
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("ORCA suite writes one replay per case and a one-row CSV") {
  auto cfg = small_run(Method::Orca, 5, 5);
  cfg.out_dir = scratch("orca").string();
  const auto res = run_suite(cfg);
  write_artifacts(cfg, res);
  std::size_t replays = 0, csvs = 0;
  for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
    replays += e.path().extension() == ".jsonl";
    csvs += e.path().extension() == ".csv";
  }
  CHECK(replays == 5);
  CHECK(csvs == 1);
  const std::string csv = slurp(fs::path(cfg.out_dir) / "metrics.csv");
  CHECK(csv == csv_header() + "\n" + csv_row(cfg, res.summary) + "\n");
  CHECK(res.summary.cases == 5);

  // every replay alone reproduces its episode's metrics exactly
  std::vector<metrics::EpisodeMetrics> from_files;
  for (const auto& ep : res.episodes) {
    char name[32];
    std::snprintf(name, sizeof name, "replay_%04zu.jsonl", ep.scenario.index);
    from_files.push_back(replay_metrics((fs::path(cfg.out_dir) / name).string()));
    check_same_metrics(from_files.back(), ep.metrics);
  }
  CHECK(csv_row(cfg, metrics::aggregate(from_files)) == csv_row(cfg, res.summary));
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("reruns are byte-identical regardless of worker count") {
  for (Method m : {Method::Icp, Method::AcpA}) {
    auto cfg = small_run(m, 4, 3);
    cfg.icp.rollout.pad = 2;  // 2 x 3 x 4 = 24 scores
    cfg.max_steps = 60;
    cfg.synchronize();
    cfg.out_dir = scratch("det_a").string();
    write_artifacts(cfg, run_suite(cfg));
    const std::string first = cfg.out_dir;
    cfg.out_dir = scratch("det_b").string();
    cfg.workers = 8;
    cfg.icp.rollout.workers = 3;
    write_artifacts(cfg, run_suite(cfg));
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(first)) {
      const auto other = fs::path(cfg.out_dir) / e.path().filename();
      if (e.path().filename() == "summary.json") continue;  // echoes the worker count
      REQUIRE(fs::exists(other));
      CHECK(slurp(e.path()) == slurp(other));
      ++compared;
    }
    CHECK(compared == 4);
    fs::remove_all(first);
    fs::remove_all(cfg.out_dir);
  }
}

TEST_CASE("a failing predictor is recorded per episode") {
  auto cfg = small_run(Method::AcpA, 3, 2);
  cfg.predictor_command = "false";
  const auto res = run_suite(cfg);
  REQUIRE(res.episodes.size() == 2);
  for (const auto& ep : res.episodes) {
    CHECK(ep.metrics.outcome == metrics::Outcome::Error);
    CHECK(ep.error.find("exited with status") != std::string::npos);
    CHECK(ep.replay.front().at("error").get<std::string>() == ep.error);
  }
  CHECK(res.summary.sr == 0.0);
}

TEST_CASE("OffCP radii survive a file round trip") {
  const conformal::ConformalRadii r{{0.1, 0.2, 0.30000000000000004}, 0.05, 123};
  const auto back = radii_from_json(nlohmann::json::parse(radii_to_json(r).dump()));
  CHECK(back.radii == r.radii);
  CHECK(back.alpha == r.alpha);
  CHECK(back.sample_count == r.sample_count);
}

TEST_CASE("worker override from the environment") {
  ::unsetenv(kWorkersEnv);
  CHECK(effective_workers(6) == 6);
  ::setenv(kWorkersEnv, "2", 1);
  CHECK(effective_workers(6) == 2);
  ::setenv(kWorkersEnv, "", 1);
  CHECK(effective_workers(6) == 6);
  ::setenv(kWorkersEnv, "many", 1);
  CHECK_THROWS(effective_workers(6));
  ::unsetenv(kWorkersEnv);
}
