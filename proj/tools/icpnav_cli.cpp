// Command-line front end: run suites, recompute replay metrics, precompute
// OffCP radii.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icpnav/harness.hpp"

namespace {

using namespace icpnav;

struct Overrides {
  std::optional<std::string> method;
  std::optional<std::size_t> humans;
  std::optional<std::size_t> cases;
  std::optional<std::size_t> ni;
  std::optional<std::size_t> cs;
  std::optional<std::string> es;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
};

harness::RunConfig resolve(const std::string& path, const Overrides& o) {
  harness::RunConfig cfg = path.empty() ? harness::RunConfig{} : harness::load_config(path);
  if (o.method) cfg.method = harness::method_from_string(*o.method);
  if (o.humans) cfg.humans = *o.humans;
  if (o.cases) cfg.cases = *o.cases;
  if (o.ni) cfg.icp.iterations = *o.ni;
  if (o.cs) cfg.icp.rollout.episodes = *o.cs;
  if (o.es) cfg.icp.exec = harness::exec_from_string(*o.es);
  if (o.alpha) cfg.icp.alpha = *o.alpha;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  cfg.synchronize();
  return cfg;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--method", o.method, "icp | offcp | acp_a | acp_w | orca");
  cmd->add_option("--humans", o.humans, "number of humans N");
  cmd->add_option("--cases", o.cases, "number of test cases");
  cmd->add_option("--ni", o.ni, "ICP iterations");
  cmd->add_option("--cs", o.cs, "calibration size (rollouts per iteration)");
  cmd->add_option("--es", o.es, "execution scheme: pse | sse");
  cmd->add_option("--alpha", o.alpha, "miscoverage level");
  cmd->add_option("--seed", o.seed, "suite seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "concurrent test cases (ICP_WORKERS overrides)");
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

int run(const std::string& config, const Overrides& o) {
  const auto cfg = resolve(config, o);
  const auto result = harness::run_suite(cfg);
  harness::write_artifacts(cfg, result);

  std::vector<double> cycles;
  std::size_t errors = 0;
  for (const auto& ep : result.episodes) {
    cycles.insert(cycles.end(), ep.record.cycle_wall_time_s.begin(), ep.record.cycle_wall_time_s.end());
    if (!ep.error.empty()) {
      ++errors;
      std::cerr << "case " << ep.scenario.index << " failed: " << ep.error << '\n';
    }
  }
  std::cout << harness::csv_header() << '\n' << harness::csv_row(cfg, result.summary) << '\n';
  std::printf("cases %zu, errors %zu, median planning cycle %.4f s, artifacts in %s\n", result.summary.cases,
              errors, median(cycles), cfg.out_dir.c_str());
  return 0;
}

int replay(const std::string& path) {
  const auto m = harness::replay_metrics(path);
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("absent"); };
  std::printf("outcome %s\nNT %.17g\nPL %.17g\nITR %.17g\n", metrics::to_string(m.outcome), m.nt, m.pl, m.itr);
  std::printf("SD %s\nCR %s\n", opt(m.sd).c_str(), opt(m.cr).c_str());
  return 0;
}

int calibrate(const std::string& config, const Overrides& o, const std::string& out) {
  const auto cfg = resolve(config, o);
  cfg.validate();
  const auto predictor = harness::make_predictor(cfg);
  const auto radii = harness::calibrate_offcp(cfg, *predictor);
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
  f << harness::radii_to_json(radii).dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing '" + out + "'");
  std::cout << "wrote " << out << " (" << radii.sample_count << " scores per step)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd navigation with interaction-aware conformal prediction"};
  app.require_subcommand(1);

  std::string config;
  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "run a test suite and write replay, CSV and summary files");
  run_cmd->add_option("--config", config, "INI configuration file")->check(CLI::ExistingFile);
  add_overrides(run_cmd, run_o);

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay-metrics", "recompute episode metrics from a replay file");
  replay_cmd->add_option("replay", replay_path, "replay .jsonl file")->required()->check(CLI::ExistingFile);

  std::string radii_out;
  Overrides cal_o;
  auto* cal_cmd = app.add_subcommand("calibrate-offcp", "precompute offline conformal radii");
  cal_cmd->add_option("--config", config, "INI configuration file")->check(CLI::ExistingFile);
  cal_cmd->add_option("--out", radii_out, "output JSON file")->required();
  cal_cmd->add_option("--humans", cal_o.humans, "number of humans N");
  cal_cmd->add_option("--alpha", cal_o.alpha, "miscoverage level");
  cal_cmd->add_option("--seed", cal_o.seed, "suite seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config, run_o);
    if (*replay_cmd) return replay(replay_path);
    if (*cal_cmd) {
      cal_o.method = "offcp";
      return calibrate(config, cal_o, radii_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
