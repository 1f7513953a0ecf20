#pragma once

#include <cstdint>
#include <string>

#include "icpnav/baselines.hpp"
#include "icpnav/icp.hpp"
#include "icpnav/mpc.hpp"
#include "icpnav/orca.hpp"
#include "icpnav/scenario.hpp"

namespace icpnav::harness {

enum class Method { Icp, Offcp, AcpA, AcpW, Orca };

const char* to_string(Method m);
Method method_from_string(const std::string& s);
const char* to_string(icp::ExecutionScheme e);
icp::ExecutionScheme exec_from_string(const std::string& s);

struct AcpParams {
  double eta_averaged = 0.05;
  double eta_worst = 0.01;
  std::size_t window = 30;
  std::size_t min_samples = 5;
  double fallback_radius = 0.5;
};

/// Everything a suite run depends on. The time step, horizons and radii in
/// the sub-configs are kept consistent by `synchronize()`.
struct RunConfig {
  Method method = Method::Icp;
  std::size_t humans = 10;
  std::size_t cases = 20;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t workers = 8;

  double dt = 0.25;
  double robot_radius = 0.4;
  double human_radius = 0.4;
  double robot_v_max = 1.0;
  double human_v_max = 1.0;
  std::size_t obs_len = 5;
  std::size_t pred_len = 5;
  std::size_t max_steps = 400;  ///< 100 s at dt = 0.25
  double goal_tolerance = 0.1;  ///< m
  std::string predictor_command;  ///< empty: constant-velocity predictor

  ScenarioParams scenario;
  orca::OrcaParams orca;
  mpc::MpcConfig mpc;
  icp::IcpConfig icp;  ///< NI, CS, ES, alpha live here
  baselines::OffcpConfig offcp;
  std::string offcp_radii_file;  ///< load instead of calibrating when set
  AcpParams acp;

  /// Propagates the shared scalars above into the sub-configs.
  void synchronize();
  /// Throws std::invalid_argument describing the first bad parameter.
  void validate() const;
};

/// Reads an INI file. Unknown keys are rejected so typos do not pass
/// silently; missing keys keep their defaults.
RunConfig load_config(const std::string& path);

/// Environment variable that overrides the worker count.
inline constexpr const char* kWorkersEnv = "ICP_WORKERS";

}  // namespace icpnav::harness
