#include "icpnav/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "icpnav/conformal.hpp"

namespace icpnav::harness {

const char* to_string(Method m) {
  switch (m) {
    case Method::Icp:
      return "icp";
    case Method::Offcp:
      return "offcp";
    case Method::AcpA:
      return "acp_a";
    case Method::AcpW:
      return "acp_w";
    case Method::Orca:
      return "orca";
  }
  return "icp";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::Icp, Method::Offcp, Method::AcpA, Method::AcpW, Method::Orca}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "' (expected icp, offcp, acp_a, acp_w or orca)");
}

const char* to_string(icp::ExecutionScheme e) { return e == icp::ExecutionScheme::PredStep ? "pse" : "sse"; }

icp::ExecutionScheme exec_from_string(const std::string& s) {
  if (s == "pse") return icp::ExecutionScheme::PredStep;
  if (s == "sse") return icp::ExecutionScheme::SingleStep;
  throw std::invalid_argument("unknown execution scheme '" + s + "' (expected pse or sse)");
}

void RunConfig::synchronize() {
  orca.dt = dt;
  orca.v_max = human_v_max;
  orca.agent_radius = human_radius;

  mpc.dt = dt;
  mpc.v_max = robot_v_max;
  mpc.pred_len = pred_len;
  mpc.robot_radius = robot_radius;
  mpc.human_radius = human_radius;

  icp.rollout.obs_len = obs_len;
  icp.rollout.pred_len = pred_len;

  offcp.obs_len = obs_len;
  offcp.pred_len = pred_len;
  offcp.alpha = icp.alpha;
  offcp.rule = icp.rule;

  scenario.robot_radius = robot_radius;
  scenario.human_radius = human_radius;
}

void RunConfig::validate() const {
  if (cases == 0) throw std::invalid_argument("config: cases must be >= 1");
  if (workers == 0) throw std::invalid_argument("config: workers must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
  if (obs_len < 2 && predictor_command.empty()) {
    throw std::invalid_argument("config: the constant-velocity predictor needs obs_len >= 2");
  }
  if (pred_len == 0) throw std::invalid_argument("config: pred_len must be >= 1");
  if (max_steps == 0) throw std::invalid_argument("config: max_steps must be >= 1");
  if (!(goal_tolerance > 0.0)) throw std::invalid_argument("config: goal_tolerance must be > 0");
  if (mpc.horizon < pred_len) throw std::invalid_argument("config: mpc horizon must be >= pred_len");
  orca.validate();
  mpc.validate();
  icp.validate();
  if (icp.exec_steps() > mpc.horizon) throw std::invalid_argument("config: execution steps exceed the mpc horizon");

  if (method == Method::Icp && humans > 0) {
    // Every calibration round pools CS rollouts x windows x humans scores per step.
    const std::size_t windows = icp.rollout.pad + 1;
    const std::size_t n = icp.rollout.episodes * windows * humans;
    const std::size_t need = conformal::minimum_samples(icp.alpha, icp.rule);
    if (n < need) {
      throw std::invalid_argument("config: ICP calibration pools " + std::to_string(n) +
                                  " scores per step but alpha = " + std::to_string(icp.alpha) + " needs " +
                                  std::to_string(need) + "; raise calibration_size or rollout_pad");
    }
  }
  if (method == Method::Offcp && offcp_radii_file.empty() && offcp.episodes == 0) {
    throw std::invalid_argument("config: offcp needs calibration episodes or a radii file");
  }
  if (method == Method::AcpA || method == Method::AcpW) {
    if (acp.window == 0) throw std::invalid_argument("config: acp window must be >= 1");
    if (!(acp.eta_averaged > 0.0) || !(acp.eta_worst > 0.0)) {
      throw std::invalid_argument("config: acp learning rates must be > 0");
    }
  }
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(out)) throw std::invalid_argument("config: " + key + " = '" + v + "' is not a number");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v[0] != '-') out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw std::invalid_argument("config: " + key + " = '" + v + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " = '" + v + "' is not a boolean");
}

#define ICP_DOUBLE(field) [](RunConfig& c, const std::string& v) { c.field = to_double(#field, v); }
#define ICP_SIZE(field) \
  [](RunConfig& c, const std::string& v) { c.field = static_cast<std::size_t>(to_uint(#field, v)); }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.method", [](RunConfig& c, const std::string& v) { c.method = method_from_string(v); }},
      {"run.humans", ICP_SIZE(humans)},
      {"run.cases", ICP_SIZE(cases)},
      {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = to_uint("seed", v); }},
      {"run.out", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"run.workers", ICP_SIZE(workers)},
      {"run.max_steps", ICP_SIZE(max_steps)},
      {"run.goal_tolerance", ICP_DOUBLE(goal_tolerance)},
      {"run.predictor_command", [](RunConfig& c, const std::string& v) { c.predictor_command = v; }},

      {"scene.dt", ICP_DOUBLE(dt)},
      {"scene.robot_radius", ICP_DOUBLE(robot_radius)},
      {"scene.human_radius", ICP_DOUBLE(human_radius)},
      {"scene.robot_v_max", ICP_DOUBLE(robot_v_max)},
      {"scene.human_v_max", ICP_DOUBLE(human_v_max)},
      {"scene.obs_len", ICP_SIZE(obs_len)},
      {"scene.pred_len", ICP_SIZE(pred_len)},
      {"scene.geometry",
       [](RunConfig& c, const std::string& v) {
         if (v == "circle") {
           c.scenario.geometry = Geometry::Circle;
         } else if (v == "square") {
           c.scenario.geometry = Geometry::Square;
         } else {
           throw std::invalid_argument("config: geometry must be circle or square, got '" + v + "'");
         }
       }},
      {"scene.circle_radius", ICP_DOUBLE(scenario.circle_radius)},
      {"scene.angular_jitter", ICP_DOUBLE(scenario.angular_jitter)},
      {"scene.radial_jitter", ICP_DOUBLE(scenario.radial_jitter)},
      {"scene.square_half_extent", ICP_DOUBLE(scenario.square_half_extent)},
      {"scene.arena_half_extent", ICP_DOUBLE(scenario.arena_half_extent)},

      {"orca.neighbor_dist", ICP_DOUBLE(orca.neighbor_dist)},
      {"orca.max_neighbors", ICP_SIZE(orca.max_neighbors)},
      {"orca.time_horizon", ICP_DOUBLE(orca.time_horizon_agent)},

      {"mpc.horizon", ICP_SIZE(mpc.horizon)},
      {"mpc.w_goal", ICP_DOUBLE(mpc.w_goal)},
      {"mpc.w_jerk", ICP_DOUBLE(mpc.w_jerk)},
      {"mpc.w_reg", ICP_DOUBLE(mpc.w_reg)},
      {"mpc.max_outer_iterations", ICP_SIZE(mpc.max_outer_iterations)},
      {"mpc.displacement_tol", ICP_DOUBLE(mpc.displacement_tol)},
      {"mpc.collision_tol", ICP_DOUBLE(mpc.collision_tol)},
      {"mpc.penalty", ICP_DOUBLE(mpc.penalty)},
      {"mpc.max_penalty", ICP_DOUBLE(mpc.max_penalty)},

      {"icp.iterations", ICP_SIZE(icp.iterations)},
      {"icp.calibration_size", ICP_SIZE(icp.rollout.episodes)},
      {"icp.exec", [](RunConfig& c, const std::string& v) { c.icp.exec = exec_from_string(v); }},
      {"icp.alpha", ICP_DOUBLE(icp.alpha)},
      {"icp.tol_plan", ICP_DOUBLE(icp.tol_plan)},
      {"icp.tol_radii", ICP_DOUBLE(icp.tol_radii)},
      {"icp.early_stop", [](RunConfig& c, const std::string& v) { c.icp.early_stop = to_bool("early_stop", v); }},
      {"icp.rollout_pad", ICP_SIZE(icp.rollout.pad)},
      {"icp.rollout_workers", ICP_SIZE(icp.rollout.workers)},
      {"icp.noise_probability", ICP_DOUBLE(icp.rollout.noise.probability)},
      {"icp.noise_magnitude", ICP_DOUBLE(icp.rollout.noise.magnitude)},
      {"icp.quantile",
       [](RunConfig& c, const std::string& v) {
         if (v == "finite_sample") {
           c.icp.rule = conformal::QuantileRule::FiniteSample;
         } else if (v == "empirical") {
           c.icp.rule = conformal::QuantileRule::Empirical;
         } else {
           throw std::invalid_argument("config: quantile must be finite_sample or empirical, got '" + v + "'");
         }
       }},

      {"offcp.episodes", ICP_SIZE(offcp.episodes)},
      {"offcp.max_frames", ICP_SIZE(offcp.max_frames)},
      {"offcp.noise_probability", ICP_DOUBLE(offcp.noise.probability)},
      {"offcp.noise_magnitude", ICP_DOUBLE(offcp.noise.magnitude)},
      {"offcp.radii_file", [](RunConfig& c, const std::string& v) { c.offcp_radii_file = v; }},

      {"acp.eta_averaged", ICP_DOUBLE(acp.eta_averaged)},
      {"acp.eta_worst", ICP_DOUBLE(acp.eta_worst)},
      {"acp.window", ICP_SIZE(acp.window)},
      {"acp.min_samples", ICP_SIZE(acp.min_samples)},
      {"acp.fallback_radius", ICP_DOUBLE(acp.fallback_radius)},
  };
  return table;
}

#undef ICP_DOUBLE
#undef ICP_SIZE

}  // namespace

RunConfig load_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("cannot read config '" + path + "': " + e.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config '" + path + "': key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw std::invalid_argument("config '" + path + "': unknown key '" + full + "'");
      it->second(cfg, value.get_value<std::string>());
    }
  }
  cfg.synchronize();
  return cfg;
}

}  // namespace icpnav::harness
