#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace icpnav::mpc::detail {

/// Convex subproblem of the planner:
///
///   minimize    1/2 u'Pu + q'u + penalty * sum(s)
///   subject to  |(u[2k], u[2k+1])| <= v_max          for every block k
///               a_j'u + b_j + s_j >= 0,  s_j >= 0     for every row j
///
/// The slacks make the linear rows elastic so the program is always
/// feasible; a zero slack means the row holds exactly.
struct ElasticQp {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double v_max = 1.0;
  std::vector<Eigen::VectorXd> a;
  std::vector<double> b;
  double penalty = 1e4;
};

struct ElasticQpResult {
  Eigen::VectorXd u;
  std::vector<double> slack;
  int newton_steps = 0;
};

/// Log-barrier interior-point solve, warm-started from `u0` (pulled strictly
/// inside the speed disks if needed). Stops when the duality gap bound falls
/// below `gap_tol`.
ElasticQpResult solve_elastic_qp(const ElasticQp& qp, Eigen::VectorXd u0, double gap_tol = 1e-10);

}  // namespace icpnav::mpc::detail
