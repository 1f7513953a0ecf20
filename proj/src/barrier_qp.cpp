#include "barrier_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace icpnav::mpc::detail {

namespace {

struct Point {
  Eigen::VectorXd u;
  Eigen::VectorXd s;
};

// Barrier-augmented objective; +inf outside the strict interior.
double merit(const ElasticQp& qp, const Point& z, double t) {
  const auto blocks = z.u.size() / 2;
  double phi = t * (0.5 * z.u.dot(qp.P * z.u) + qp.q.dot(z.u) + qp.penalty * z.s.sum());
  const double vmax_sq = qp.v_max * qp.v_max;
  for (Eigen::Index k = 0; k < blocks; ++k) {
    const double h = vmax_sq - z.u.segment<2>(2 * k).squaredNorm();
    if (h <= 0.0) return std::numeric_limits<double>::infinity();
    phi -= std::log(h);
  }
  for (std::size_t j = 0; j < qp.a.size(); ++j) {
    const double sj = z.s[static_cast<Eigen::Index>(j)];
    const double c = qp.a[j].dot(z.u) + qp.b[j] + sj;
    if (sj <= 0.0 || c <= 0.0) return std::numeric_limits<double>::infinity();
    phi -= std::log(sj) + std::log(c);
  }
  return phi;
}

// One centering pass for a fixed t. Returns the Newton steps taken.
int center(const ElasticQp& qp, Point& z, double t) {
  const Eigen::Index n = z.u.size();
  const std::size_t m = qp.a.size();
  const auto blocks = n / 2;
  const double vmax_sq = qp.v_max * qp.v_max;

  int steps = 0;
  for (; steps < 200; ++steps) {
    Eigen::MatrixXd H = t * qp.P;
    Eigen::VectorXd g_u = t * (qp.P * z.u + qp.q);
    for (Eigen::Index k = 0; k < blocks; ++k) {
      const Eigen::Vector2d uk = z.u.segment<2>(2 * k);
      const double h = vmax_sq - uk.squaredNorm();
      g_u.segment<2>(2 * k) += 2.0 * uk / h;
      H.block<2, 2>(2 * k, 2 * k) += (2.0 / h) * Eigen::Matrix2d::Identity() + (4.0 / (h * h)) * uk * uk.transpose();
    }

    Eigen::VectorXd g_s(static_cast<Eigen::Index>(m));
    Eigen::VectorXd d(static_cast<Eigen::Index>(m));
    std::vector<double> inv_c2(m);
    Eigen::MatrixXd reduced = H;
    Eigen::VectorXd rhs = -g_u;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double sj = z.s[jj];
      const double c = qp.a[j].dot(z.u) + qp.b[j] + sj;
      inv_c2[j] = 1.0 / (c * c);
      g_u -= qp.a[j] / c;
      rhs += qp.a[j] / c;
      g_s[jj] = t * qp.penalty - 1.0 / sj - 1.0 / c;
      d[jj] = 1.0 / (sj * sj) + inv_c2[j];
      // Schur complement of the diagonal slack block.
      const double keep = inv_c2[j] - inv_c2[j] * inv_c2[j] / d[jj];
      reduced.noalias() += keep * qp.a[j] * qp.a[j].transpose();
      rhs += qp.a[j] * (inv_c2[j] * g_s[jj] / d[jj]);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(reduced);
    Eigen::VectorXd du = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(rhs))
                                                       : Eigen::VectorXd(reduced.ldlt().solve(rhs));
    Eigen::VectorXd ds(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      ds[jj] = (-g_s[jj] - inv_c2[j] * qp.a[j].dot(du)) / d[jj];
    }

    const double slope = g_u.dot(du) + g_s.dot(ds);
    if (-slope * 0.5 < 1e-12) break;

    const double phi0 = merit(qp, z, t);
    double step = 1.0;
    Point trial;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      trial.u = z.u + step * du;
      trial.s = z.s + step * ds;
      const double phi = merit(qp, trial, t);
      if (std::isfinite(phi) && phi <= phi0 + 0.25 * step * slope) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    z = std::move(trial);
  }
  return steps;
}

}  // namespace

ElasticQpResult solve_elastic_qp(const ElasticQp& qp, Eigen::VectorXd u0, double gap_tol) {
  const Eigen::Index n = u0.size();
  const auto blocks = n / 2;
  const double inner = 0.999 * qp.v_max;
  for (Eigen::Index k = 0; k < blocks; ++k) {
    auto uk = u0.segment<2>(2 * k);
    const double norm = uk.norm();
    if (norm > inner) uk *= inner / norm;
  }

  Point z{std::move(u0), Eigen::VectorXd(static_cast<Eigen::Index>(qp.a.size()))};
  for (std::size_t j = 0; j < qp.a.size(); ++j) {
    const double c = qp.a[j].dot(z.u) + qp.b[j];
    z.s[static_cast<Eigen::Index>(j)] = std::max(0.0, -c) + 1.0;
  }

  const double constraints = static_cast<double>(blocks + 2 * qp.a.size());
  ElasticQpResult result;
  double t = 1.0;
  for (;;) {
    result.newton_steps += center(qp, z, t);
    if (constraints / t < gap_tol || constraints == 0.0) break;
    t *= 10.0;
  }
  result.u = std::move(z.u);
  result.slack.assign(z.s.data(), z.s.data() + z.s.size());
  return result;
}

}  // namespace icpnav::mpc::detail
