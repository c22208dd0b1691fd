#pragma once

// Dense two-phase simplex for  min c^T x  s.t.  A x = b, x >= 0.
// Sized for the routing relaxations (a few hundred columns).

#include <Eigen/Dense>

namespace airsea {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  int pivots = 0;
};

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace airsea
