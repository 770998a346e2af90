#pragma once

#include <Eigen/Dense>

namespace rdo::detail {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

// min c^T x  s.t.  A x <= h, x free.
//
// Solved through its dual  max -h^T y  s.t.  A^T y = -c, y >= 0  with a
// two-phase revised simplex method whose basis is only n x n, so the cost
// per pivot is linear in the number of rows. The primal point is read off
// the simplex multipliers, which makes it a vertex of {A x <= h}.
LpSolution solve_inequality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& h,
                               const Eigen::VectorXd& c);

}  // namespace rdo::detail
