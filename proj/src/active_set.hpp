#pragma once

#include <Eigen/Dense>
#include <vector>

namespace expofront::detail {

// minimize 0.5 ||F x||^2 + c^T x
//   s.t.  Aeq x = beq
//         Ain x <= bin   (row-wise)
// F empty means a pure LP. F^T F may be singular; Aeq may be
// rank-deficient (handled by rank-revealing factorizations).
struct QpProblem {
  Eigen::MatrixXd F;
  Eigen::VectorXd c;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;

  bool isLp() const { return F.size() == 0; }
};

struct QpResult {
  Eigen::VectorXd x;
  std::vector<int> active;  // working set at the solution (rows of Ain)
  int iterations = 0;
  bool optimal = false;
};

// Primal active-set method. The kernel basis of the working set is kept
// orthonormal and updated incrementally when a constraint is added; drops
// trigger a fresh factorization. `x0` must be feasible; `warmActive` seeds
// the working set (entries not tight at x0 are ignored). Ties on drops and
// blocks go to the smallest row index.
QpResult activeSetSolve(const QpProblem& prob, Eigen::VectorXd x0,
                        const std::vector<int>& warmActive, double scale,
                        int maxIterations);

}  // namespace expofront::detail
