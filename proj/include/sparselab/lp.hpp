#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace sparselab {

// minimize c'x  subject to  A x <= b,  x >= 0.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

struct LpOptions {
  double tol = 1e-9;
  std::size_t max_pivots = 200000;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule. Throws SolverError when
// the program is infeasible (certificate: phase-one residual), unbounded, or
// the pivot budget runs out.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace sparselab
