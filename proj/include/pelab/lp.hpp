#ifndef PELAB_LP_HPP
#define PELAB_LP_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pelab {

/// Raised when an LP cannot be solved; never replaced by an approximation.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimality evidence attached to every LP solve.
struct LpCertificate {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;          // |primal - dual|
  double primal_residual = 0.0;      // max |Ax - b|
  double dual_infeasibility = 0.0;   // max(0, -min reduced cost)
  double slackness_violation = 0.0;  // sum_j x_j |reduced cost_j|
  long iterations = 0;
};

/// min c'x  s.t.  A x = b,  x >= 0.
struct LpProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

struct LpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // one per row of A, in the caller's row orientation
  double objective = 0.0;
  LpCertificate certificate;
};

/// Dense two-phase revised simplex with Bland's anti-cycling rule. Intended for
/// small problems (a few hundred columns); throws SolverError when infeasible
/// or unbounded.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace pelab

#endif  // PELAB_LP_HPP
