#include "pelab/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pelab {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kRefactorEvery = 64;

// Revised simplex on a standard-form problem whose first `n_orig` columns are
// the caller's variables and whose remaining columns are phase-one artificials.
class RevisedSimplex {
 public:
  RevisedSimplex(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::Index n_orig)
      : A_(std::move(A)), b_(std::move(b)), n_orig_(n_orig), m_(A_.rows()), n_(A_.cols()) {
    basis_.resize(static_cast<std::size_t>(m_));
    is_basic_.assign(static_cast<std::size_t>(n_), false);
    for (Eigen::Index r = 0; r < m_; ++r) {
      basis_[static_cast<std::size_t>(r)] = n_orig_ + r;
      is_basic_[static_cast<std::size_t>(n_orig_ + r)] = true;
    }
    Binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xB_ = b_;
  }

  // Runs simplex iterations for cost vector c; columns >= `enter_limit` never enter.
  void optimize(const Eigen::VectorXd& c, Eigen::Index enter_limit, long max_iterations) {
    const double cost_scale = 1.0 + c.cwiseAbs().maxCoeff();
    const double rc_tol = 1e-11 * cost_scale;
    for (;;) {
      if (iterations_ >= max_iterations) throw SolverError("solve_lp: iteration limit reached");
      Eigen::VectorXd cB(m_);
      for (Eigen::Index r = 0; r < m_; ++r) cB[r] = c[basis_[static_cast<std::size_t>(r)]];
      const Eigen::RowVectorXd y = cB.transpose() * Binv_;

      // Bland: lowest-index improving column.
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < enter_limit; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        if (c[j] - y.dot(A_.col(j)) < -rc_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;

      const Eigen::VectorXd u = Binv_ * A_.col(entering);
      Eigen::Index leave_row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (u[r] <= kPivotTol) continue;
        const double ratio = std::max(xB_[r], 0.0) / u[r];
        if (leave_row < 0) {
          best_ratio = ratio;
          leave_row = r;
          continue;
        }
        const bool better = ratio < best_ratio - 1e-14 * (1.0 + best_ratio);
        const bool tie = !better && ratio <= best_ratio + 1e-14 * (1.0 + best_ratio);
        if (better || (tie && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave_row)])) {
          best_ratio = ratio;
          leave_row = r;
        }
      }
      if (leave_row < 0) throw SolverError("solve_lp: problem is unbounded");
      pivot(entering, leave_row, u);
    }
  }

  // Pivots basic artificials out where possible; remaining ones sit on redundant rows.
  void expel_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_orig_) continue;
      const Eigen::RowVectorXd row = Binv_.row(r) * A_.leftCols(n_orig_);
      for (Eigen::Index j = 0; j < n_orig_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || std::abs(row[j]) <= 1e-9) continue;
        pivot(j, r, Binv_ * A_.col(j));
        break;
      }
    }
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index r = 0; r < m_; ++r) x[basis_[static_cast<std::size_t>(r)]] = std::max(xB_[r], 0.0);
    return x;
  }

  Eigen::VectorXd duals(const Eigen::VectorXd& c) const {
    Eigen::VectorXd cB(m_);
    for (Eigen::Index r = 0; r < m_; ++r) cB[r] = c[basis_[static_cast<std::size_t>(r)]];
    return (cB.transpose() * Binv_).transpose();
  }

  long iterations() const { return iterations_; }

 private:
  void pivot(Eigen::Index entering, Eigen::Index leave_row, const Eigen::VectorXd& u) {
    const double pivot_value = u[leave_row];
    Binv_.row(leave_row) /= pivot_value;
    xB_[leave_row] /= pivot_value;
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (r == leave_row || u[r] == 0.0) continue;
      Binv_.row(r) -= u[r] * Binv_.row(leave_row);
      xB_[r] -= u[r] * xB_[leave_row];
    }
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave_row)])] = false;
    basis_[static_cast<std::size_t>(leave_row)] = entering;
    is_basic_[static_cast<std::size_t>(entering)] = true;
    ++iterations_;
    if (iterations_ % kRefactorEvery == 0) refactor();
  }

  void refactor() {
    Eigen::MatrixXd B(m_, m_);
    for (Eigen::Index r = 0; r < m_; ++r) B.col(r) = A_.col(basis_[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Binv_ = lu.inverse();
    xB_ = Binv_ * b_;
  }

  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::Index n_orig_;
  Eigen::Index m_;
  Eigen::Index n_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> is_basic_;
  Eigen::MatrixXd Binv_;
  Eigen::VectorXd xB_;
  long iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const Eigen::Index m = problem.A.rows();
  const Eigen::Index n = problem.A.cols();
  if (problem.b.size() != m || problem.c.size() != n) {
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");
  }
  if (!problem.A.allFinite() || !problem.b.allFinite() || !problem.c.allFinite()) {
    throw std::invalid_argument("solve_lp: non-finite problem data");
  }

  // Flip rows so that b >= 0, then append one artificial per row.
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (problem.b[r] < 0) sign[r] = -1.0;
  }
  Eigen::MatrixXd A(m, n + m);
  A.leftCols(n) = sign.asDiagonal() * problem.A;
  A.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  const Eigen::VectorXd b = sign.cwiseProduct(problem.b);

  const long max_iterations = 200000 + 50 * static_cast<long>(n + m);
  RevisedSimplex simplex(A, b, n);

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  simplex.optimize(phase1_cost, n + m, max_iterations);
  const double infeasibility = simplex.solution().tail(m).sum();
  if (infeasibility > 1e-9 * (1.0 + b.cwiseAbs().sum())) {
    throw SolverError("solve_lp: problem is infeasible (phase-one residual " +
                      std::to_string(infeasibility) + ")");
  }
  simplex.expel_artificials();

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.head(n) = problem.c;
  simplex.optimize(cost, n, max_iterations);

  LpSolution out;
  out.x = simplex.solution().head(n);
  out.duals = sign.cwiseProduct(simplex.duals(cost));
  out.objective = problem.c.dot(out.x);

  const Eigen::VectorXd reduced = problem.c - problem.A.transpose() * out.duals;
  LpCertificate& cert = out.certificate;
  cert.primal_objective = out.objective;
  cert.dual_objective = problem.b.dot(out.duals);
  cert.duality_gap = std::abs(cert.primal_objective - cert.dual_objective);
  cert.primal_residual = m > 0 ? (problem.A * out.x - problem.b).cwiseAbs().maxCoeff() : 0.0;
  cert.dual_infeasibility = n > 0 ? std::max(0.0, -reduced.minCoeff()) : 0.0;
  cert.slackness_violation = out.x.dot(reduced.cwiseAbs());
  cert.iterations = simplex.iterations();
  return out;
}

}  // namespace pelab
