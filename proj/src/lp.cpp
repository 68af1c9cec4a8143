#include "sparselab/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sparselab/error.hpp"

namespace sparselab {

namespace {

using Eigen::Index;

class Tableau {
 public:
  // Row i of `rows` is constraint i in equality form; `basis[i]` is its basic column.
  Tableau(Eigen::MatrixXd rows, Eigen::VectorXd rhs, std::vector<Index> basis, double tol)
      : t_(rows.rows() + 1, rows.cols() + 1), basis_(std::move(basis)), tol_(tol) {
    t_.setZero();
    t_.topLeftCorner(rows.rows(), rows.cols()) = rows;
    t_.col(rows.cols()).head(rows.rows()) = rhs;
  }

  Index m() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  const std::vector<Index>& basis() const { return basis_; }
  double rhs(Index i) const { return t_(i, cols()); }
  double entry(Index i, Index j) const { return t_(i, j); }
  double objective() const { return -t_(m(), cols()); }

  // Reduced-cost row for costs `c`, priced out against the current basis.
  void set_costs(const Eigen::VectorXd& c) {
    t_.row(m()).setZero();
    t_.row(m()).head(c.size()) = c.transpose();
    for (Index i = 0; i < m(); ++i) {
      const double cb = t_(m(), basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(m()) -= cb * t_.row(i);
    }
  }

  void pivot(Index row, Index col) {
    t_.row(row) /= t_(row, col);
    for (Index i = 0; i <= m(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
      if (i < m() && t_(i, cols()) < 0.0 && t_(i, cols()) > -tol_) t_(i, cols()) = 0.0;
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  enum class Status { optimal, unbounded, budget };

  // Bland's rule: lowest eligible entering index, lowest basic index on ratio ties.
  Status run(const std::vector<bool>& eligible, std::size_t& pivots, std::size_t max_pivots) {
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < cols(); ++j) {
        if (eligible[static_cast<std::size_t>(j)] && t_(m(), j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::optimal;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m(); ++i) {
        const double a = t_(i, enter);
        if (a > tol_) best = std::min(best, t_(i, cols()) / a);
      }
      Index leave = -1;
      for (Index i = 0; i < m(); ++i) {
        const double a = t_(i, enter);
        if (a <= tol_ || t_(i, cols()) / a > best + tol_) continue;
        if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])
          leave = i;
      }
      if (leave < 0) return Status::unbounded;
      if (pivots++ >= max_pivots) return Status::budget;
      pivot(leave, enter);
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Index> basis_;
  double tol_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const Index n = lp.c.size();
  const Index m = lp.a.rows();
  if (lp.a.cols() != n || lp.b.size() != m)
    throw ValidationError("solve_lp: inconsistent dimensions");
  if (!lp.a.array().isFinite().all() || !lp.b.array().isFinite().all() ||
      !lp.c.array().isFinite().all())
    throw ValidationError("solve_lp: non-finite data");

  // Row equilibration, then flip rows with negative rhs so every rhs is >= 0.
  Eigen::MatrixXd a = lp.a;
  Eigen::VectorXd b = lp.b;
  Eigen::VectorXd slack_sign = Eigen::VectorXd::Ones(m);
  for (Index i = 0; i < m; ++i) {
    const double scale = a.row(i).cwiseAbs().maxCoeff();
    if (scale > 0.0) {
      a.row(i) /= scale;
      b(i) /= scale;
    }
    if (b(i) < 0.0) {
      a.row(i) *= -1.0;
      b(i) = -b(i);
      slack_sign(i) = -1.0;
    }
  }

  std::vector<Index> artificial_rows;
  for (Index i = 0; i < m; ++i)
    if (slack_sign(i) < 0.0) artificial_rows.push_back(i);
  const Index n_art = static_cast<Index>(artificial_rows.size());
  const Index total = n + m + n_art;

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, total);
  rows.leftCols(n) = a;
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    rows(i, n + i) = slack_sign(i);
    basis[static_cast<std::size_t>(i)] = n + i;
  }
  for (Index k = 0; k < n_art; ++k) {
    const Index i = artificial_rows[static_cast<std::size_t>(k)];
    rows(i, n + m + k) = 1.0;
    basis[static_cast<std::size_t>(i)] = n + m + k;
  }
  const Eigen::MatrixXd equality = rows;

  Tableau tab(std::move(rows), b, std::move(basis), options.tol);
  std::size_t pivots = 0;
  std::vector<bool> eligible(static_cast<std::size_t>(total), true);

  if (n_art > 0) {
    Eigen::VectorXd phase_one = Eigen::VectorXd::Zero(total);
    phase_one.tail(n_art).setOnes();
    tab.set_costs(phase_one);
    if (tab.run(eligible, pivots, options.max_pivots) != Tableau::Status::optimal)
      throw SolverError("solve_lp: phase one did not terminate", tab.objective());
    const double residual = tab.objective();
    if (residual > options.tol * std::max(1.0, b.lpNorm<Eigen::Infinity>()) * 10.0)
      throw SolverError("solve_lp: infeasible (phase-one residual " + std::to_string(residual) + ")",
                        residual);
    for (Index k = 0; k < n_art; ++k) eligible[static_cast<std::size_t>(n + m + k)] = false;
    // Drive zero-level artificials out of the basis where a pivot exists.
    for (Index i = 0; i < tab.m(); ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < n + m) continue;
      for (Index j = 0; j < n + m; ++j) {
        if (std::abs(tab.entry(i, j)) > options.tol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd costs = Eigen::VectorXd::Zero(total);
  costs.head(n) = lp.c;
  tab.set_costs(costs);
  const auto status = tab.run(eligible, pivots, options.max_pivots);
  if (status == Tableau::Status::unbounded) throw SolverError("solve_lp: objective unbounded below");
  if (status == Tableau::Status::budget) throw SolverError("solve_lp: pivot budget exhausted");

  // Recompute the basic solution from the original rows to shed tableau drift.
  const auto& final_basis = tab.basis();
  Eigen::MatrixXd basis_matrix(m, m);
  for (Index i = 0; i < m; ++i) basis_matrix.col(i) = equality.col(final_basis[static_cast<std::size_t>(i)]);
  Eigen::VectorXd xb = basis_matrix.colPivHouseholderQr().solve(b);
  if (!xb.allFinite() || (basis_matrix * xb - b).lpNorm<Eigen::Infinity>() > 1e-6) {
    for (Index i = 0; i < m; ++i) xb(i) = tab.rhs(i);
  }

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < m; ++i) {
    const Index j = final_basis[static_cast<std::size_t>(i)];
    if (j < n) sol.x(j) = std::max(xb(i), 0.0);
  }
  sol.objective = lp.c.dot(sol.x);
  sol.pivots = pivots;
  return sol;
}

}  // namespace sparselab
