#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sparselab/dataset.hpp"
#include "sparselab/penalties.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

struct FitResult {
  Vector beta_hat;
  IndexSet active_set;  // {j : beta_hat_j != 0}, ascending
  Vector residuals;     // y - X beta_hat
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Per-iteration objective values where the solver records them
  // (outer iterations for lla, one per step for ista).
  std::vector<double> objective_trace;
};

// ||y - X beta||^2 / (2n)
double quadratic_loss(const Dataset& data, const Vector& beta);
// quadratic_loss + sum_j P(beta_j)
double penalized_objective(const Dataset& data, const Vector& beta, const PenaltySpec& penalty);
// quadratic_loss + lambda * ||beta||_0
double l0_objective(const Dataset& data, const Vector& beta, double lambda);

// Largest |x_j' y| / n; the smallest lambda whose lasso solution is zero.
double lambda_max(const Dataset& data);
// `count` log-spaced values from lmax down to lmax * min_ratio.
std::vector<double> lambda_grid(double lmax, std::size_t count, double min_ratio = 1e-2);

// Lasso by cyclic coordinate descent. Requires standardized columns (mean 0,
// sd 1 with the n - 1 denominator). Stops once the largest coordinate move is
// below tol * (1 + ||beta||_inf) and the KKT violation is below tol.
FitResult coord_descent_l1(const Dataset& data, double lambda, double tol = 1e-9,
                           std::size_t max_iter = 100000);

// Weighted lasso  loss + sum_j w_j |beta_j|  started from `init`.
FitResult coord_descent_weighted(const Dataset& data, const Vector& weights, const Vector& init,
                                 double tol = 1e-9, std::size_t max_iter = 100000);

// Largest violation of the weighted-lasso optimality conditions
//   |x_j'r/n| <= w_j  (beta_j = 0),   x_j'r/n = w_j sign(beta_j)  (beta_j != 0).
double kkt_violation(const Dataset& data, const Vector& beta, const Vector& weights);

// Lasso fits along a lambda grid, warm-started from the largest lambda down.
// Results are returned in the order of `lambdas`.
std::vector<FitResult> lasso_path(const Dataset& data, std::span<const double> lambdas,
                                  double tol = 1e-9, std::size_t max_iter = 100000);

// Largest eigenvalue of X'X / n by power iteration.
double gram_spectral_norm(const Matrix& x);

// Proximal gradient (iterative shrinkage-thresholding) for any penalty family.
// The default step is 1 / L with L = gram_spectral_norm(X). Raises
// StepSizeError when the objective increases by more than 1e-8.
FitResult ista(const Dataset& data, const PenaltySpec& penalty, std::optional<double> step = std::nullopt,
               double tol = 1e-10, std::size_t max_iter = 200000);

// One state of the local linear approximation: weights_j = P'(|beta_j|).
struct LlaState {
  std::size_t k = 0;
  Vector beta;
  Vector weights;
};

LlaState lla_initial_state(const PenaltySpec& penalty, const Vector& init);

// Solves the weighted lasso with the state's weights (warm-started at the
// state's beta) and returns the next state. Throws SolverError if the inner
// solve does not converge.
LlaState lla_step(const Dataset& data, const PenaltySpec& penalty, const LlaState& state,
                  double tol = 1e-9, std::size_t max_iter = 100000);

// Local linear approximation for scad/mcp. objective_trace[0] is the
// objective at `init`, entry k the objective after k outer iterations.
// Stops when the weights move by less than tol or after max_outer steps.
FitResult lla(const Dataset& data, const PenaltySpec& penalty, const Vector& init,
              double tol = 1e-9, std::size_t max_outer = 20);

inline constexpr std::size_t kMaxBestSubsetDim = 15;

// Exhaustive minimizer of the L0-penalized least squares objective; every
// support is refit by OLS. Only for d <= kMaxBestSubsetDim.
FitResult best_subset_l0(const Dataset& data, double lambda);

// C_n = {beta : ||X'(y - X beta)||_inf <= gamma_n}
struct HighConfidenceSetSpec {
  Dataset data;
  double gamma_n = 0.0;
};

double score_sup_norm(const Dataset& data, const Vector& beta);

// Default gamma_n = c * sd(y) * sqrt(2 n log d), the unnormalized analogue of
// sigma * sqrt(2 log d / n).
double default_gamma_n(const Dataset& data, double c = 1.0);

// Membership test with an absolute slack for rounding in the score.
bool hcs_membership(const HighConfidenceSetSpec& spec, const Vector& beta, double slack = 1e-9);

// Sparsest (minimum L1) point of C_n, the Dantzig selector, solved as an LP
// over beta = u - v. objective = ||beta_hat||_1.
FitResult dantzig_selector(const HighConfidenceSetSpec& spec);

// OLS on the selected columns, zero elsewhere. Throws SingularityError on a
// rank-deficient selection or |support| >= n.
FitResult ols_refit(const Dataset& data, const IndexSet& support);

// Affine predictor on the original scale of a training set.
struct LinearPredictor {
  double intercept = 0.0;
  Vector beta;
};

// Fits one predictor per lambda on a training set (any column scaling).
using PathSolver =
    std::function<std::vector<LinearPredictor>(const Dataset& train, std::span<const double> lambdas)>;

// Lasso path on the internally standardized training set (centered response),
// mapped back to the original scale with an intercept.
PathSolver lasso_path_solver(double tol = 1e-7, std::size_t max_iter = 100000);

struct CvResult {
  double lambda_star = 0.0;
  std::size_t best_index = 0;
  std::vector<double> lambdas;
  std::vector<double> cv_error;  // mean held-out squared error per lambda
};

// Seeded, balanced fold labels in [0, folds).
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, Seed seed);

// K-fold cross-validation; ties go to the larger lambda.
CvResult cross_validate(const Dataset& data, const PathSolver& solver, std::span<const double> lambdas,
                        std::size_t folds, Seed seed);
CvResult cross_validate(const Dataset& data, const PathSolver& solver, std::span<const double> lambdas,
                        const std::vector<std::size_t>& fold_of_row);

// Builds a FitResult (residuals, active set) around a coefficient vector.
FitResult make_fit(const Dataset& data, Vector beta, double objective, std::size_t iterations,
                   bool converged);

}  // namespace sparselab
