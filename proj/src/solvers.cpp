#include "sparselab/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "sparselab/error.hpp"
#include "sparselab/lp.hpp"
#include "sparselab/stats.hpp"

namespace sparselab {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void require_response(const Dataset& data, const char* who) {
  if (!data.has_y()) throw PreconditionError(std::string(who) + ": dataset has no response");
}

void require_standardized(const Dataset& data, const char* who) {
  require_response(data, who);
  if (!is_standardized(data.x()))
    throw PreconditionError(std::string(who) +
                            ": columns must be standardized (mean 0, sd 1); call standardize() first");
}

IndexSet support_of(const Vector& beta) {
  IndexSet s;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) s.push_back(static_cast<std::size_t>(j));
  return s;
}

// OLS on `support` allowing |support| == n; used by best subset.
Vector ols_coefficients(const Dataset& data, const IndexSet& support) {
  Vector beta = Vector::Zero(idx(data.d()));
  if (support.empty()) return beta;
  Matrix xs(data.x().rows(), idx(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) xs.col(idx(k)) = data.x().col(idx(support[k]));
  Eigen::ColPivHouseholderQR<Matrix> qr(xs);
  if (qr.rank() < xs.cols()) throw SingularityError("ols: selected columns are rank deficient");
  const Vector b = qr.solve(data.y());
  for (std::size_t k = 0; k < support.size(); ++k) beta(idx(support[k])) = b(idx(k));
  return beta;
}

}  // namespace

FitResult make_fit(const Dataset& data, Vector beta, double objective, std::size_t iterations,
                   bool converged) {
  FitResult fit;
  fit.residuals = data.y() - data.x() * beta;
  fit.active_set = support_of(beta);
  fit.beta_hat = std::move(beta);
  fit.objective = objective;
  fit.iterations = iterations;
  fit.converged = converged;
  return fit;
}

double quadratic_loss(const Dataset& data, const Vector& beta) {
  return (data.y() - data.x() * beta).squaredNorm() / (2.0 * static_cast<double>(data.n()));
}

double penalized_objective(const Dataset& data, const Vector& beta, const PenaltySpec& penalty) {
  double p = 0.0;
  for (Index j = 0; j < beta.size(); ++j) p += penalty_value(penalty, beta(j));
  return quadratic_loss(data, beta) + p;
}

double l0_objective(const Dataset& data, const Vector& beta, double lambda) {
  const auto nnz = static_cast<double>((beta.array() != 0.0).count());
  return quadratic_loss(data, beta) + lambda * nnz;
}

double lambda_max(const Dataset& data) {
  require_response(data, "lambda_max");
  return (data.x().transpose() * data.y()).lpNorm<Eigen::Infinity>() / static_cast<double>(data.n());
}

std::vector<double> lambda_grid(double lmax, std::size_t count, double min_ratio) {
  if (count == 0) throw ConfigurationError("lambda_grid: count must be >= 1");
  if (!(lmax > 0.0) || !(min_ratio > 0.0 && min_ratio <= 1.0))
    throw ConfigurationError("lambda_grid: need lmax > 0 and min_ratio in (0, 1]");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double step = std::log(min_ratio) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lmax * std::exp(step * static_cast<double>(k));
  return grid;
}

double kkt_violation(const Dataset& data, const Vector& beta, const Vector& weights) {
  const Vector r = data.y() - data.x() * beta;
  const Vector g = data.x().transpose() * r / static_cast<double>(data.n());
  double worst = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    const double v = beta(j) == 0.0 ? std::max(std::abs(g(j)) - weights(j), 0.0)
                                    : std::abs(g(j) - weights(j) * (beta(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

FitResult coord_descent_weighted(const Dataset& data, const Vector& weights, const Vector& init,
                                 double tol, std::size_t max_iter) {
  require_standardized(data, "coord_descent");
  const Matrix& x = data.x();
  const Index d = x.cols();
  if (weights.size() != d || init.size() != d)
    throw ValidationError("coord_descent: weights/init must have length d");
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw ValidationError("coord_descent: weights must be finite and >= 0");
  const double n = static_cast<double>(data.n());

  Vector beta = init;
  Vector r = data.y() - x * beta;
  Vector curvature(d);
  for (Index j = 0; j < d; ++j) curvature(j) = x.col(j).squaredNorm() / n;

  std::size_t iter = 0;
  bool converged = false;
  while (iter < max_iter) {
    ++iter;
    double max_move = 0.0;
    for (Index j = 0; j < d; ++j) {
      const double z = x.col(j).dot(r) / n + curvature(j) * beta(j);
      const double next = soft_threshold(z, weights(j)) / curvature(j);
      const double move = next - beta(j);
      if (move != 0.0) {
        r.noalias() -= move * x.col(j);
        beta(j) = next;
        max_move = std::max(max_move, std::abs(move));
      }
    }
    if (max_move < tol * (1.0 + beta.lpNorm<Eigen::Infinity>()) &&
        kkt_violation(data, beta, weights) <= tol) {
      converged = true;
      break;
    }
  }
  double objective = quadratic_loss(data, beta) + weights.dot(beta.cwiseAbs());
  return make_fit(data, std::move(beta), objective, iter, converged);
}

FitResult coord_descent_l1(const Dataset& data, double lambda, double tol, std::size_t max_iter) {
  if (!(lambda >= 0.0)) throw ValidationError("coord_descent_l1: lambda must be >= 0");
  const Index d = idx(data.d());
  return coord_descent_weighted(data, Vector::Constant(d, lambda), Vector::Zero(d), tol, max_iter);
}

std::vector<FitResult> lasso_path(const Dataset& data, std::span<const double> lambdas, double tol,
                                  std::size_t max_iter) {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  const Index d = idx(data.d());
  std::vector<FitResult> fits(lambdas.size());
  Vector warm = Vector::Zero(d);
  for (std::size_t k : order) {
    if (!(lambdas[k] >= 0.0)) throw ValidationError("lasso_path: lambdas must be >= 0");
    fits[k] = coord_descent_weighted(data, Vector::Constant(d, lambdas[k]), warm, tol, max_iter);
    warm = fits[k].beta_hat;
  }
  return fits;
}

double gram_spectral_norm(const Matrix& x) {
  const Index d = x.cols();
  const double n = static_cast<double>(x.rows());
  Rng rng = make_rng(Seed{0x5eed});
  Vector v(d);
  fill_standard_normal(v, rng);
  v.normalize();
  double value = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vector w = x.transpose() * (x * v) / n;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const bool done = std::abs(next - value) <= 1e-13 * std::abs(next);
    value = next;
    if (done) break;
  }
  return value;
}

FitResult ista(const Dataset& data, const PenaltySpec& penalty, std::optional<double> step, double tol,
               std::size_t max_iter) {
  require_response(data, "ista");
  validate(penalty);
  const Matrix& x = data.x();
  const double n = static_cast<double>(data.n());
  const double lipschitz = gram_spectral_norm(x);
  const double s = step ? *step : (lipschitz > 0.0 ? 1.0 / lipschitz : 1.0);
  if (!(s > 0.0)) throw StepSizeError("ista: step must be > 0");

  Vector beta = Vector::Zero(x.cols());
  Vector r = data.y();
  double objective = penalized_objective(data, beta, penalty);
  std::vector<double> trace{objective};

  std::size_t iter = 0;
  bool converged = false;
  while (iter < max_iter) {
    ++iter;
    const Vector z = beta + s * (x.transpose() * r) / n;
    Vector next(beta.size());
    for (Index j = 0; j < next.size(); ++j) next(j) = prox(penalty, z(j), s);
    const double next_objective = penalized_objective(data, next, penalty);
    if (next_objective > objective + 1e-8 * std::max(1.0, std::abs(objective)))
      throw StepSizeError("ista: objective increased from " + std::to_string(objective) + " to " +
                          std::to_string(next_objective) + "; step " + std::to_string(s) +
                          " exceeds 1/L = " + std::to_string(lipschitz > 0 ? 1.0 / lipschitz : 0.0));
    const double move = (next - beta).lpNorm<Eigen::Infinity>();
    beta = std::move(next);
    r = data.y() - x * beta;
    objective = next_objective;
    trace.push_back(objective);
    if (move < tol * (1.0 + beta.lpNorm<Eigen::Infinity>())) {
      converged = true;
      break;
    }
  }
  FitResult fit = make_fit(data, std::move(beta), objective, iter, converged);
  fit.objective_trace = std::move(trace);
  return fit;
}

LlaState lla_initial_state(const PenaltySpec& penalty, const Vector& init) {
  LlaState state;
  state.beta = init;
  state.weights.resize(init.size());
  for (Index j = 0; j < init.size(); ++j) state.weights(j) = penalty_derivative(penalty, std::abs(init(j)));
  return state;
}

LlaState lla_step(const Dataset& data, const PenaltySpec& penalty, const LlaState& state, double tol,
                  std::size_t max_iter) {
  const FitResult inner = coord_descent_weighted(data, state.weights, state.beta, tol, max_iter);
  if (!inner.converged)
    throw SolverError("lla: weighted lasso did not converge at outer iteration " +
                      std::to_string(state.k + 1) + " after " + std::to_string(inner.iterations) +
                      " sweeps");
  LlaState next = lla_initial_state(penalty, inner.beta_hat);
  next.k = state.k + 1;
  return next;
}

FitResult lla(const Dataset& data, const PenaltySpec& penalty, const Vector& init, double tol,
              std::size_t max_outer) {
  validate(penalty);
  if (penalty.family != PenaltyFamily::scad && penalty.family != PenaltyFamily::mcp)
    throw ConfigurationError("lla: penalty must be scad or mcp");
  if (init.size() != idx(data.d())) throw ValidationError("lla: init must have length d");

  LlaState state = lla_initial_state(penalty, init);
  std::vector<double> trace{penalized_objective(data, state.beta, penalty)};
  bool converged = false;
  while (state.k < max_outer) {
    LlaState next = lla_step(data, penalty, state, tol);
    const double weight_move = (next.weights - state.weights).lpNorm<Eigen::Infinity>();
    state = std::move(next);
    trace.push_back(penalized_objective(data, state.beta, penalty));
    if (weight_move < tol) {
      converged = true;
      break;
    }
  }
  FitResult fit = make_fit(data, state.beta, trace.back(), state.k, converged);
  fit.objective_trace = std::move(trace);
  return fit;
}

FitResult best_subset_l0(const Dataset& data, double lambda) {
  require_response(data, "best_subset_l0");
  const std::size_t d = data.d();
  if (d > kMaxBestSubsetDim)
    throw SizeLimitError("best_subset_l0: d = " + std::to_string(d) + " exceeds the enumeration limit " +
                         std::to_string(kMaxBestSubsetDim));
  if (!(lambda >= 0.0)) throw ValidationError("best_subset_l0: lambda must be >= 0");

  const double n = static_cast<double>(data.n());
  const Matrix gram = data.x().transpose() * data.x();
  const Vector xty = data.x().transpose() * data.y();
  const double yty = data.y().squaredNorm();

  std::uint32_t best_mask = 0;
  double best = yty / (2.0 * n);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    const int size = std::popcount(mask);
    if (static_cast<std::size_t>(size) > data.n()) continue;
    std::vector<Index> cols;
    for (std::size_t j = 0; j < d; ++j)
      if (mask & (1u << j)) cols.push_back(idx(j));
    Matrix g(size, size);
    Vector c(size);
    for (int a = 0; a < size; ++a) {
      c(a) = xty(cols[static_cast<std::size_t>(a)]);
      for (int b = 0; b < size; ++b) g(a, b) = gram(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
    }
    Eigen::LDLT<Matrix> ldlt(g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
    if ((ldlt.vectorD().array() <= 1e-12 * g.diagonal().maxCoeff()).any()) continue;
    const double rss = std::max(yty - c.dot(ldlt.solve(c)), 0.0);
    const double objective = rss / (2.0 * n) + lambda * size;
    if (objective < best) {
      best = objective;
      best_mask = mask;
    }
  }

  IndexSet support;
  for (std::size_t j = 0; j < d; ++j)
    if (best_mask & (1u << j)) support.push_back(j);
  Vector beta = ols_coefficients(data, support);
  const double objective = l0_objective(data, beta, lambda);
  return make_fit(data, std::move(beta), objective, std::size_t{1} << d, true);
}

double score_sup_norm(const Dataset& data, const Vector& beta) {
  return (data.x().transpose() * (data.y() - data.x() * beta)).lpNorm<Eigen::Infinity>();
}

double default_gamma_n(const Dataset& data, double c) {
  require_response(data, "default_gamma_n");
  const auto& y = data.y();
  const double sd = sample_sd({y.data(), static_cast<std::size_t>(y.size())});
  const double n = static_cast<double>(data.n());
  const double logd = std::log(std::max<double>(static_cast<double>(data.d()), 2.0));
  return c * sd * std::sqrt(2.0 * n * logd);
}

bool hcs_membership(const HighConfidenceSetSpec& spec, const Vector& beta, double slack) {
  if (beta.size() != idx(spec.data.d())) throw ValidationError("hcs_membership: beta has wrong length");
  return score_sup_norm(spec.data, beta) <= spec.gamma_n + slack;
}

FitResult dantzig_selector(const HighConfidenceSetSpec& spec) {
  const Dataset& data = spec.data;
  require_response(data, "dantzig_selector");
  if (!(spec.gamma_n > 0.0) || !std::isfinite(spec.gamma_n))
    throw ValidationError("dantzig_selector: gamma_n must be finite and > 0");
  const Index d = idx(data.d());
  const Matrix gram = data.x().transpose() * data.x();
  const Vector xty = data.x().transpose() * data.y();

  // variables (u, v) >= 0 with beta = u - v
  LinearProgram lp;
  lp.c = Vector::Ones(2 * d);
  lp.a.resize(2 * d, 2 * d);
  lp.a << gram, -gram, -gram, gram;
  lp.b.resize(2 * d);
  lp.b << xty.array() + spec.gamma_n, spec.gamma_n - xty.array();
  const LpSolution sol = solve_lp(lp);

  Vector beta = sol.x.head(d) - sol.x.tail(d);
  const double violation = score_sup_norm(data, beta) - spec.gamma_n;
  if (violation > 1e-8 * std::max(1.0, spec.gamma_n))
    throw SolverError("dantzig_selector: returned point violates the constraint by " +
                          std::to_string(violation),
                      violation);
  const double objective = beta.lpNorm<1>();
  return make_fit(data, std::move(beta), objective, sol.pivots, true);
}

FitResult ols_refit(const Dataset& data, const IndexSet& support) {
  require_response(data, "ols_refit");
  if (support.size() >= data.n())
    throw SingularityError("ols_refit: |support| = " + std::to_string(support.size()) +
                           " must be < n = " + std::to_string(data.n()));
  IndexSet sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("ols_refit: duplicate index in support");
  for (auto j : sorted)
    if (j >= data.d()) throw ValidationError("ols_refit: support index out of range");
  Vector beta = ols_coefficients(data, sorted);
  const double objective = quadratic_loss(data, beta);
  return make_fit(data, std::move(beta), objective, 1, true);
}

PathSolver lasso_path_solver(double tol, std::size_t max_iter) {
  return [tol, max_iter](const Dataset& train, std::span<const double> lambdas) {
    const Matrix& x = train.x();
    const Index d = x.cols();
    const double n = static_cast<double>(x.rows());
    const Vector mean = x.colwise().mean().transpose();
    Matrix xs = x.rowwise() - mean.transpose();
    Vector scale(d);
    for (Index j = 0; j < d; ++j) {
      const double sd = std::sqrt(xs.col(j).squaredNorm() / (n - 1.0));
      // A constant training column carries no information; keep it at zero.
      scale(j) = sd > 0.0 ? sd : 0.0;
      if (sd > 0.0)
        xs.col(j) /= sd;
      else
        xs.col(j).setZero();
    }
    const double ybar = train.y().mean();
    Vector yc = train.y().array() - ybar;

    std::vector<Index> live;
    for (Index j = 0; j < d; ++j)
      if (scale(j) > 0.0) live.push_back(j);
    Matrix xl(xs.rows(), idx(live.size()));
    for (std::size_t k = 0; k < live.size(); ++k) xl.col(idx(k)) = xs.col(live[k]);

    std::vector<LinearPredictor> out(lambdas.size());
    if (live.empty()) {
      for (auto& p : out) p = {ybar, Vector::Zero(d)};
      return out;
    }
    const auto fits = lasso_path(Dataset(std::move(xl), std::move(yc)), lambdas, tol, max_iter);
    for (std::size_t k = 0; k < fits.size(); ++k) {
      Vector beta = Vector::Zero(d);
      for (std::size_t l = 0; l < live.size(); ++l)
        beta(live[l]) = fits[k].beta_hat(idx(l)) / scale(live[l]);
      out[k] = {ybar - mean.dot(beta), std::move(beta)};
    }
    return out;
  };
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, Seed seed) {
  if (folds < 2) throw ConfigurationError("cross_validate: folds must be >= 2");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  // Fisher-Yates with an explicit draw so the order is library-independent.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % folds;
  return fold;
}

CvResult cross_validate(const Dataset& data, const PathSolver& solver, std::span<const double> lambdas,
                        std::size_t folds, Seed seed) {
  return cross_validate(data, solver, lambdas, assign_folds(data.n(), folds, seed));
}

CvResult cross_validate(const Dataset& data, const PathSolver& solver, std::span<const double> lambdas,
                        const std::vector<std::size_t>& fold_of_row) {
  require_response(data, "cross_validate");
  if (lambdas.empty()) throw ConfigurationError("cross_validate: lambda grid is empty");
  if (fold_of_row.size() != data.n()) throw ConfigurationError("cross_validate: fold labels must cover every row");
  const std::size_t folds = *std::max_element(fold_of_row.begin(), fold_of_row.end()) + 1;
  if (folds < 2) throw ConfigurationError("cross_validate: folds must be >= 2");

  std::vector<double> sse(lambdas.size(), 0.0);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.n(); ++i) (fold_of_row[i] == k ? test : train).push_back(i);
    if (test.size() < 2 || train.size() < 2)
      throw ConfigurationError("cross_validate: fold " + std::to_string(k) + " has " +
                               std::to_string(test.size()) + " rows; every fold needs >= 2");
    const Dataset train_set = data.select_rows(train);
    const Dataset test_set = data.select_rows(test);
    const auto predictors = solver(train_set, lambdas);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const Vector pred = (test_set.x() * predictors[l].beta).array() + predictors[l].intercept;
      sse[l] += (test_set.y() - pred).squaredNorm();
    }
  }

  CvResult result;
  result.lambdas.assign(lambdas.begin(), lambdas.end());
  result.cv_error.resize(lambdas.size());
  for (std::size_t l = 0; l < lambdas.size(); ++l) result.cv_error[l] = sse[l] / static_cast<double>(data.n());
  std::size_t best = 0;
  for (std::size_t l = 1; l < lambdas.size(); ++l) {
    const bool better = result.cv_error[l] < result.cv_error[best];
    const bool tie_larger = result.cv_error[l] == result.cv_error[best] && lambdas[l] > lambdas[best];
    if (better || tie_larger) best = l;
  }
  result.best_index = best;
  result.lambda_star = lambdas[best];
  return result;
}

}  // namespace sparselab
