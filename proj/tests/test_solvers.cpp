#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles/linear_algebra.hpp"
#include "oracles/lp_interior.hpp"
#include "support.hpp"
#include "sparselab/error.hpp"
#include "sparselab/solvers.hpp"

using namespace sparselab;
using testsupport::lasso_instance;
using testsupport::orthogonal_instance;
using testsupport::soft;

namespace {

void check_kkt(const Dataset& data, const FitResult& fit, double lambda, double tol) {
  const double n = static_cast<double>(data.n());
  const Vector score = data.x().transpose() * fit.residuals / n;
  for (Eigen::Index j = 0; j < score.size(); ++j) {
    if (fit.beta_hat(j) == 0.0)
      REQUIRE(std::abs(score(j)) <= lambda + tol);
    else
      REQUIRE(std::abs(score(j) - lambda * (fit.beta_hat(j) > 0 ? 1.0 : -1.0)) <= tol);
  }
}

void check_fit_consistency(const Dataset& data, const FitResult& fit) {
  CHECK((data.y() - data.x() * fit.beta_hat - fit.residuals).cwiseAbs().maxCoeff() <= 1e-10);
  IndexSet active;
  for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j)
    if (fit.beta_hat(j) != 0.0) active.push_back(static_cast<std::size_t>(j));
  CHECK(active == fit.active_set);
}

bool same_support(const IndexSet& a, std::size_t truth_size) {
  if (a.size() != truth_size) return false;
  for (std::size_t k = 0; k < truth_size; ++k)
    if (a[k] != k) return false;
  return true;
}

}  // namespace

TEST_SUITE("coordinate descent") {
  TEST_CASE("lambda zero reproduces OLS") {
    const Dataset data = lasso_instance(80, 10, 1);
    const FitResult fit = coord_descent_l1(data, 0.0, 1e-12);
    IndexSet all(10);
    for (std::size_t j = 0; j < 10; ++j) all[j] = j;
    const Vector ols = oracle::ols_normal_equations(data.x(), data.y(), all);
    CHECK((fit.beta_hat - ols).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.converged);
  }

  TEST_CASE("lambda at or above lambda_max gives zero") {
    const Dataset data = lasso_instance(50, 30, 2);
    const double lmax = (data.x().transpose() * data.y()).cwiseAbs().maxCoeff() / 50.0;
    CHECK(lambda_max(data) == doctest::Approx(lmax).epsilon(1e-14));
    CHECK(coord_descent_l1(data, lmax).beta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(coord_descent_l1(data, 2 * lmax).active_set.empty());
    CHECK(coord_descent_l1(data, 0.99 * lmax).active_set.size() == 1);
  }

  TEST_CASE("orthogonal design has the soft-thresholding closed form") {
    const Dataset data = orthogonal_instance(100, 12, 3);
    const double n = 100.0, lambda = 0.3;
    const FitResult fit = coord_descent_l1(data, lambda, 1e-12);
    for (Eigen::Index j = 0; j < 12; ++j) {
      const double z = data.x().col(j).dot(data.y()) / n;
      CHECK(fit.beta_hat(j) == doctest::Approx(soft(z, lambda) / ((n - 1) / n)).epsilon(1e-9));
    }
  }

  TEST_CASE("KKT certificate and fit consistency on random instances") {
    for (std::uint64_t s = 0; s < 25; ++s) {
      const std::size_t n = 40 + 7 * s, d = 10 + 9 * s;
      const Dataset data = lasso_instance(n, d, 100 + s);
      const double lambda = lambda_max(data) * (0.05 + 0.03 * static_cast<double>(s));
      const FitResult fit = coord_descent_l1(data, lambda, 1e-9);
      CAPTURE(s);
      REQUIRE(fit.converged);
      check_kkt(data, fit, lambda, 1e-8);
      check_fit_consistency(data, fit);
      CHECK(kkt_violation(data, fit.beta_hat, Vector::Constant(Eigen::Index(d), lambda)) <= 1e-9);
    }
  }

  TEST_CASE("non-standardized or response-free input is rejected") {
    const Dataset data = lasso_instance(30, 5, 4);
    Matrix shifted = data.x();
    shifted.col(2).array() += 1.0;
    CHECK_THROWS_AS(coord_descent_l1(Dataset(shifted, data.y()), 0.1), PreconditionError);
    CHECK_THROWS_AS(coord_descent_l1(Dataset(data.x()), 0.1), PreconditionError);
    CHECK_THROWS_AS(coord_descent_l1(data, -1.0), ValidationError);
  }

  TEST_CASE("iteration budget exhaustion is reported, not thrown") {
    const Dataset data = lasso_instance(60, 40, 5, 10);
    const FitResult fit = coord_descent_l1(data, 1e-3, 1e-14, 1);
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 1);
  }

  TEST_CASE("lasso path matches individual fits") {
    const Dataset data = lasso_instance(70, 25, 6);
    const auto grid = lambda_grid(lambda_max(data), 8);
    CHECK(grid.front() == doctest::Approx(lambda_max(data)));
    CHECK(grid.back() == doctest::Approx(lambda_max(data) * 1e-2));
    const auto path = lasso_path(data, grid, 1e-11);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const FitResult single = coord_descent_l1(data, grid[k], 1e-11);
      CHECK(std::abs(path[k].objective - single.objective) < 1e-9);
    }
  }
}

TEST_SUITE("ista") {
  TEST_CASE("agrees with coordinate descent on random L1 instances") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Dataset data = lasso_instance(50, 20, 200 + s);
      const double lambda = lambda_max(data) * 0.1;
      const FitResult cd = coord_descent_l1(data, lambda, 1e-12);
      const FitResult pg = ista(data, PenaltySpec::soft(lambda));
      CAPTURE(s);
      CHECK(pg.converged);
      CHECK(std::abs(pg.objective - cd.objective) < 1e-6);
      CHECK(std::abs(penalized_objective(data, pg.beta_hat, PenaltySpec::soft(lambda)) - pg.objective) < 1e-12);
    }
  }

  TEST_CASE("objective trace is monotone for the soft penalty") {
    const Dataset data = lasso_instance(60, 80, 7, 5);
    const FitResult fit = ista(data, PenaltySpec::soft(0.05));
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
      REQUIRE(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-12);
  }

  TEST_CASE("zero design gives zero") {
    const Dataset zero(Matrix::Zero(10, 4), Vector::LinSpaced(10, -1, 1));
    const FitResult fit = ista(zero, PenaltySpec::soft(0.1));
    CHECK(fit.beta_hat.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("too large a step is detected") {
    const Dataset data = lasso_instance(50, 20, 8);
    const double l = gram_spectral_norm(data.x());
    CHECK_THROWS_AS(ista(data, PenaltySpec::soft(0.01), 5.0 / l), StepSizeError);
    CHECK_THROWS_AS(ista(data, PenaltySpec::soft(0.01), 0.0), StepSizeError);
  }

  TEST_CASE("spectral norm by power iteration") {
    const Dataset data = lasso_instance(40, 15, 9);
    const Matrix g = data.x().transpose() * data.x() / 40.0;
    const double top = Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().maxCoeff();
    CHECK(gram_spectral_norm(data.x()) == doctest::Approx(top).epsilon(1e-6));
  }
}

TEST_SUITE("orthogonal cross-solver agreement") {
  TEST_CASE("cd, ista and dantzig reduce to the same estimate") {
    const Dataset data = orthogonal_instance(60, 10, 10);
    const double n = 60.0, lambda = 0.25;
    const FitResult cd = coord_descent_l1(data, lambda, 1e-12);
    const FitResult pg = ista(data, PenaltySpec::soft(lambda), std::nullopt, 1e-13);
    const FitResult dz = dantzig_selector({data, n * lambda});
    CHECK((cd.beta_hat - pg.beta_hat).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((cd.beta_hat - dz.beta_hat).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_SUITE("lla") {
  TEST_CASE("the first step from zero is the lasso, bit for bit") {
    const Dataset data = lasso_instance(80, 30, 11);
    const double lambda = 0.2;
    for (const auto& pen : {PenaltySpec::scad(lambda, 3.7), PenaltySpec::mcp(lambda, 2.0)}) {
      const LlaState s0 = lla_initial_state(pen, Vector::Zero(30));
      CHECK((s0.weights.array() == lambda).all());
      const LlaState s1 = lla_step(data, pen, s0);
      CHECK(s1.k == 1);
      CHECK(s1.beta == coord_descent_l1(data, lambda).beta_hat);
      for (Eigen::Index j = 0; j < 30; ++j)
        CHECK(s1.weights(j) == penalty_derivative(pen, std::abs(s1.beta(j))));
      const FitResult one = lla(data, pen, Vector::Zero(30), 1e-9, 1);
      CHECK(one.beta_hat == s1.beta);
    }
  }

  TEST_CASE("outer objective sequence is nonincreasing") {
    for (std::uint64_t s = 0; s < 15; ++s) {
      const Dataset data = lasso_instance(60, 40, 300 + s, 4);
      const double lambda = lambda_max(data) * 0.15;
      for (const auto& pen : {PenaltySpec::scad(lambda, 3.7), PenaltySpec::mcp(lambda, 1.5)}) {
        const FitResult fit = lla(data, pen, Vector::Zero(40));
        for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
          REQUIRE(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-10);
      }
    }
  }

  TEST_CASE("exact support recovery with strong separated signals") {
    int hits = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
      LinearModelSpec spec{200, 50, {{0, 3.0}, {1, -3.0}, {2, 2.5}, {3, -2.5}}, 1.0, {}, EndogeneityMode::direct};
      const Dataset raw = gen_linear(spec, Seed{5000 + r});
      const Dataset std_x = standardize(raw);
      const Dataset data = std_x.with_response(Vector(std_x.y().array() - std_x.y().mean()));
      const FitResult fit = lla(data, PenaltySpec::scad(0.4, 3.7), Vector::Zero(50));
      if (same_support(fit.active_set, 4)) ++hits;
    }
    CHECK(hits >= 95);
  }

  TEST_CASE("rejects convex penalties") {
    const Dataset data = lasso_instance(30, 5, 12);
    CHECK_THROWS_AS(lla(data, PenaltySpec::soft(0.1), Vector::Zero(5)), ConfigurationError);
    CHECK_THROWS_AS(lla(data, PenaltySpec::scad(0.1, 3.7), Vector::Zero(4)), ValidationError);
  }
}

TEST_SUITE("best subset") {
  TEST_CASE("lambda zero is full OLS and huge lambda is empty") {
    const Dataset data = lasso_instance(30, 8, 13);
    IndexSet all(8);
    for (std::size_t j = 0; j < 8; ++j) all[j] = j;
    const FitResult full = best_subset_l0(data, 0.0);
    CHECK(full.active_set == all);
    CHECK((full.beta_hat - oracle::ols_normal_equations(data.x(), data.y(), all)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(best_subset_l0(data, 1e6).active_set.empty());
  }

  TEST_CASE("recovers a strong two-sparse truth") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      LinearModelSpec spec{30, 8, {{2, 4.0}, {5, -3.0}}, 0.5, {}, EndogeneityMode::direct};
      const Dataset std_x = standardize(gen_linear(spec, Seed{900 + s}));
      const Dataset data = std_x.with_response(Vector(std_x.y().array() - std_x.y().mean()));
      CHECK(best_subset_l0(data, 0.1).active_set == IndexSet{2, 5});
    }
  }

  TEST_CASE("dominates every other solver under the L0 objective") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset data = lasso_instance(40, 10, 400 + s, 3);
      const double lambda = 0.05 + 0.02 * static_cast<double>(s);
      const double best = best_subset_l0(data, lambda).objective;
      CHECK(best == doctest::Approx(l0_objective(data, best_subset_l0(data, lambda).beta_hat, lambda)));
      for (const FitResult& other :
           {coord_descent_l1(data, lambda), lla(data, PenaltySpec::scad(lambda, 3.7), Vector::Zero(10)),
            ista(data, PenaltySpec::hard(std::sqrt(2 * lambda))), ols_refit(data, {0, 1, 2})})
        CHECK(best <= l0_objective(data, other.beta_hat, lambda) + 1e-12);
    }
  }

  TEST_CASE("size limit") {
    const Dataset data = lasso_instance(40, 16, 14);
    CHECK_THROWS_AS(best_subset_l0(data, 0.1), SizeLimitError);
  }
}

TEST_SUITE("dantzig and confidence set") {
  TEST_CASE("large gamma gives zero") {
    const Dataset data = lasso_instance(30, 20, 15);
    const double g = (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
    CHECK(dantzig_selector({data, g}).beta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(dantzig_selector({data, 2 * g}).active_set.empty());
    CHECK_THROWS_AS(dantzig_selector({data, 0.0}), ValidationError);
  }

  TEST_CASE("identity design is componentwise soft thresholding") {
    Vector y(6);
    y << 3.0, -0.2, 1.5, -2.5, 0.7, 0.0;
    const Dataset data(Matrix::Identity(6, 6), y);
    const FitResult fit = dantzig_selector({data, 1.0});
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(fit.beta_hat(j) == doctest::Approx(soft(y(j), 1.0)));
  }

  TEST_CASE("matches an interior-point solution of the same program") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Dataset data = lasso_instance(20, 30, 500 + s, 2, 0.5);
      const double gamma = 0.3 * (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
      const FitResult fit = dantzig_selector({data, gamma});
      CHECK(hcs_membership({data, gamma}, fit.beta_hat));
      CHECK(score_sup_norm(data, fit.beta_hat) <= gamma + 1e-8);

      // min 1'(u + v) s.t. -gamma <= G(u - v) - c <= gamma, u, v >= 0
      const Matrix g = data.x().transpose() * data.x();
      const Vector c = data.x().transpose() * data.y();
      const Eigen::Index d = 30;
      Matrix a(2 * d, 2 * d);
      a << g, -g, -g, g;
      Vector b(2 * d);
      b << Vector::Constant(d, gamma) + c, Vector::Constant(d, gamma) - c;
      const auto ipm = oracle::lp_interior_point(Vector::Ones(2 * d), a, b);
      CAPTURE(s);
      CHECK(std::abs(fit.objective - ipm.objective) < 1e-6);
      CHECK(fit.objective == doctest::Approx(fit.beta_hat.lpNorm<1>()).epsilon(1e-12));
    }
  }

  TEST_CASE("membership") {
    LinearModelSpec spec{100, 20, {{0, 1.0}, {3, -2.0}}, 1.0, {}, EndogeneityMode::direct};
    const Dataset data = gen_linear(spec, Seed{16});
    const Vector eps = true_noise(spec, data);
    const double g = (data.x().transpose() * eps).cwiseAbs().maxCoeff();
    CHECK(hcs_membership({data, g}, dense_beta(spec)));
    CHECK_FALSE(hcs_membership({data, 0.0}, dense_beta(spec)));
    CHECK_FALSE(hcs_membership({data, 0.0}, Vector::Zero(20)));
    CHECK_THROWS_AS(hcs_membership({data, g}, Vector::Zero(3)), ValidationError);
    CHECK(default_gamma_n(data, 2.0) == doctest::Approx(2.0 * default_gamma_n(data)));
  }
}

TEST_SUITE("ols refit") {
  TEST_CASE("identity design and empty support") {
    Vector y(5);
    y << 1, 2, 3, 4, 5;
    const Dataset id(Matrix::Identity(5, 5), y);
    const FitResult fit = ols_refit(id, {1, 3});
    CHECK(fit.beta_hat(1) == doctest::Approx(2.0));
    CHECK(fit.beta_hat(3) == doctest::Approx(4.0));
    CHECK(fit.beta_hat(0) == 0.0);
    CHECK(ols_refit(id, {}).residuals == y);
  }

  TEST_CASE("matches the normal equations") {
    const Dataset data = lasso_instance(50, 20, 17);
    const IndexSet s{0, 4, 7, 11, 19};
    const Vector ref = oracle::ols_normal_equations(data.x(), data.y(), s);
    CHECK((ols_refit(data, s).beta_hat - ref).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("rank deficiency and oversize supports") {
    Matrix x = lasso_instance(20, 4, 18).x();
    x.col(3) = x.col(1);
    const Dataset dup(x, Vector::Ones(20));
    CHECK_THROWS_AS(ols_refit(dup, {1, 3}), SingularityError);
    const Dataset small = lasso_instance(5, 8, 19);
    CHECK_THROWS_AS(ols_refit(small, {0, 1, 2, 3, 4}), SingularityError);
    CHECK_THROWS_AS(ols_refit(small, {9}), ValidationError);
  }
}

namespace {

// Share of pure-noise replicates whose CV curve is minimized at the largest lambda.
int pure_noise_largest_lambda_count(std::size_t n, std::size_t d, std::size_t folds, std::size_t reps) {
  int largest = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    const Dataset x = gen_iid_gaussian(n, d, Seed{6000 + r});
    const Dataset noise = gen_iid_gaussian(n, 1, Seed{7000 + r});
    const Dataset data = x.with_response(noise.x().col(0));
    const Dataset s = standardize(data);
    const auto grid = lambda_grid(lambda_max(s.with_response(Vector(s.y().array() - s.y().mean()))), 20);
    const CvResult cv = cross_validate(data, lasso_path_solver(), grid, folds, Seed{r});
    if (cv.best_index == 0) ++largest;
  }
  return largest;
}

}  // namespace

TEST_SUITE("cross validation") {
  TEST_CASE("single lambda grid") {
    const Dataset data = lasso_instance(40, 10, 20);
    const std::vector<double> grid{0.3};
    const CvResult cv = cross_validate(data, lasso_path_solver(), grid, 5, Seed{1});
    CHECK(cv.lambda_star == 0.3);
    CHECK(cv.best_index == 0);
    CHECK(cv.cv_error.size() == 1);
  }

  TEST_CASE("pure noise prefers the largest lambda more often than not") {
    CHECK(pure_noise_largest_lambda_count(60, 30, 5, 100) > 50);
  }

  TEST_CASE("duplicated rows split by copy generalize exactly") {
    const Dataset half = lasso_instance(30, 8, 21);
    Matrix x(60, 8);
    x << half.x(), half.x();
    Vector y(60);
    y << half.y(), half.y();
    const Dataset data(x, y);
    std::vector<std::size_t> folds(60);
    for (std::size_t i = 0; i < 60; ++i) folds[i] = i < 30 ? 0 : 1;
    const auto grid = lambda_grid(lambda_max(half), 15);
    const CvResult cv = cross_validate(data, lasso_path_solver(1e-10), grid, folds);
    CHECK(cv.best_index == grid.size() - 1);
    CHECK(cv.cv_error.front() >= cv.cv_error.back());
  }

  TEST_CASE("fold assignment is balanced, seeded and validated") {
    const auto a = assign_folds(23, 5, Seed{3});
    CHECK(a == assign_folds(23, 5, Seed{3}));
    CHECK(a != assign_folds(23, 5, Seed{4}));
    std::vector<int> count(5, 0);
    for (auto f : a) ++count[f];
    CHECK(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()) <= 1);
    CHECK_THROWS_AS(assign_folds(10, 1, Seed{1}), ConfigurationError);
    const Dataset data = lasso_instance(9, 3, 22);
    const std::vector<double> grid{0.1};
    CHECK_THROWS_AS(cross_validate(data, lasso_path_solver(), grid, 5, Seed{1}), ConfigurationError);
    CHECK_THROWS_AS(cross_validate(data, lasso_path_solver(), std::vector<double>{}, 3, Seed{1}), ConfigurationError);
  }

  TEST_CASE("same seed, same curve") {
    const Dataset data = lasso_instance(50, 20, 23);
    const auto grid = lambda_grid(lambda_max(data), 10);
    const CvResult a = cross_validate(data, lasso_path_solver(), grid, 10, Seed{5});
    const CvResult b = cross_validate(data, lasso_path_solver(), grid, 10, Seed{5});
    CHECK(a.cv_error == b.cv_error);
    CHECK(a.lambda_star == b.lambda_star);
  }
}

// Targets the current rule does not reach; run as a separate ctest entry.
TEST_SUITE("calibration gaps") {
  TEST_CASE("pure noise prefers the largest lambda in at least 80 of 100 replicates") {
    const int largest = pure_noise_largest_lambda_count(60, 30, 5, 100);
    CAPTURE(largest);
    CHECK(largest >= 80);
  }
}
