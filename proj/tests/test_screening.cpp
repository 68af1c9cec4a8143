#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "sparselab/error.hpp"
#include "sparselab/screening.hpp"
#include "sparselab/solvers.hpp"

using namespace sparselab;

TEST_SUITE("screening") {
  TEST_CASE("a column equal to the standardized response has coefficient one") {
    const Dataset base = standardize(gen_iid_gaussian(40, 4, Seed{1}));
    const Vector y = base.x().col(2);
    const Vector beta = marginal_coefficients(base.with_response(y));
    CHECK(beta(2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(beta(0)) < 1.0);
  }

  TEST_CASE("independent column at n = 10^4 is small") {
    const Dataset x = standardize(gen_iid_gaussian(10000, 3, Seed{2}));
    const Dataset y = gen_iid_gaussian(10000, 1, Seed{3});
    const Vector beta = marginal_coefficients(x.with_response(y.x().col(0)));
    CHECK(beta.cwiseAbs().maxCoeff() < 0.05);
  }

  TEST_CASE("hand instance against univariate least squares") {
    Matrix raw(5, 3);
    raw << 1, 2, -1,  //
        2, 0, 0,      //
        3, 1, 4,      //
        4, 5, 1,      //
        5, 3, 2;
    Vector y(5);
    y << 0.5, 1.0, 2.5, 2.0, 4.5;
    const Dataset data = standardize(Dataset(raw, y));
    const Vector beta = marginal_coefficients(data);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Vector x = data.x().col(j);
      const Vector xc = x.array() - x.mean();
      const Vector yc = y.array() - y.mean();
      const double slope = xc.dot(yc) / xc.squaredNorm();
      CHECK(std::abs(beta(j) - slope) < 1e-10);
    }
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(marginal_coefficients(Dataset(Matrix::Ones(5, 2) * 3.0, Vector::Ones(5))), PreconditionError);
    CHECK_THROWS_AS(marginal_coefficients(standardize(gen_iid_gaussian(5, 2, Seed{1}))), PreconditionError);
  }

  TEST_CASE("threshold zero and top-k = d keep everything") {
    const Dataset data = testsupport::lasso_instance(30, 12, 4);
    const auto all_by_delta = sis_select(data, ThresholdRule{0.0});
    const auto all_by_k = sis_select(data, TopKRule{12});
    CHECK(all_by_delta.survivors.size() == 12);
    CHECK(all_by_delta.survivors == all_by_k.survivors);
    CHECK_THROWS_AS(sis_select(data, TopKRule{13}), ConfigurationError);
    CHECK_THROWS_AS(sis_select(data, ThresholdRule{-1.0}), ConfigurationError);
    CHECK(sis_select(data).survivors.size() == std::min<std::size_t>(12, default_screening_size(30)));
    CHECK(default_screening_size(100) == 21);
  }

  TEST_CASE("threshold rule is exactly the set above delta") {
    const Dataset data = testsupport::lasso_instance(50, 40, 5);
    const auto r = sis_select(data, ThresholdRule{0.2});
    for (Eigen::Index j = 0; j < 40; ++j) {
      const bool in = std::binary_search(r.survivors.begin(), r.survivors.end(), std::size_t(j));
      CHECK(in == (std::abs(r.marginal_beta(j)) >= 0.2));
    }
  }

  TEST_CASE("survivor sets shrink as delta grows") {
    const Dataset data = testsupport::lasso_instance(50, 60, 6);
    IndexSet previous = sis_select(data, ThresholdRule{0.0}).survivors;
    for (int k = 1; k <= 40; ++k) {
      const IndexSet now = sis_select(data, ThresholdRule{0.02 * k}).survivors;
      REQUIRE(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
      previous = now;
    }
  }

  TEST_CASE("ties at the top-k boundary go to the lower index") {
    Matrix x = standardize(gen_iid_gaussian(20, 4, Seed{7})).x();
    x.col(3) = x.col(1);
    const Dataset data(x, Vector(x.col(1) + 0.01 * x.col(0)));
    const auto r = sis_select(data, TopKRule{1});
    CHECK(r.survivors == IndexSet{1});
    Vector tie(4);
    tie << 0.5, -2.0, 1.0, 2.0;
    CHECK(rank_by_magnitude(tie) == IndexSet{1, 3, 2, 0});
  }

  TEST_CASE("ranking by marginal coefficient equals ranking by sample correlation") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset data = testsupport::lasso_instance(60, 50, 600 + s);
      Vector corr(50);
      for (Eigen::Index j = 0; j < 50; ++j) corr(j) = sample_corr(Vector(data.x().col(j)), data.y());
      CHECK(sis_select(data, TopKRule{50}).ranking == rank_by_magnitude(corr));
    }
  }

  TEST_CASE("sure screening keeps the true support") {
    int kept = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
      LinearModelSpec spec{100, 1000, {}, 1.0, {}, EndogeneityMode::direct};
      for (std::size_t j = 0; j < 5; ++j) spec.beta[j * 200 + 7] = (j % 2 ? -2.0 : 2.0);
      const Dataset data = standardize(gen_linear(spec, Seed{8000 + r}));
      const IndexSet surv = sis_select(data, TopKRule{37}).survivors;
      bool all = true;
      for (const auto& [j, b] : spec.beta) all = all && std::binary_search(surv.begin(), surv.end(), j);
      kept += all;
    }
    CHECK(kept >= 95);
  }

  TEST_CASE("screen then fit embeds back and beats the null model") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset data = testsupport::lasso_instance(80, 300, 700 + s, 4);
      const IndexSet surv = sis_select(data, TopKRule{20}).survivors;
      const Dataset reduced = data.select_columns(surv);
      const double lambda = 0.1;
      const FitResult small = coord_descent_l1(reduced, lambda);
      Vector full = Vector::Zero(300);
      for (std::size_t k = 0; k < surv.size(); ++k) full(Eigen::Index(surv[k])) = small.beta_hat(Eigen::Index(k));
      CHECK((data.x() * full - reduced.x() * small.beta_hat).cwiseAbs().maxCoeff() < 1e-12);
      const auto pen = PenaltySpec::soft(lambda);
      CHECK(penalized_objective(data, full, pen) <= penalized_objective(data, Vector::Zero(300), pen));
    }
  }
}
