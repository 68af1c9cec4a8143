#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "support.hpp"
#include "sparselab/dimred.hpp"
#include "sparselab/error.hpp"

using namespace sparselab;

namespace {

double orthonormality_gap(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

// Median seconds of `fn` over a few runs.
template <class Fn>
double time_it(Fn&& fn, int runs = 5) {
  std::vector<double> t;
  for (int r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

}  // namespace

TEST_SUITE("jacobi") {
  TEST_CASE("reconstructs a known decomposition") {
    Matrix q = gen_iid_gaussian(6, 6, Seed{1}).x().householderQr().householderQ();
    Vector lam(6);
    lam << 10, 5, 3, 3, -1, 0.5;
    const Matrix a = q * lam.asDiagonal() * q.transpose();
    const SymmetricEigen e = jacobi_eigen(a);
    Vector sorted = lam;
    std::sort(sorted.data(), sorted.data() + 6, std::greater<>());
    CHECK((e.values - sorted).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(orthonormality_gap(e.vectors) < 1e-10);
    CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index c = 0; c < 6; ++c) {
      Eigen::Index arg;
      e.vectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(e.vectors(arg, c) > 0.0);
    }
  }

  TEST_CASE("agrees with a library solver on random symmetric matrices") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Matrix g = gen_iid_gaussian(30, 30, Seed{10 + s}).x();
      const Matrix a = g + g.transpose();
      const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().reverse();
      CHECK((jacobi_eigen(a).values - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("diagonal and one-by-one inputs") {
    Matrix a = Matrix::Zero(3, 3);
    a.diagonal() << 1, 3, 2;
    const auto e = jacobi_eigen(a);
    CHECK(e.values(0) == 3.0);
    CHECK(e.vectors(1, 0) == 1.0);
    CHECK(jacobi_eigen(Matrix::Constant(1, 1, -4.0)).values(0) == -4.0);
  }
}

TEST_SUITE("pca") {
  TEST_CASE("recovers the leading axis of diag(9, 1, 1)") {
    Matrix x = gen_iid_gaussian(2000, 3, Seed{2}).x();
    x.col(0) *= 3.0;
    const Projection p = pca(Dataset(x), 1);
    CHECK(std::abs(p.basis(0, 0)) > 0.99);
    CHECK(p.basis(0, 0) > 0.0);
    CHECK(p.eigenvalues(0) == doctest::Approx(9.0).epsilon(0.1));
    CHECK(p.scale == 1.0);
    CHECK(p.method == ProjectionMethod::pca);
  }

  TEST_CASE("basis is orthonormal and ordered, in both regimes") {
    for (auto [n, d] : {std::pair{50, 20}, std::pair{20, 60}}) {
      const Dataset data = gen_iid_gaussian(std::size_t(n), std::size_t(d), Seed{3});
      const std::size_t k = 10;
      const Projection p = pca(data, k);
      CHECK(p.basis.rows() == d);
      CHECK(p.basis.cols() == Eigen::Index(k));
      CHECK(orthonormality_gap(p.basis) < 1e-9);
      for (Eigen::Index j = 1; j < Eigen::Index(k); ++j) CHECK(p.eigenvalues(j) <= p.eigenvalues(j - 1));
      // eigenvalues match the covariance spectrum
      const Matrix xc = data.x().rowwise() - data.x().colwise().mean();
      const Matrix cov = xc.transpose() * xc / double(n - 1);
      const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues().reverse();
      CHECK((p.eigenvalues - ref.head(Eigen::Index(k))).cwiseAbs().maxCoeff() < 1e-8);
      for (Eigen::Index j = 0; j < Eigen::Index(k); ++j)
        CHECK((cov * p.basis.col(j) - p.eigenvalues(j) * p.basis.col(j)).norm() < 1e-7);
    }
  }

  TEST_CASE("full-rank basis reconstructs exactly") {
    const Dataset wide = gen_iid_gaussian(15, 40, Seed{4});  // centered rank n - 1
    CHECK(reconstruction_error(wide, pca(wide, 14)) < 1e-8);
    CHECK(reconstruction_error(wide, pca(wide, 15)) < 1e-8);
    const Dataset tall = gen_iid_gaussian(40, 8, Seed{4});
    CHECK(reconstruction_error(tall, pca(tall, 8)) < 1e-8);
  }

  TEST_CASE("reconstruction error is no worse than random projection") {
    Dataset data = gen_iid_gaussian(60, 40, Seed{5});
    for (std::size_t k : {1, 5, 10, 20}) {
      const double best = reconstruction_error(data, pca(data, k));
      for (std::uint64_t s = 0; s < 10; ++s)
        CHECK(best <= reconstruction_error(data, random_projection(data, k, Seed{s})) + 1e-12);
    }
  }

  TEST_CASE("k outside [1, min(n, d)] is a configuration error") {
    const Dataset data = gen_iid_gaussian(10, 5, Seed{6});
    CHECK_THROWS_AS(pca(data, 0), ConfigurationError);
    CHECK_THROWS_AS(pca(data, 6), ConfigurationError);
    CHECK_THROWS_AS(pca(gen_iid_gaussian(4, 9, Seed{6}), 5), ConfigurationError);
  }
}

TEST_SUITE("random projection") {
  TEST_CASE("unit columns, scale, reproducibility") {
    const Projection r = random_projection(500, 40, Seed{7});
    CHECK(r.basis.rows() == 500);
    CHECK((r.basis.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(r.scale == doctest::Approx(std::sqrt(500.0 / 40.0)));
    CHECK(r.method == ProjectionMethod::rp);
    CHECK(random_projection(500, 40, Seed{7}).basis == r.basis);
    CHECK(random_projection(500, 40, Seed{8}).basis != r.basis);
    CHECK_THROWS_AS(random_projection(500, 0, Seed{7}), ConfigurationError);
  }

  TEST_CASE("columns are nearly orthogonal in high dimension") {
    const Projection r = random_projection(1000, 50, Seed{9});
    const Matrix g = r.basis.transpose() * r.basis;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < 50; ++i)
      for (Eigen::Index j = i + 1; j < 50; ++j) sum += std::abs(g(i, j));
    CHECK(sum / (50.0 * 49.0 / 2.0) < 0.1);
  }

  TEST_CASE("optional orthogonalization") {
    const Projection r = random_projection(200, 30, Seed{10}, {true});
    CHECK(orthonormality_gap(r.basis) < 1e-12);
  }

  TEST_CASE("projection is a plain product") {
    const Dataset data = gen_iid_gaussian(12, 30, Seed{11});
    const Projection r = random_projection(data, 5, Seed{12});
    CHECK((project(data, r) - data.x() * r.basis).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(project(gen_iid_gaussian(12, 29, Seed{1}), r), ValidationError);
  }
}

TEST_SUITE("distortion") {
  TEST_CASE("identity embedding has no distortion") {
    const Dataset data = gen_iid_gaussian(20, 15, Seed{13});
    Projection id{Matrix::Identity(15, 15), ProjectionMethod::pca, 15, 1.0, Vector()};
    const DistortionReport rep = distortion(data, id);
    CHECK(rep.median_relative_error < 1e-14);
    CHECK(rep.pairs == 190);
    CHECK(distortion(data, pca(data, 15)).median_relative_error < 1e-12);
  }

  TEST_CASE("hand computed pair distances") {
    Matrix x(3, 2);
    x << 0, 0, 3, 4, 0, 1;
    const auto dist = pairwise_distances(x);
    REQUIRE(dist.size() == 3);
    CHECK(dist[0] == 5.0);
    CHECK(dist[1] == 1.0);
    CHECK(dist[2] == doctest::Approx(std::sqrt(18.0)));
    // first coordinate only: projected distances 3, 0, 3; errors 0.4, 1, 1 - 3/sqrt(18)
    Projection first{Matrix::Identity(2, 1), ProjectionMethod::pca, 1, 1.0, Vector()};
    const auto rep = distortion(Dataset(x), first);
    CHECK(rep.median_relative_error == doctest::Approx(0.4));
  }

  TEST_CASE("random projection at n = 50, d = 1000, k = 300") {
    const Dataset data = gen_iid_gaussian(50, 1000, Seed{14});
    for (std::uint64_t s = 0; s < 5; ++s)
      CHECK(distortion(data, random_projection(data, 300, Seed{s})).median_relative_error < 0.15);
  }

  TEST_CASE("random-projection distortion falls with k") {
    const Dataset data = gen_iid_gaussian(50, 1000, Seed{15});
    const std::vector<double> original = pairwise_distances(data.x());
    std::vector<double> mean;
    for (std::size_t k : {10, 50, 100, 300}) {
      double m = 0.0;
      for (std::uint64_t s = 0; s < 20; ++s) {
        const Projection r = random_projection(data, k, Seed{100 + s});
        m += distortion(original, project(data, r), r).median_relative_error / 20.0;
      }
      mean.push_back(m);
    }
    CAPTURE(mean[0]);
    CAPTURE(mean[3]);
    for (std::size_t i = 1; i < mean.size(); ++i) CHECK(mean[i] < mean[i - 1]);
  }

  TEST_CASE("duplicate rows are skipped; all duplicates are undefined") {
    Matrix x = gen_iid_gaussian(6, 4, Seed{16}).x();
    x.row(5) = x.row(2);
    const Projection r = random_projection(4, 2, Seed{1});
    CHECK(distortion(Dataset(x), r).pairs == 14);
    const Dataset same(Matrix::Ones(5, 4));
    CHECK_THROWS_AS(distortion(same, r), UndefinedMetricError);
    CHECK_THROWS_AS(distortion(Dataset(Matrix::Ones(1, 4)), r), ValidationError);
  }
}

TEST_SUITE("dimred cost") {
  TEST_CASE("doubling d inflates pca cost faster than random projection") {
    const std::size_t n = 400, k = 10;
    const Dataset small = gen_iid_gaussian(n, 150, Seed{17});
    const Dataset large = gen_iid_gaussian(n, 300, Seed{18});
    auto pca_time = [&](const Dataset& d) { return time_it([&] { (void)project(d, pca(d, k)); }); };
    auto rp_time = [&](const Dataset& d) {
      return time_it([&] { (void)project(d, random_projection(d, k, Seed{1})); }, 25);
    };
    const double pca_ratio = pca_time(large) / pca_time(small);
    const double rp_ratio = rp_time(large) / rp_time(small);
    CAPTURE(pca_ratio);
    CAPTURE(rp_ratio);
    CHECK(pca_ratio > 3.0);
    CHECK(pca_ratio > rp_ratio);
  }
}
