#pragma once

#include <map>

#include "sparselab/dataset.hpp"
#include "sparselab/generators.hpp"
#include "sparselab/random.hpp"
#include "sparselab/stats.hpp"

namespace testsupport {

using sparselab::Dataset;
using sparselab::Matrix;
using sparselab::Seed;
using sparselab::Vector;

// Standardized iid design, sparse truth with `sparsity` coefficients of
// alternating sign, centered response.
inline Dataset lasso_instance(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t sparsity = 3,
                              double noise_sd = 1.0) {
  sparselab::LinearModelSpec spec;
  spec.n = n;
  spec.d = d;
  spec.noise_sd = noise_sd;
  for (std::size_t j = 0; j < std::min(sparsity, d); ++j) spec.beta[j] = (j % 2 ? -1.0 : 1.0) * (1.0 + 0.5 * j);
  const Dataset raw = sparselab::gen_linear(spec, Seed{seed});
  const Dataset std_x = sparselab::standardize(raw);
  const Vector y = std_x.y().array() - std_x.y().mean();
  return std_x.with_response(y);
}

// Standardized design whose columns are mutually orthogonal:
// X'X = (n - 1) I. Response arbitrary.
inline Dataset orthogonal_instance(std::size_t n, std::size_t d, std::uint64_t seed) {
  sparselab::Rng rng = sparselab::make_rng(Seed{seed});
  Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  sparselab::fill_standard_normal(g, rng);
  g = g.rowwise() - g.colwise().mean();
  const Matrix q = g.householderQr().householderQ() * Matrix::Identity(g.rows(), g.cols());
  Matrix x = q * std::sqrt(static_cast<double>(n - 1));
  x = x.rowwise() - x.colwise().mean();  // q is already centered; removes rounding drift
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = (j % 3 == 0) ? 2.0 - 0.1 * j : 0.0;
  Vector e(static_cast<Eigen::Index>(n));
  sparselab::fill_standard_normal(e, rng);
  Vector y = x * beta + 0.5 * e;
  y = y.array() - y.mean();
  return Dataset(x, y);
}

inline double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

}  // namespace testsupport
