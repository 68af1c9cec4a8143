#include "sparselab/generators.hpp"

#include <cmath>

#include "sparselab/error.hpp"

namespace sparselab {

TwoClassGaussianSpec sparse_mean_spec(std::size_t n_per_class, std::size_t d,
                                      std::size_t nonzero, double value) {
  TwoClassGaussianSpec spec;
  spec.n_per_class = n_per_class;
  spec.d = d;
  spec.mu1 = Vector::Zero(static_cast<Eigen::Index>(d));
  spec.mu2 = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < std::min(nonzero, d); ++j) spec.mu2(static_cast<Eigen::Index>(j)) = value;
  return spec;
}

void validate(const TwoClassGaussianSpec& spec) {
  if (spec.n_per_class < 2) throw ValidationError("two-class spec: n_per_class must be >= 2");
  if (spec.d < 1) throw ValidationError("two-class spec: d must be >= 1");
  const auto d = static_cast<Eigen::Index>(spec.d);
  if (spec.mu1.size() != d || spec.mu2.size() != d)
    throw ValidationError("two-class spec: mean vectors must have length d");
  if (!spec.mu1.array().isFinite().all() || !spec.mu2.array().isFinite().all())
    throw ValidationError("two-class spec: mean vectors must be finite");
}

void validate(const LinearModelSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw ValidationError("linear spec: n and d must be >= 1");
  if (!std::isfinite(spec.noise_sd) || spec.noise_sd < 0.0)
    throw ValidationError("linear spec: noise_sd must be finite and >= 0");
  for (const auto& [j, b] : spec.beta) {
    if (j >= spec.d) throw ValidationError("linear spec: beta index " + std::to_string(j) + " out of range");
    if (!std::isfinite(b)) throw ValidationError("linear spec: beta must be finite");
  }
  for (const auto& [j, w] : spec.endogenous) {
    if (j >= spec.d)
      throw ValidationError("linear spec: endogenous index " + std::to_string(j) + " out of range");
    if (!std::isfinite(w)) throw ValidationError("linear spec: coupling must be finite");
  }
}

Dataset gen_two_class(const TwoClassGaussianSpec& spec, Seed seed) {
  validate(spec);
  const auto n = static_cast<Eigen::Index>(spec.n_per_class);
  Rng rng = make_rng(seed);
  Matrix x(2 * n, static_cast<Eigen::Index>(spec.d));
  fill_standard_normal(x, rng);
  x.topRows(n).rowwise() += spec.mu1.transpose();
  x.bottomRows(n).rowwise() += spec.mu2.transpose();
  Vector label(2 * n);
  label.head(n).setZero();
  label.tail(n).setOnes();
  return Dataset(std::move(x), std::move(label));
}

Dataset gen_iid_gaussian(std::size_t n, std::size_t d, Seed seed) {
  if (n < 1 || d < 1) throw ValidationError("gen_iid_gaussian: n and d must be >= 1");
  Rng rng = make_rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  fill_standard_normal(x, rng);
  return Dataset(std::move(x));
}

Vector dense_beta(const LinearModelSpec& spec) {
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(spec.d));
  for (const auto& [j, b] : spec.beta) beta(static_cast<Eigen::Index>(j)) = b;
  return beta;
}

Dataset gen_linear(const LinearModelSpec& spec, Seed seed) {
  validate(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Rng rng = make_rng(seed);
  Matrix x(n, static_cast<Eigen::Index>(spec.d));
  fill_standard_normal(x, rng);
  Vector eps(n);
  fill_standard_normal(eps, rng);
  eps *= spec.noise_sd;
  for (const auto& [j, w] : spec.endogenous) {
    const auto xj = x.col(static_cast<Eigen::Index>(j)).array();
    if (spec.mode == EndogeneityMode::direct)
      eps.array() += w * xj;
    else
      eps.array() += w * (xj.square() - 1.0);
  }
  Vector y = x * dense_beta(spec) + eps;
  return Dataset(std::move(x), std::move(y));
}

Vector true_noise(const LinearModelSpec& spec, const Dataset& data) {
  return data.y() - data.x() * dense_beta(spec);
}

}  // namespace sparselab
