#pragma once

#include <map>

#include "sparselab/dataset.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

// Two Gaussian classes N(mu1, I) and N(mu2, I), n_per_class rows each.
struct TwoClassGaussianSpec {
  std::size_t n_per_class = 0;
  std::size_t d = 0;
  Vector mu1;
  Vector mu2;
};

// The sparse-mean configuration used for the noise-accumulation figure:
// mu1 = 0 and mu2 holds `value` in its first `nonzero` entries.
TwoClassGaussianSpec sparse_mean_spec(std::size_t n_per_class, std::size_t d,
                                      std::size_t nonzero = 10, double value = 3.0);

enum class EndogeneityMode {
  direct,     // eps += w * X_j           breaks E[eps X_j] = 0
  quadratic,  // eps += w * (X_j^2 - 1)   keeps E[eps X_j] = 0, breaks E[eps X_j^2] = 0
};

// y = X beta + eps with X iid N(0,1). Indices are 0-based.
struct LinearModelSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::map<std::size_t, double> beta;
  double noise_sd = 1.0;
  std::map<std::size_t, double> endogenous;
  EndogeneityMode mode = EndogeneityMode::direct;
};

void validate(const TwoClassGaussianSpec& spec);
void validate(const LinearModelSpec& spec);

// Rows [0, n) come from class 1 (label 0), rows [n, 2n) from class 2 (label 1).
Dataset gen_two_class(const TwoClassGaussianSpec& spec, Seed seed);

Dataset gen_iid_gaussian(std::size_t n, std::size_t d, Seed seed);

Dataset gen_linear(const LinearModelSpec& spec, Seed seed);

// Dense coefficient vector of a spec.
Vector dense_beta(const LinearModelSpec& spec);

// eps = y - X beta for data produced by gen_linear(spec, .).
Vector true_noise(const LinearModelSpec& spec, const Dataset& data);

}  // namespace sparselab
