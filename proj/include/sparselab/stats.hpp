#pragma once

#include <span>
#include <vector>

#include "sparselab/dataset.hpp"

namespace sparselab {

// Column-wise centering and scaling to unit sample sd (n - 1 denominator).
// The response is left untouched unless `include_response` is set.
Dataset standardize(const Dataset& data, bool include_response = false);

// True when every column has |mean| <= tol and |sd - 1| <= tol.
bool is_standardized(const Matrix& x, double tol = 1e-8);

// Pearson sample correlation, clamped to [-1, 1].
double sample_corr(std::span<const double> x, std::span<const double> y);
double sample_corr(const Vector& x, const Vector& y);

double mean(std::span<const double> v);
// Sample standard deviation, n - 1 denominator.
double sample_sd(std::span<const double> v);

// Linear-interpolation quantile (R type 7) of unsorted data, p in [0, 1].
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

// Two-sample Kolmogorov-Smirnov distance sup_t |F_a(t) - F_b(t)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

// One-sided version sup_t (F_b(t) - F_a(t)): how far a sits to the right of b.
double ks_upper_distance(std::vector<double> a, std::vector<double> b);

}  // namespace sparselab
