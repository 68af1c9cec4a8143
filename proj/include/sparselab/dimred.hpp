#pragma once

#include <string_view>

#include "sparselab/dataset.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

enum class ProjectionMethod { pca, rp };

std::string_view to_string(ProjectionMethod method);

// d x k basis. PCA bases are orthonormal; RP bases have unit-norm columns.
// `scale` maps projected distances back to the original scale: 1 for PCA,
// sqrt(d / k) for RP, whose unit columns shrink lengths by about sqrt(k / d).
struct Projection {
  Matrix basis;
  ProjectionMethod method = ProjectionMethod::pca;
  std::size_t k = 0;
  double scale = 1.0;
  Vector eigenvalues;  // PCA only: sample-covariance eigenvalues, descending
};

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns, largest-magnitude entry positive
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Stops when the
// off-diagonal Frobenius norm falls below tol times the full norm.
SymmetricEigen jacobi_eigen(Matrix a, double tol = 1e-10, int max_sweeps = 60);

// Leading k eigenvectors of the sample covariance of the column-centered data.
// When d > n the n x n Gram matrix is decomposed instead.
Projection pca(const Dataset& data, std::size_t k);

struct RandomProjectionOptions {
  bool orthogonalize = false;  // Gram-Schmidt the columns (off by default)
};

// d x k matrix with iid Gaussian entries, columns scaled to unit norm.
Projection random_projection(std::size_t d, std::size_t k, Seed seed, RandomProjectionOptions options = {});
Projection random_projection(const Dataset& data, std::size_t k, Seed seed, RandomProjectionOptions options = {});

// D * basis (no centering or scaling).
Matrix project(const Dataset& data, const Projection& proj);

struct DistortionReport {
  double median_relative_error = 0.0;
  std::size_t k = 0;
  ProjectionMethod method = ProjectionMethod::pca;
  std::size_t pairs = 0;  // pairs with nonzero original distance
};

// Median over row pairs of | scale * ||u~_i - u~_j|| - ||u_i - u_j|| | / ||u_i - u_j||.
// Duplicate rows are skipped; all-duplicate data throws UndefinedMetricError.
DistortionReport distortion(const Dataset& data, const Projection& proj);

// Euclidean distances between rows i < j, ordered (0,1), (0,2), ..., (1,2), ...
std::vector<double> pairwise_distances(const Matrix& rows);

// Same as above with the original distances precomputed by pairwise_distances.
DistortionReport distortion(const std::vector<double>& original, const Matrix& projected, const Projection& proj);

// Mean squared residual ||x_c - P x_c||^2 per row, P the orthogonal projector
// onto span(basis) and x_c the column-centered rows.
double reconstruction_error(const Dataset& data, const Projection& proj);

}  // namespace sparselab
