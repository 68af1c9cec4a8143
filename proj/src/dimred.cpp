#include "sparselab/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparselab/error.hpp"
#include "sparselab/stats.hpp"

namespace sparselab {

namespace {

using Eigen::Index;

void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

// Fills columns [from, k) with unit vectors orthogonal to the earlier ones.
void complete_basis(Matrix& basis, Index from) {
  const Index d = basis.rows();
  Index candidate = 0;
  for (Index c = from; c < basis.cols(); ++c) {
    for (; candidate < d; ++candidate) {
      Vector v = Vector::Unit(d, candidate);
      for (int pass = 0; pass < 2; ++pass)
        for (Index j = 0; j < c; ++j) v -= basis.col(j).dot(v) * basis.col(j);
      const double norm = v.norm();
      if (norm > 1e-6) {
        basis.col(c) = v / norm;
        fix_sign(basis.col(c));
        ++candidate;
        break;
      }
    }
  }
}

}  // namespace

std::string_view to_string(ProjectionMethod method) { return method == ProjectionMethod::pca ? "pca" : "rp"; }

SymmetricEigen jacobi_eigen(Matrix a, double tol, int max_sweeps) {
  if (a.rows() != a.cols()) throw ValidationError("jacobi_eigen: matrix is not square");
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const double total = a.norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (Index q = 0; q < n; ++q)
      for (Index p = 0; p < q; ++p) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };
  int sweep = 0;
  while (total > 0.0 && off_norm() > tol * total) {
    if (sweep++ >= max_sweeps) throw SolverError("jacobi_eigen: no convergence", off_norm() / total);
    const double skip = 1e-300 + 1e-18 * total;
    for (Index q = 1; q < n; ++q) {
      for (Index p = 0; p < q; ++p) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        auto colp = a.col(p);
        auto colq = a.col(q);
        for (Index k = 0; k < n; ++k) {
          const double akp = colp(k), akq = colq(k);
          colp(k) = c * akp - s * akq;
          colq(k) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          a(p, k) = colp(k);
          a(q, k) = colq(k);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (Index k = 0; k < n; ++k) {
          const double x = vp(k), y = vq(k);
          vp(k) = c * x - s * y;
          vq(k) = s * x + c * y;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index r = 0; r < n; ++r) {
    out.values(r) = a(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(r)]);
    out.vectors.col(r) = v.col(order[static_cast<std::size_t>(r)]);
    fix_sign(out.vectors.col(r));
  }
  return out;
}

Projection pca(const Dataset& data, std::size_t k) {
  const std::size_t limit = std::min(data.n(), data.d());
  if (k < 1 || k > limit)
    throw ConfigurationError("pca: k must lie in [1, min(n, d)] = [1, " + std::to_string(limit) + "]");
  const Matrix xc = data.x().rowwise() - data.x().colwise().mean();
  const double denom = data.n() > 1 ? static_cast<double>(data.n() - 1) : 1.0;
  const Index kk = static_cast<Index>(k);

  Projection proj;
  proj.method = ProjectionMethod::pca;
  proj.k = k;
  proj.scale = 1.0;
  proj.eigenvalues.resize(kk);
  proj.basis.resize(xc.cols(), kk);

  if (data.d() <= data.n()) {
    const Matrix cov = (xc.transpose() * xc) / denom;
    const SymmetricEigen eig = jacobi_eigen(cov);
    proj.basis = eig.vectors.leftCols(kk);
    proj.eigenvalues = eig.values.head(kk).cwiseMax(0.0);
    return proj;
  }

  // dual: X_c X_c' = U L U', right singular vectors X_c' u / sqrt(l)
  const Matrix gram = xc * xc.transpose();
  const SymmetricEigen eig = jacobi_eigen(gram);
  const double cutoff = 1e-10 * std::max(1.0, eig.values(0));
  Index filled = 0;
  for (; filled < kk; ++filled) {
    const double l = eig.values(filled);
    if (!(l > cutoff)) break;
    Vector v = xc.transpose() * eig.vectors.col(filled);
    // re-orthogonalize against earlier columns; rounding in the dual drifts
    for (Index j = 0; j < filled; ++j) v -= proj.basis.col(j).dot(v) * proj.basis.col(j);
    v.normalize();
    fix_sign(v);
    proj.basis.col(filled) = v;
    proj.eigenvalues(filled) = l / denom;
  }
  for (Index j = filled; j < kk; ++j) proj.eigenvalues(j) = 0.0;
  if (filled < kk) complete_basis(proj.basis, filled);
  return proj;
}

Projection random_projection(std::size_t d, std::size_t k, Seed seed, RandomProjectionOptions options) {
  if (k < 1) throw ConfigurationError("random_projection: k must be >= 1");
  if (d < 1) throw ConfigurationError("random_projection: d must be >= 1");
  if (options.orthogonalize && k > d) throw ConfigurationError("random_projection: orthogonalize needs k <= d");
  Projection proj;
  proj.method = ProjectionMethod::rp;
  proj.k = k;
  proj.basis.resize(static_cast<Index>(d), static_cast<Index>(k));
  Rng rng = make_rng(seed);
  fill_standard_normal(proj.basis, rng);
  for (Index c = 0; c < proj.basis.cols(); ++c) {
    if (options.orthogonalize)
      for (int pass = 0; pass < 2; ++pass)
        for (Index j = 0; j < c; ++j) proj.basis.col(c) -= proj.basis.col(j).dot(proj.basis.col(c)) * proj.basis.col(j);
    proj.basis.col(c).normalize();
  }
  proj.scale = std::sqrt(static_cast<double>(d) / static_cast<double>(k));
  return proj;
}

Projection random_projection(const Dataset& data, std::size_t k, Seed seed, RandomProjectionOptions options) {
  return random_projection(data.d(), k, seed, options);
}

Matrix project(const Dataset& data, const Projection& proj) {
  if (proj.basis.rows() != data.x().cols())
    throw ValidationError("project: basis has " + std::to_string(proj.basis.rows()) + " rows, data has " +
                          std::to_string(data.d()) + " columns");
  return data.x() * proj.basis;
}

std::vector<double> pairwise_distances(const Matrix& rows) {
  const Matrix t = rows.transpose();
  const Index n = t.cols();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.push_back((t.col(i) - t.col(j)).norm());
  return out;
}

DistortionReport distortion(const std::vector<double>& original, const Matrix& projected, const Projection& proj) {
  const Index n = projected.rows();
  if (n < 2) throw ValidationError("distortion: need n >= 2");
  if (original.size() != static_cast<std::size_t>(n * (n - 1) / 2))
    throw ValidationError("distortion: original distances do not match the projected rows");
  const Matrix pt = projected.transpose();
  std::vector<double> errors;
  errors.reserve(original.size());
  std::size_t pair = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j, ++pair) {
      const double orig = original[pair];
      if (orig == 0.0) continue;
      const double red = proj.scale * (pt.col(i) - pt.col(j)).norm();
      errors.push_back(std::abs(red - orig) / orig);
    }
  }
  if (errors.empty()) throw UndefinedMetricError("distortion: every row is a duplicate; no pair has nonzero distance");
  DistortionReport report;
  report.pairs = errors.size();
  report.median_relative_error = median(std::move(errors));
  report.k = proj.k;
  report.method = proj.method;
  return report;
}

DistortionReport distortion(const Dataset& data, const Projection& proj) {
  if (data.n() < 2) throw ValidationError("distortion: need n >= 2");
  return distortion(pairwise_distances(data.x()), project(data, proj), proj);
}

double reconstruction_error(const Dataset& data, const Projection& proj) {
  if (proj.basis.rows() != data.x().cols()) throw ValidationError("reconstruction_error: dimension mismatch");
  const Matrix xc = data.x().rowwise() - data.x().colwise().mean();
  const Eigen::HouseholderQR<Matrix> qr(proj.basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(proj.basis.rows(), proj.basis.cols());
  const Matrix resid = xc - (xc * q) * q.transpose();
  return resid.squaredNorm() / static_cast<double>(data.n());
}

}  // namespace sparselab
