#include "sparselab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sparselab/error.hpp"

namespace sparselab {

namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) throw ValidationError("mean of empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw ValidationError("sample sd needs at least two values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Dataset standardize(const Dataset& data, bool include_response) {
  if (data.n() < 2) throw ValidationError("standardize needs n >= 2");
  Matrix x = data.x();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(x.rows() - 1));
    // Relative test: a column of identical values leaves only rounding noise.
    const double scale = data.x().col(j).cwiseAbs().maxCoeff();
    if (!(sd > 1e-12 * std::max(1.0, scale)))
      throw DegenerateColumnError(static_cast<std::size_t>(j), data.column_name(static_cast<std::size_t>(j)));
    col /= sd;
  }
  std::optional<Vector> y = data.response();
  if (include_response && y) {
    *y = y->array() - y->mean();
    const double sd = std::sqrt(y->squaredNorm() / static_cast<double>(y->size() - 1));
    if (!(sd > 0.0)) throw DegenerateColumnError(data.d(), "y");
    *y /= sd;
  }
  return Dataset(std::move(x), std::move(y), data.column_names());
}

bool is_standardized(const Matrix& x, double tol) {
  if (x.rows() < 2) return false;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double m = x.col(j).mean();
    const double sd =
        std::sqrt((x.col(j).array() - m).square().sum() / static_cast<double>(x.rows() - 1));
    if (std::abs(m) > tol || std::abs(sd - 1.0) > tol) return false;
  }
  return true;
}

double sample_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("sample_corr: length mismatch");
  if (x.size() < 2) throw ValidationError("sample_corr: need at least two observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw UndefinedCorrelationError("sample_corr: constant input vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double sample_corr(const Vector& x, const Vector& y) { return sample_corr(as_span(x), as_span(y)); }

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double ks_upper_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("ks_upper_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    best = std::max(best, static_cast<double>(j) / nb - static_cast<double>(i) / na);
  }
  return best;
}

}  // namespace sparselab
