#include "sparselab/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparselab/error.hpp"
#include "sparselab/stats.hpp"

namespace sparselab {

std::size_t default_screening_size(std::size_t n) {
  if (n < 3) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::log(static_cast<double>(n)))));
}

Vector marginal_coefficients(const Dataset& data) {
  if (!data.has_y()) throw PreconditionError("marginal_coefficients: dataset has no response");
  if (!is_standardized(data.x()))
    throw PreconditionError("marginal_coefficients: columns must be standardized; call standardize() first");
  const Matrix& x = data.x();
  Vector beta(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) beta(j) = x.col(j).dot(data.y()) / x.col(j).squaredNorm();
  return beta;
}

IndexSet rank_by_magnitude(const Vector& v) {
  IndexSet order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(v(static_cast<Eigen::Index>(a))) > std::abs(v(static_cast<Eigen::Index>(b)));
  });
  return order;
}

ScreeningResult sis_select(const Dataset& data, const ScreeningRule& rule) {
  ScreeningResult result;
  result.marginal_beta = marginal_coefficients(data);
  result.ranking = rank_by_magnitude(result.marginal_beta);
  result.rule = rule;
  if (const auto* t = std::get_if<ThresholdRule>(&rule)) {
    if (!(t->delta >= 0.0)) throw ConfigurationError("sis_select: delta must be >= 0");
    for (Eigen::Index j = 0; j < result.marginal_beta.size(); ++j)
      if (std::abs(result.marginal_beta(j)) >= t->delta) result.survivors.push_back(static_cast<std::size_t>(j));
  } else {
    const std::size_t k = std::get<TopKRule>(rule).k;
    if (k > data.d())
      throw ConfigurationError("sis_select: top_k = " + std::to_string(k) + " exceeds d = " +
                               std::to_string(data.d()));
    result.survivors.assign(result.ranking.begin(), result.ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(result.survivors.begin(), result.survivors.end());
  }
  return result;
}

ScreeningResult sis_select(const Dataset& data) {
  return sis_select(data, TopKRule{std::min(default_screening_size(data.n()), data.d())});
}

}  // namespace sparselab
