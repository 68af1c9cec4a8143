#pragma once

#include <variant>

#include "sparselab/dataset.hpp"

namespace sparselab {

struct ThresholdRule {
  double delta = 0.0;
};
struct TopKRule {
  std::size_t k = 0;
};
using ScreeningRule = std::variant<ThresholdRule, TopKRule>;

// Retained size floor(n / log n), used when no rule is given.
std::size_t default_screening_size(std::size_t n);

struct ScreeningResult {
  Vector marginal_beta;
  IndexSet survivors;  // ascending
  IndexSet ranking;    // all indices by decreasing |marginal_beta|, ties by lower index
  ScreeningRule rule;
};

// Univariate least-squares slopes x_j'y / x_j'x_j of standardized columns,
// i.e. x_j'y / (n - 1). Equals the marginal correlation when y is standardized.
Vector marginal_coefficients(const Dataset& data);

// Indices ordered by decreasing |v_j|; ties resolved toward the lower index.
IndexSet rank_by_magnitude(const Vector& v);

// Sure independence screening.
ScreeningResult sis_select(const Dataset& data, const ScreeningRule& rule);
ScreeningResult sis_select(const Dataset& data);

}  // namespace sparselab
