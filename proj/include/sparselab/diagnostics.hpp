#pragma once

#include <functional>

#include "sparselab/dataset.hpp"
#include "sparselab/random.hpp"
#include "sparselab/report.hpp"
#include "sparselab/solvers.hpp"

namespace sparselab {

// ---- spurious correlation -------------------------------------------------

enum class SubsetSearch { exact, greedy };

std::string_view to_string(SubsetSearch method);

// Largest number of subsets exact search will enumerate.
inline constexpr double kMaxExactSubsets = 1e6;

struct SpuriousCorrelationReport {
  double r_hat = 0.0;  // max_{j>=2} |corr(X_1, X_j)|
  double R_hat = 0.0;  // max over |S| = subset_size of |corr(X_1, LS fit of X_1 on X_S)|
  IndexSet subset;     // the maximizing S (0-based column indices, all >= 1)
  SubsetSearch method = SubsetSearch::greedy;
};

// Maximum absolute sample correlation between column 0 and the others.
double max_spurious_corr(const Dataset& data);

// Maximum multiple correlation between column 0 and least-squares
// combinations (with intercept) of `subset_size` other columns. Exact search
// enumerates every subset and is capped at kMaxExactSubsets; greedy adds the
// best column one at a time.
SpuriousCorrelationReport max_multiple_corr(const Dataset& data, std::size_t subset_size,
                                            SubsetSearch method = SubsetSearch::greedy);

// Greedy forward selection of the columns of `x` that best fit `target` by
// least squares with intercept. Returns the chosen indices in selection order.
IndexSet greedy_forward_selection(const Vector& target, const Matrix& x, std::size_t size);

struct SpuriousSamples {
  std::vector<std::size_t> d_list;
  std::vector<std::vector<double>> r_hat;  // [d index][replicate]
  std::vector<std::vector<double>> R_hat;
};

SpuriousSamples spurious_replicates(std::size_t n, const std::vector<std::size_t>& d_list, std::size_t reps,
                                    std::size_t subset_size, Seed seed,
                                    SubsetSearch method = SubsetSearch::greedy);

// Distribution of r_hat and R_hat over `reps` iid Gaussian datasets per d,
// with 5/25/50/75/95% quantiles.
ExperimentReport spurious_experiment(std::size_t n, const std::vector<std::size_t>& d_list, std::size_t reps,
                                     std::size_t subset_size, Seed seed,
                                     SubsetSearch method = SubsetSearch::greedy);

// ---- residual variance ----------------------------------------------------

enum class VarianceMethod { naive, rcv };

struct VarianceEstimate {
  double sigma2_hat = 0.0;
  VarianceMethod method = VarianceMethod::naive;
  std::size_t support_size = 0;  // for rcv, the larger of the two selected sets
};

// y'(I - P_S)y / (n - |S|), P_S the projection onto the selected columns.
VarianceEstimate residual_variance(const Dataset& data, const IndexSet& support);

using Selector = std::function<IndexSet(const Dataset&)>;

// Greedy forward selection of the `size` columns most correlated with y.
Selector greedy_correlation_selector(std::size_t size);

// Refitted cross-validation: select on one random half, estimate on the
// other by OLS refit, swap, average. Requires n >= 20.
VarianceEstimate rcv_variance(const Dataset& data, const Selector& selector, Seed seed);

// ---- endogeneity ----------------------------------------------------------

enum class TailStatistic {
  ks,      // two-sample KS distance of signed correlations
  ks_abs,   // KS distance of absolute correlations
  ks_tail,  // one-sided KS: raw |corr| stochastically larger than the null
};

std::string_view to_string(TailStatistic statistic);

struct EndogeneityReport {
  std::vector<double> raw_correlations;       // corr(X_j, residual), all j
  std::vector<double> permuted_correlations;  // pooled over permutations
  double tail_statistic = 0.0;                // raw vs pooled null
  std::vector<double> null_tail_statistics;   // each permutation vs the pooled rest
  double threshold = 0.0;                     // 95% quantile of null_tail_statistics
  double p_value = 1.0;
  std::size_t permutations = 0;
  TailStatistic statistic = TailStatistic::ks;

  bool flagged() const { return tail_statistic > threshold; }
};

// Compares corr(X_j, residual) with a permutation null in which the rows of
// X are shuffled against the fixed residual vector.
EndogeneityReport endogeneity_diagnostic(const Dataset& data, const FitResult& fit, std::size_t permutations,
                                         Seed seed, TailStatistic statistic = TailStatistic::ks);

struct OveridEntry {
  std::size_t index = 0;
  double corr_x = 0.0;   // corr(X_j, residual)
  double corr_x2 = 0.0;  // corr(X_j^2, residual)
};

struct OveridReport {
  std::vector<OveridEntry> entries;
};

// Sample moments behind E[eps X_j] = 0 and E[eps X_j^2] = 0 on a selected set.
OveridReport overid_check(const Dataset& data, const FitResult& fit, const IndexSet& selected);

}  // namespace sparselab
