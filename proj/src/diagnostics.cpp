#include "sparselab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparselab/error.hpp"
#include "sparselab/generators.hpp"
#include "sparselab/parallel.hpp"
#include "sparselab/stats.hpp"

namespace sparselab {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Centered, unit-norm copy of each column; throws on a constant column.
Matrix normalized_columns(const Matrix& x, const Dataset* source) {
  Matrix z = x.rowwise() - x.colwise().mean();
  for (Index j = 0; j < z.cols(); ++j) {
    const double norm = z.col(j).norm();
    if (!(norm > 0.0))
      throw UndefinedCorrelationError(
          "column " + (source ? source->column_name(static_cast<std::size_t>(j)) : std::to_string(j + 1)) +
          " is constant; correlation undefined");
    z.col(j) /= norm;
  }
  return z;
}

Vector normalized(const Vector& v, const char* what) {
  Vector c = v.array() - v.mean();
  const double norm = c.norm();
  if (!(norm > 0.0)) throw UndefinedCorrelationError(std::string(what) + " is constant; correlation undefined");
  return c / norm;
}

// |corr(target, least-squares fit of target on columns S with intercept)|
double multiple_corr(const Vector& target, const Matrix& x, const IndexSet& subset) {
  Matrix xs(x.rows(), idx(subset.size()) + 1);
  xs.col(0).setOnes();
  for (std::size_t k = 0; k < subset.size(); ++k) xs.col(idx(k) + 1) = x.col(idx(subset[k]));
  const Vector coef = xs.colPivHouseholderQr().solve(target);
  const Vector fitted = xs * coef;
  const Vector centered = fitted.array() - fitted.mean();
  if (centered.norm() == 0.0) return 0.0;
  return std::abs(sample_corr(target, fitted));
}

std::vector<std::size_t> random_permutation(std::size_t n, Seed seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng() % i)]);
  return perm;
}

double tail_distance(std::vector<double> a, std::vector<double> b, TailStatistic statistic) {
  if (statistic == TailStatistic::ks) return ks_distance(std::move(a), std::move(b));
  for (double& v : a) v = std::abs(v);
  for (double& v : b) v = std::abs(v);
  if (statistic == TailStatistic::ks_abs) return ks_distance(std::move(a), std::move(b));
  return ks_upper_distance(std::move(a), std::move(b));
}

}  // namespace

std::string_view to_string(TailStatistic statistic) {
  switch (statistic) {
    case TailStatistic::ks: return "ks";
    case TailStatistic::ks_abs: return "ks_abs";
    case TailStatistic::ks_tail: return "ks_tail";
  }
  return "ks";
}

std::string_view to_string(SubsetSearch method) { return method == SubsetSearch::exact ? "exact" : "greedy"; }

namespace {

// Largest |corr(X_1, X_j)| over j >= 1 (0-based) and its argmax; ties keep
// the lower index.
std::pair<double, std::size_t> best_single_corr(const Dataset& data) {
  if (data.d() < 2) throw ValidationError("max_spurious_corr: need d >= 2");
  const Vector x1 = data.x().col(0);
  double best = -1.0;
  std::size_t arg = 1;
  for (Index j = 1; j < data.x().cols(); ++j) {
    const Vector xj = data.x().col(j);
    double c = 0.0;
    try {
      c = std::abs(sample_corr(x1, xj));
    } catch (const UndefinedCorrelationError&) {
      throw UndefinedCorrelationError("max_spurious_corr: column " + data.column_name(0) + " or " +
                                      data.column_name(static_cast<std::size_t>(j)) + " is constant");
    }
    if (c > best) {
      best = c;
      arg = static_cast<std::size_t>(j);
    }
  }
  return {best, arg};
}

}  // namespace

double max_spurious_corr(const Dataset& data) { return best_single_corr(data).first; }

IndexSet greedy_forward_selection(const Vector& target, const Matrix& x, std::size_t size) {
  if (size > static_cast<std::size_t>(x.cols()))
    throw ConfigurationError("greedy selection: size exceeds the number of candidates");
  Vector r = target.array() - target.mean();
  Matrix q = x.rowwise() - x.colwise().mean();
  Vector original_norm(q.cols());
  for (Index j = 0; j < q.cols(); ++j) original_norm(j) = q.col(j).squaredNorm();
  std::vector<bool> taken(static_cast<std::size_t>(q.cols()), false);
  IndexSet chosen;
  for (std::size_t step = 0; step < size; ++step) {
    Index best = -1;
    double best_score = -1.0;
    for (Index j = 0; j < q.cols(); ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      const double norm = q.col(j).squaredNorm();
      if (!(norm > 1e-12 * original_norm(j))) continue;
      const double proj = q.col(j).dot(r);
      const double score = proj * proj / norm;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) throw SingularityError("greedy selection: remaining candidates are collinear with the chosen set");
    taken[static_cast<std::size_t>(best)] = true;
    chosen.push_back(static_cast<std::size_t>(best));
    const Vector u = q.col(best).normalized();
    r -= u.dot(r) * u;
    const Eigen::RowVectorXd coef = u.transpose() * q;
    q.noalias() -= u * coef;
  }
  return chosen;
}

SpuriousCorrelationReport max_multiple_corr(const Dataset& data, std::size_t subset_size, SubsetSearch method) {
  if (data.d() < 2) throw ValidationError("max_multiple_corr: need d >= 2");
  if (subset_size < 1 || subset_size > data.d() - 1)
    throw ConfigurationError("max_multiple_corr: subset_size must lie in [1, d - 1]");
  const Vector target = data.x().col(0);
  const Matrix others = data.x().rightCols(data.x().cols() - 1);

  SpuriousCorrelationReport report;
  report.method = method;
  const auto [r_hat, r_arg] = best_single_corr(data);
  report.r_hat = r_hat;
  if (subset_size == 1) {
    // the fitted value is affine in X_j, so the multiple correlation is |corr|
    report.R_hat = r_hat;
    report.subset = {r_arg};
    return report;
  }

  IndexSet subset;
  if (method == SubsetSearch::greedy) {
    subset = greedy_forward_selection(target, others, subset_size);
  } else {
    const std::size_t m = data.d() - 1;
    double count = 1.0;
    for (std::size_t k = 0; k < subset_size; ++k)
      count = count * static_cast<double>(m - k) / static_cast<double>(k + 1);
    if (count > kMaxExactSubsets)
      throw SizeLimitError("max_multiple_corr: exact search would enumerate " + std::to_string(count) +
                           " subsets (cap " + std::to_string(kMaxExactSubsets) + "); use greedy");
    const Vector z0 = normalized(target, "first column");
    const Matrix z = normalized_columns(others, nullptr);
    const Vector c = z.transpose() * z0;
    const Matrix corr = z.transpose() * z;

    std::vector<std::size_t> comb(subset_size);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    double best = -1.0;
    Matrix g(idx(subset_size), idx(subset_size));
    Vector cs(idx(subset_size));
    for (;;) {
      for (std::size_t a = 0; a < subset_size; ++a) {
        cs(idx(a)) = c(idx(comb[a]));
        for (std::size_t b = 0; b < subset_size; ++b) g(idx(a), idx(b)) = corr(idx(comb[a]), idx(comb[b]));
      }
      Eigen::LDLT<Matrix> ldlt(g);
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 1e-12).all()) {
        const double r2 = cs.dot(ldlt.solve(cs));
        if (r2 > best) {
          best = r2;
          subset = comb;
        }
      }
      // next combination in lexicographic order
      std::size_t i = subset_size;
      while (i > 0 && comb[i - 1] == m - subset_size + (i - 1)) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t k = i; k < subset_size; ++k) comb[k] = comb[k - 1] + 1;
    }
    if (subset.empty()) throw SingularityError("max_multiple_corr: every subset is collinear");
  }
  report.R_hat = multiple_corr(target, others, subset);
  for (auto& j : subset) ++j;  // back to column indices of `data`
  report.subset = std::move(subset);
  return report;
}

SpuriousSamples spurious_replicates(std::size_t n, const std::vector<std::size_t>& d_list, std::size_t reps,
                                    std::size_t subset_size, Seed seed, SubsetSearch method) {
  if (reps < 1) throw ConfigurationError("spurious experiment: reps must be >= 1");
  SpuriousSamples out;
  out.d_list = d_list;
  out.r_hat.assign(d_list.size(), std::vector<double>(reps));
  out.R_hat.assign(d_list.size(), std::vector<double>(reps));
  for (std::size_t k = 0; k < d_list.size(); ++k) {
    const std::size_t d = d_list[k];
    parallel_for(reps, [&](std::size_t rep) {
      const Dataset data = gen_iid_gaussian(n, d, derive_seed(seed, d, rep));
      const auto report = max_multiple_corr(data, subset_size, method);
      out.r_hat[k][rep] = report.r_hat;
      out.R_hat[k][rep] = report.R_hat;
    });
  }
  return out;
}

ExperimentReport spurious_experiment(std::size_t n, const std::vector<std::size_t>& d_list, std::size_t reps,
                                     std::size_t subset_size, Seed seed, SubsetSearch method) {
  const SpuriousSamples samples = spurious_replicates(n, d_list, reps, subset_size, seed, method);
  ExperimentReport report;
  report.id = "spurious";
  report.parameters = {{"n", std::to_string(n)},
                       {"reps", std::to_string(reps)},
                       {"subset_size", std::to_string(subset_size)},
                       {"seed", std::to_string(seed.value)},
                       {"method", std::string(to_string(method))}};
  std::string ds;
  for (auto d : d_list) ds += (ds.empty() ? "" : ",") + std::to_string(d);
  report.parameters.emplace_back("d_list", ds);

  Table reps_table{"replicates", {"d", "rep", "r_hat", "R_hat"}, {}};
  Table quant{"quantiles", {"d", "statistic", "q05", "q25", "q50", "q75", "q95"}, {}};
  for (std::size_t k = 0; k < d_list.size(); ++k) {
    const auto d = static_cast<std::int64_t>(d_list[k]);
    for (std::size_t rep = 0; rep < reps; ++rep)
      reps_table.add_row({d, static_cast<std::int64_t>(rep), samples.r_hat[k][rep], samples.R_hat[k][rep]});
    for (const auto& [name, values] :
         {std::pair{std::string("r_hat"), samples.r_hat[k]}, std::pair{std::string("R_hat"), samples.R_hat[k]}}) {
      std::vector<Cell> row{d, name};
      for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) row.emplace_back(quantile(values, p));
      quant.add_row(std::move(row));
      report.summary.emplace_back("median_" + name + "_d" + std::to_string(d), median(values));
    }
  }
  report.tables.push_back(std::move(reps_table));
  report.tables.push_back(std::move(quant));
  return report;
}

VarianceEstimate residual_variance(const Dataset& data, const IndexSet& support) {
  if (support.size() >= data.n())
    throw SingularityError("residual_variance: |support| must be < n");
  const FitResult fit = ols_refit(data, support);
  VarianceEstimate est;
  est.sigma2_hat = fit.residuals.squaredNorm() / static_cast<double>(data.n() - support.size());
  est.method = VarianceMethod::naive;
  est.support_size = support.size();
  return est;
}

Selector greedy_correlation_selector(std::size_t size) {
  return [size](const Dataset& data) {
    IndexSet s = greedy_forward_selection(data.y(), data.x(), size);
    std::sort(s.begin(), s.end());
    return s;
  };
}

VarianceEstimate rcv_variance(const Dataset& data, const Selector& selector, Seed seed) {
  if (data.n() < 20) throw ValidationError("rcv_variance: need n >= 20");
  if (!data.has_y()) throw ValidationError("rcv_variance: dataset has no response");
  const auto perm = random_permutation(data.n(), seed);
  const std::size_t half = data.n() / 2;
  std::vector<std::size_t> first(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<std::size_t> second(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  const Dataset a = data.select_rows(first);
  const Dataset b = data.select_rows(second);

  const IndexSet sa = selector(a);
  const IndexSet sb = selector(b);
  if (sa.size() >= b.n() || sb.size() >= a.n())
    throw SelectionTooLargeError("rcv_variance: selected " + std::to_string(std::max(sa.size(), sb.size())) +
                                 " variables, half-sample holds only " + std::to_string(std::min(a.n(), b.n())) +
                                 " rows");
  const double va = residual_variance(b, sa).sigma2_hat;
  const double vb = residual_variance(a, sb).sigma2_hat;
  VarianceEstimate est;
  est.sigma2_hat = 0.5 * (va + vb);
  est.method = VarianceMethod::rcv;
  est.support_size = std::max(sa.size(), sb.size());
  return est;
}

EndogeneityReport endogeneity_diagnostic(const Dataset& data, const FitResult& fit, std::size_t permutations,
                                         Seed seed, TailStatistic statistic) {
  if (permutations < 1) throw ConfigurationError("endogeneity_diagnostic: permutations must be >= 1");
  if (fit.residuals.size() != idx(data.n()))
    throw ValidationError("endogeneity_diagnostic: residuals do not match the dataset");
  const Vector e = normalized(fit.residuals, "residual vector");
  const Matrix z = normalized_columns(data.x(), &data);
  const Index d = z.cols();

  EndogeneityReport report;
  report.permutations = permutations;
  report.statistic = statistic;
  const Vector raw = (z.transpose() * e).cwiseMax(-1.0).cwiseMin(1.0);
  report.raw_correlations.assign(raw.data(), raw.data() + d);

  // Shuffling residuals is the same relabelling as shuffling rows of X.
  std::vector<std::vector<double>> per_perm(permutations);
  parallel_for(permutations, [&](std::size_t b) {
    const auto perm = random_permutation(data.n(), derive_seed(seed, b));
    Vector shuffled(e.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled(idx(i)) = e(idx(perm[i]));
    const Vector c = (z.transpose() * shuffled).cwiseMax(-1.0).cwiseMin(1.0);
    per_perm[b].assign(c.data(), c.data() + d);
  });
  for (const auto& v : per_perm)
    report.permuted_correlations.insert(report.permuted_correlations.end(), v.begin(), v.end());
  report.tail_statistic = tail_distance(report.raw_correlations, report.permuted_correlations, statistic);

  report.null_tail_statistics.resize(permutations);
  if (permutations >= 2) {
    parallel_for(permutations, [&](std::size_t b) {
      std::vector<double> rest;
      rest.reserve((permutations - 1) * static_cast<std::size_t>(d));
      for (std::size_t o = 0; o < permutations; ++o)
        if (o != b) rest.insert(rest.end(), per_perm[o].begin(), per_perm[o].end());
      report.null_tail_statistics[b] = tail_distance(per_perm[b], std::move(rest), statistic);
    });
    report.threshold = quantile(report.null_tail_statistics, 0.95);
    const auto exceed = std::count_if(report.null_tail_statistics.begin(), report.null_tail_statistics.end(),
                                      [&](double s) { return s >= report.tail_statistic; });
    report.p_value = static_cast<double>(1 + exceed) / static_cast<double>(permutations + 1);
  } else {
    report.null_tail_statistics[0] = 0.0;
    report.threshold = 0.0;
    report.p_value = 1.0;
  }
  return report;
}

OveridReport overid_check(const Dataset& data, const FitResult& fit, const IndexSet& selected) {
  if (selected.empty()) throw ValidationError("overid_check: selected set is empty");
  if (fit.residuals.size() != idx(data.n())) throw ValidationError("overid_check: residuals do not match the dataset");
  OveridReport report;
  for (auto j : selected) {
    if (j >= data.d()) throw ValidationError("overid_check: index out of range");
    const Vector xj = data.x().col(idx(j));
    const Vector xj2 = xj.array().square();
    OveridEntry entry;
    entry.index = j;
    entry.corr_x = sample_corr(xj, fit.residuals);
    entry.corr_x2 = sample_corr(xj2, fit.residuals);
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace sparselab
