#include "sparselab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include "sparselab/dimred.hpp"
#include "sparselab/error.hpp"
#include "sparselab/parallel.hpp"
#include "sparselab/penalties.hpp"
#include "sparselab/solvers.hpp"
#include "sparselab/stats.hpp"

namespace sparselab {

namespace {

using Eigen::Index;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += format_number(v);
    else
      out += std::to_string(v);
  }
  return out;
}

std::string sparse_text(const Vector& v) {
  std::string out;
  for (Index j = 0; j < v.size(); ++j) {
    if (v(j) == 0.0) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(j) + ":" + format_number(v(j));
  }
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string mode_text(EndogeneityMode m) { return m == EndogeneityMode::direct ? "direct" : "quadratic"; }


// ---- config reading ----

class ConfigReader {
 public:
  explicit ConfigReader(const Config& config) : config_(config) {}

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    const auto it = config_.find(key);
    return it == config_.end() ? nullptr : &it->second;
  }

  void size(const std::string& key, std::size_t& out) {
    if (const auto* v = raw(key)) out = parse_size(key, *v);
  }
  void real(const std::string& key, double& out) {
    if (const auto* v = raw(key)) out = parse_real(key, *v);
  }
  void flag(const std::string& key, bool& out) {
    if (const auto* v = raw(key)) {
      if (*v == "true" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "0")
        out = false;
      else
        throw ConfigurationError("config key " + key + ": expected true or false, got '" + *v + "'");
    }
  }
  void seed(Seed& out) {
    if (const auto* v = raw("seed")) out = Seed{parse_u64("seed", *v)};
  }
  void sizes(const std::string& key, std::vector<std::size_t>& out) {
    if (const auto* v = raw(key)) {
      out.clear();
      std::stringstream s(*v);
      std::string item;
      while (std::getline(s, item, ',')) out.push_back(parse_size(key, trim(item)));
      if (out.empty()) throw ConfigurationError("config key " + key + " is an empty list");
    }
  }
  void sparse(const std::string& key, Vector& out) {
    if (const auto* v = raw(key)) {
      out.setZero();
      std::stringstream s(*v);
      std::string item;
      while (std::getline(s, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigurationError("config key " + key + ": expected index:value");
        const std::size_t j = parse_size(key, item.substr(0, colon));
        if (j >= static_cast<std::size_t>(out.size())) throw ConfigurationError("config key " + key + ": index out of range");
        out(static_cast<Index>(j)) = parse_real(key, item.substr(colon + 1));
      }
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : config_)
      if (!used_.count(key)) throw ConfigurationError("unknown config key '" + key + "'");
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

 private:
  static std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw ConfigurationError("config key " + key + ": expected a nonnegative integer, got '" + text + "'");
    return v;
  }
  static std::size_t parse_size(const std::string& key, const std::string& text) {
    return static_cast<std::size_t>(parse_u64(key, text));
  }
  static double parse_real(const std::string& key, const std::string& text) {
    double v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
      throw ConfigurationError("config key " + key + ": expected a number, got '" + text + "'");
    return v;
  }

  const Config& config_;
  std::set<std::string> used_{"experiment"};
};

// Two-sample t statistics per column, first n1 rows against the rest.
Vector t_statistics(const Matrix& x, std::size_t n1) {
  const Index a = static_cast<Index>(n1);
  const Index b = x.rows() - a;
  Vector t(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const Vector c1 = x.col(j).head(a);
    const Vector c2 = x.col(j).tail(b);
    const double m1 = c1.mean(), m2 = c2.mean();
    const double v1 = (c1.array() - m1).square().sum() / static_cast<double>(a - 1);
    const double v2 = (c2.array() - m2).square().sum() / static_cast<double>(b - 1);
    const double se = std::sqrt(v1 / static_cast<double>(a) + v2 / static_cast<double>(b));
    t(j) = se > 0 ? (m1 - m2) / se : 0.0;
  }
  return t;
}

}  // namespace

// ---- noise accumulation ----------------------------------------------------

double separation_score(const Matrix& scores, std::size_t n1) {
  const Index a = static_cast<Index>(n1);
  if (a < 1 || a >= scores.rows()) throw ValidationError("separation_score: both classes need rows");
  const Eigen::RowVectorXd c1 = scores.topRows(a).colwise().mean();
  const Eigen::RowVectorXd c2 = scores.bottomRows(scores.rows() - a).colwise().mean();
  double within = 0.0;
  for (Index i = 0; i < scores.rows(); ++i) within += (scores.row(i) - (i < a ? c1 : c2)).norm();
  within /= static_cast<double>(scores.rows());
  if (!(within > 0.0)) throw UndefinedMetricError("separation_score: classes have no spread");
  return (c1 - c2).norm() / within;
}

ExperimentReport fig1_noise_accumulation(const std::vector<std::size_t>& m_list, const TwoClassGaussianSpec& spec,
                                         Seed seed, bool rank_by_t_stat) {
  const auto start = Clock::now();
  validate(spec);
  if (m_list.empty()) throw ConfigurationError("fig1: m_list is empty");
  for (auto m : m_list)
    if (m < 1 || m > spec.d)
      throw ConfigurationError("fig1: m = " + std::to_string(m) + " must lie in [1, d = " + std::to_string(spec.d) + "]");

  const Dataset data = gen_two_class(spec, seed);
  std::vector<std::size_t> order(spec.d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (rank_by_t_stat) {
    const Vector t = t_statistics(data.x(), spec.n_per_class);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(t(Index(i))) > std::abs(t(Index(j))); });
  }

  std::vector<Matrix> scores(m_list.size());
  std::vector<double> sep(m_list.size());
  parallel_for(m_list.size(), [&](std::size_t idx) {
    const std::size_t m = m_list[idx];
    const Dataset sub = data.select_columns(IndexSet(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m)));
    const Projection proj = pca(sub, std::min<std::size_t>(2, m));
    const Matrix xc = sub.x().rowwise() - sub.x().colwise().mean();
    Matrix s = Matrix::Zero(xc.rows(), 2);
    s.leftCols(proj.basis.cols()) = xc * proj.basis;
    sep[idx] = separation_score(s, spec.n_per_class);
    scores[idx] = std::move(s);
  });

  ExperimentReport report;
  report.id = "fig1";
  report.parameters = {{"m_list", join(m_list)},
                       {"n_per_class", std::to_string(spec.n_per_class)},
                       {"d", std::to_string(spec.d)},
                       {"mu1", sparse_text(spec.mu1)},
                       {"mu2", sparse_text(spec.mu2)},
                       {"rank_by_t_stat", bool_text(rank_by_t_stat)},
                       {"seed", std::to_string(seed.value)}};
  Table proj_table{"projections", {"m", "class", "pc1", "pc2"}, {}};
  Table sep_table{"separation", {"m", "separation"}, {}};
  for (std::size_t idx = 0; idx < m_list.size(); ++idx) {
    const auto m = static_cast<std::int64_t>(m_list[idx]);
    ScatterGroup g1{"class 1", {}, {}}, g2{"class 2", {}, {}};
    for (Index i = 0; i < scores[idx].rows(); ++i) {
      const bool first = i < static_cast<Index>(spec.n_per_class);
      proj_table.add_row({m, std::int64_t{first ? 1 : 2}, scores[idx](i, 0), scores[idx](i, 1)});
      auto& g = first ? g1 : g2;
      g.x.push_back(scores[idx](i, 0));
      g.y.push_back(scores[idx](i, 1));
    }
    sep_table.add_row({m, sep[idx]});
    report.summary.emplace_back("separation_m" + std::to_string(m), sep[idx]);
    report.figures.emplace_back("m" + std::to_string(m), svg_scatter("m = " + std::to_string(m), {g1, g2}));
  }
  report.tables.push_back(std::move(proj_table));
  report.tables.push_back(std::move(sep_table));
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport fig1_noise_accumulation(const Fig1Options& o) {
  return fig1_noise_accumulation(o.m_list, sparse_mean_spec(o.n_per_class, o.d, o.nonzero, o.signal), o.seed,
                                 o.rank_by_t_stat);
}

// ---- spurious correlation --------------------------------------------------

ExperimentReport fig2_spurious(Seed seed) {
  Fig2Options o;
  o.seed = seed;
  return fig2_spurious(o);
}

ExperimentReport fig2_spurious(const Fig2Options& o) {
  const auto start = Clock::now();
  if (o.bins < 1) throw ConfigurationError("fig2: bins must be >= 1");
  ExperimentReport report = spurious_experiment(o.n, o.d_list, o.reps, o.subset_size, o.seed, o.method);
  report.id = "fig2";
  report.parameters.emplace_back("bins", std::to_string(o.bins));

  const Table& reps = report.table("replicates");
  const auto d_col = reps.numeric_column("d");
  Table hist{"histogram", {"d", "statistic", "bin_lo", "bin_hi", "count"}, {}};
  for (const std::string stat : {"r_hat", "R_hat"}) {
    const auto values = reps.numeric_column(stat);
    std::vector<Sample> samples;
    for (auto d : o.d_list) {
      std::vector<std::int64_t> counts(o.bins, 0);
      Sample sample{"d = " + std::to_string(d), {}};
      for (std::size_t r = 0; r < values.size(); ++r) {
        if (d_col[r] != static_cast<double>(d)) continue;
        const auto b = std::min(o.bins - 1, static_cast<std::size_t>(values[r] * static_cast<double>(o.bins)));
        ++counts[b];
        sample.values.push_back(values[r]);
      }
      for (std::size_t b = 0; b < o.bins; ++b)
        hist.add_row({static_cast<std::int64_t>(d), stat, static_cast<double>(b) / static_cast<double>(o.bins),
                      static_cast<double>(b + 1) / static_cast<double>(o.bins), counts[b]});
      samples.push_back(std::move(sample));
    }
    report.figures.emplace_back(stat + "_hist", svg_histogram(stat, samples, o.bins));
  }
  report.tables.push_back(std::move(hist));
  report.wall_seconds = seconds_since(start);
  return report;
}

// ---- penalty curves --------------------------------------------------------

namespace {

ExperimentReport fig4_penalties(double lambda, std::size_t points, double t_max) {
  const auto start = Clock::now();
  if (points < 2) throw ConfigurationError("fig4: points must be >= 2");
  if (!(t_max > 0)) throw ConfigurationError("fig4: t_max must be > 0");
  const std::vector<std::pair<std::string, PenaltySpec>> curves = {
      {"hard", PenaltySpec::hard(lambda)},       {"soft", PenaltySpec::soft(lambda)},
      {"scad_2.1", PenaltySpec::scad(lambda, 2.1)}, {"scad_3.7", PenaltySpec::scad(lambda, 3.7)},
      {"scad_100", PenaltySpec::scad(lambda, 100)}, {"mcp_1", PenaltySpec::mcp(lambda, 1)},
      {"mcp_3", PenaltySpec::mcp(lambda, 3)},       {"mcp_100", PenaltySpec::mcp(lambda, 100)}};
  ExperimentReport report;
  report.id = "fig4";
  report.parameters = {{"lambda", format_number(lambda)}, {"points", std::to_string(points)}, {"t_max", format_number(t_max)}};
  Table table{"curves", {"t"}, {}};
  for (const auto& c : curves) table.columns.push_back(c.first);
  std::vector<Series> series;
  for (const auto& c : curves) series.push_back({c.first, {}, {}});
  for (std::size_t i = 0; i < points; ++i) {
    const double t = -t_max + 2.0 * t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    std::vector<Cell> row{t};
    for (std::size_t c = 0; c < curves.size(); ++c) {
      const double v = penalty_value(curves[c].second, t);
      row.emplace_back(v);
      series[c].x.push_back(t);
      series[c].y.push_back(v);
    }
    table.add_row(std::move(row));
  }
  report.tables.push_back(std::move(table));
  report.figures.emplace_back("curves", svg_line_chart("penalties, lambda = " + format_number(lambda), series, "t", "P(t)"));
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace

ExperimentReport fig4_penalties() { return fig4_penalties(1.0, 601, 3.0); }

// ---- random projection vs PCA ---------------------------------------------

Dataset gen_spiked_surrogate(const SurrogateSpec& spec, Seed seed) {
  if (spec.n < 2 || spec.d < 1) throw ConfigurationError("surrogate: need n >= 2 and d >= 1");
  if (spec.spike_sd_factor < 0) throw ConfigurationError("surrogate: spike_sd_factor must be >= 0");
  Rng rng = make_rng(seed);
  Matrix x(static_cast<Index>(spec.n), static_cast<Index>(spec.d));
  fill_standard_normal(x, rng);
  if (spec.spikes > 0) {
    Matrix dirs(static_cast<Index>(spec.d), static_cast<Index>(spec.spikes));
    fill_standard_normal(dirs, rng);
    for (Index c = 0; c < dirs.cols(); ++c) dirs.col(c).normalize();
    Matrix scores(static_cast<Index>(spec.n), static_cast<Index>(spec.spikes));
    fill_standard_normal(scores, rng);
    scores *= spec.spike_sd_factor * std::sqrt(static_cast<double>(spec.d));
    x.noalias() += scores * dirs.transpose();
  }
  return Dataset(std::move(x));
}

ExperimentReport fig11_rp_vs_pca(const std::vector<std::size_t>& d_list, const std::vector<std::size_t>& k_grid,
                                 Seed seed) {
  Fig11Options o;
  o.d_list = d_list;
  o.k_grid = k_grid;
  o.seed = seed;
  return fig11_rp_vs_pca(o);
}

ExperimentReport fig11_rp_vs_pca(const Fig11Options& o) {
  const auto start = Clock::now();
  if (o.d_list.empty() || o.k_grid.empty()) throw ConfigurationError("fig11: d_list and k_grid must be nonempty");
  ExperimentReport report;
  report.id = "fig11";
  report.parameters = {{"d_list", join(o.d_list)},
                       {"k_grid", join(o.k_grid)},
                       {"n", std::to_string(o.n)},
                       {"spikes", std::to_string(o.spikes)},
                       {"spike_sd_factor", format_number(o.spike_sd_factor)},
                       {"seed", std::to_string(o.seed.value)}};
  Table table{"distortion", {"d", "k", "method", "median_relative_error"}, {}};
  for (auto d : o.d_list) {
    const Dataset data = gen_spiked_surrogate({o.n, d, o.spikes, o.spike_sd_factor}, derive_seed(o.seed, d));
    const auto original = pairwise_distances(data.x());
    std::vector<std::size_t> ks;
    for (auto k : o.k_grid)
      if (k >= 1 && k <= std::min(o.n, d)) ks.push_back(k);
    if (ks.empty()) continue;
    const std::size_t kmax = *std::max_element(ks.begin(), ks.end());
    const Projection full = pca(data, kmax);
    std::vector<double> pca_err(ks.size()), rp_err(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
      const std::size_t k = ks[i];
      Projection p = full;
      p.basis = full.basis.leftCols(static_cast<Index>(k));
      p.eigenvalues = full.eigenvalues.head(static_cast<Index>(k));
      p.k = k;
      pca_err[i] = distortion(original, project(data, p), p).median_relative_error;
      const Projection r = random_projection(d, k, derive_seed(o.seed, d, k));
      rp_err[i] = distortion(original, project(data, r), r).median_relative_error;
    });
    Series sp{"PCA", {}, {}}, sr{"RP", {}, {}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto k = static_cast<std::int64_t>(ks[i]);
      table.add_row({static_cast<std::int64_t>(d), k, std::string("pca"), pca_err[i]});
      table.add_row({static_cast<std::int64_t>(d), k, std::string("rp"), rp_err[i]});
      report.summary.emplace_back("pca_d" + std::to_string(d) + "_k" + std::to_string(k), pca_err[i]);
      report.summary.emplace_back("rp_d" + std::to_string(d) + "_k" + std::to_string(k), rp_err[i]);
      sp.x.push_back(static_cast<double>(k));
      sp.y.push_back(pca_err[i]);
      sr.x.push_back(static_cast<double>(k));
      sr.y.push_back(rp_err[i]);
    }
    report.figures.emplace_back("d" + std::to_string(d),
                                svg_line_chart("d = " + std::to_string(d), {sp, sr}, "k", "median relative error"));
  }
  report.tables.push_back(std::move(table));
  report.wall_seconds = seconds_since(start);
  return report;
}

// ---- endogeneity demo ------------------------------------------------------

namespace {

LinearModelSpec endo_model(const EndoOptions& o) {
  if (o.signal_count + o.endogenous_count > o.d)
    throw ConfigurationError("endo: signal_count + endogenous_count exceeds d");
  LinearModelSpec spec;
  spec.n = o.n;
  spec.d = o.d;
  spec.noise_sd = o.noise_sd;
  spec.mode = o.mode;
  for (std::size_t j = 0; j < o.signal_count; ++j) spec.beta[j] = (j % 2 == 0 ? 1.0 : -1.0) * o.signal;
  for (std::size_t i = 0; i < o.endogenous_count; ++i)
    if (o.endogenous_weight != 0.0)
      spec.endogenous[o.signal_count + i] = (i % 2 == 0 ? 1.0 : -1.0) * o.endogenous_weight;
  return spec;
}

}  // namespace

CvLassoFit cv_lasso(const Dataset& data, std::size_t folds, std::size_t lambda_count, Seed seed) {
  if (folds < 2) throw ConfigurationError("cv_lasso: folds must be >= 2");
  if (lambda_count < 1) throw ConfigurationError("cv_lasso: lambda_count must be >= 1");
  const auto grid = lambda_grid(lambda_max(data), lambda_count);
  CvLassoFit out;
  out.cv = cross_validate(data, lasso_path_solver(), grid, folds, seed);
  out.fit = coord_descent_l1(data, out.cv.lambda_star);
  return out;
}

EndoOutcome run_endogeneity(const EndoOptions& o) {
  const LinearModelSpec spec = endo_model(o);
  validate(spec);
  if (spec.noise_sd <= 0.0 && spec.endogenous.empty())
    throw PreconditionError("endo: noise_sd is 0 and nothing is endogenous; residual correlations are undefined");
  const Dataset data = standardize(gen_linear(spec, derive_seed(o.seed, 0)), true);
  const auto [fit, cv] = cv_lasso(data, o.folds, o.lambda_count, derive_seed(o.seed, 1));

  EndoOutcome out;
  out.lambda_star = cv.lambda_star;
  out.selected = fit.active_set;
  const bool refittable = out.selected.size() < data.n();
  if (o.refit_residuals && !refittable)
    throw SelectionTooLargeError("endo: Lasso selected " + std::to_string(out.selected.size()) + " of n = " +
                                 std::to_string(data.n()) + " rows; OLS refit impossible");
  const FitResult refit = refittable ? ols_refit(data, out.selected) : fit;
  out.endogeneity = endogeneity_diagnostic(data, o.refit_residuals ? refit : fit, o.permutations,
                                           derive_seed(o.seed, 2), o.statistic);
  if (!out.selected.empty() && refittable) out.overid = overid_check(data, refit, out.selected);
  return out;
}

ExperimentReport endogeneity_demo(Seed seed) {
  EndoOptions o;
  o.seed = seed;
  return endogeneity_demo(o);
}

ExperimentReport endogeneity_demo(const EndoOptions& o) {
  const auto start = Clock::now();
  const EndoOutcome out = run_endogeneity(o);
  const LinearModelSpec spec = endo_model(o);
  ExperimentReport report;
  report.id = "endo";
  report.parameters = {{"n", std::to_string(o.n)},
                       {"d", std::to_string(o.d)},
                       {"noise_sd", format_number(o.noise_sd)},
                       {"signal_count", std::to_string(o.signal_count)},
                       {"signal", format_number(o.signal)},
                       {"endogenous_count", std::to_string(o.endogenous_count)},
                       {"endogenous_weight", format_number(o.endogenous_weight)},
                       {"mode", mode_text(o.mode)},
                       {"folds", std::to_string(o.folds)},
                       {"lambda_count", std::to_string(o.lambda_count)},
                       {"permutations", std::to_string(o.permutations)},
                       {"statistic", std::string(to_string(o.statistic))},
                       {"refit_residuals", bool_text(o.refit_residuals)},
                       {"seed", std::to_string(o.seed.value)}};
  const auto& e = out.endogeneity;
  Table corr{"correlations", {"variable", "raw_corr", "endogenous"}, {}};
  for (std::size_t j = 0; j < e.raw_correlations.size(); ++j)
    corr.add_row({static_cast<std::int64_t>(j), e.raw_correlations[j], std::int64_t{spec.endogenous.count(j) ? 1 : 0}});
  Table null{"null", {"permuted_corr"}, {}};
  for (double v : e.permuted_correlations) null.add_row({v});
  Table null_stats{"null_statistics", {"permutation", "statistic"}, {}};
  for (std::size_t b = 0; b < e.null_tail_statistics.size(); ++b)
    null_stats.add_row({static_cast<std::int64_t>(b), e.null_tail_statistics[b]});
  Table overid{"overid", {"variable", "corr_x", "corr_x2"}, {}};
  double max_x2 = 0.0;
  for (const auto& entry : out.overid.entries) {
    overid.add_row({static_cast<std::int64_t>(entry.index), entry.corr_x, entry.corr_x2});
    max_x2 = std::max(max_x2, std::abs(entry.corr_x2));
  }
  report.tables = {std::move(corr), std::move(null), std::move(null_stats), std::move(overid)};
  report.summary = {{"tail_statistic", e.tail_statistic},
                    {"threshold", e.threshold},
                    {"p_value", e.p_value},
                    {"flagged", e.flagged() ? 1.0 : 0.0},
                    {"selected_count", static_cast<double>(out.selected.size())},
                    {"lambda_star", out.lambda_star},
                    {"max_abs_corr_x2", max_x2}};
  report.figures.emplace_back("correlations", svg_histogram("corr(X_j, residual)",
                                                            {{"raw", e.raw_correlations}, {"permuted", e.permuted_correlations}}));
  report.wall_seconds = seconds_since(start);
  return report;
}

// ---- invariants ------------------------------------------------------------

std::vector<std::string> check_invariants(const ExperimentReport& report) {
  std::vector<std::string> failures;
  auto in_range = [&](const Table& t, const std::string& col, double lo, double hi) {
    for (double v : t.numeric_column(col))
      if (!(v >= lo && v <= hi)) {
        failures.push_back(report.id + ": " + t.name + "." + col + " value " + format_number(v) + " outside [" +
                           format_number(lo) + ", " + format_number(hi) + "]");
        return;
      }
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (report.id == "fig1") {
    in_range(report.table("separation"), "separation", 0.0, inf);
  } else if (report.id == "fig2" || report.id == "spurious") {
    const Table& t = report.table("replicates");
    in_range(t, "r_hat", 0.0, 1.0);
    in_range(t, "R_hat", 0.0, 1.0);
    if (report.parameter("subset_size") == "1" || report.parameter("method") == "exact") {
      const auto r = t.numeric_column("r_hat");
      const auto big = t.numeric_column("R_hat");
      for (std::size_t i = 0; i < r.size(); ++i)
        if (big[i] < r[i] - 1e-12) {
          failures.push_back(report.id + ": R_hat < r_hat on replicate row " + std::to_string(i));
          break;
        }
    }
  } else if (report.id == "fig4") {
    const Table& t = report.table("curves");
    const auto ts = t.numeric_column("t");
    const auto hard = t.numeric_column("hard");
    const auto mcp1 = t.numeric_column("mcp_1");
    const auto soft = t.numeric_column("soft");
    const double lambda = std::stod(report.parameter("lambda"));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (std::abs(hard[i] - mcp1[i]) > 1e-12) {
        failures.push_back("fig4: MCP(gamma = 1) differs from hard at t = " + format_number(ts[i]));
        break;
      }
      if (std::abs(soft[i] - lambda * std::abs(ts[i])) > 1e-12) {
        failures.push_back("fig4: soft curve differs from lambda |t| at t = " + format_number(ts[i]));
        break;
      }
    }
  } else if (report.id == "fig11") {
    in_range(report.table("distortion"), "median_relative_error", 0.0, inf);
  } else if (report.id == "endo") {
    in_range(report.table("correlations"), "raw_corr", -1.0, 1.0);
    in_range(report.table("null"), "permuted_corr", -1.0, 1.0);
    in_range(report.table("overid"), "corr_x", -1.0, 1.0);
    in_range(report.table("overid"), "corr_x2", -1.0, 1.0);
  }
  return failures;
}

// ---- configuration ---------------------------------------------------------

Config read_config(std::istream& in) {
  Config config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = ConfigReader::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = ConfigReader::trim(line.substr(0, eq));
    const std::string value = ConfigReader::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigurationError("config line " + std::to_string(number) + ": empty key");
    if (!config.emplace(key, value).second)
      throw ConfigurationError("config line " + std::to_string(number) + ": duplicate key " + key);
  }
  return config;
}

Config read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  return read_config(in);
}

ExperimentReport run_experiment(const Config& config) {
  const auto it = config.find("experiment");
  if (it == config.end()) throw ConfigurationError("config has no 'experiment' key");
  const std::string& name = it->second;
  ConfigReader r(config);

  if (name == "fig1") {
    Fig1Options o;
    r.sizes("m_list", o.m_list);
    r.size("n_per_class", o.n_per_class);
    r.size("d", o.d);
    r.size("nonzero", o.nonzero);
    r.real("signal", o.signal);
    r.flag("rank_by_t_stat", o.rank_by_t_stat);
    r.seed(o.seed);
    TwoClassGaussianSpec spec = sparse_mean_spec(o.n_per_class, o.d, std::min(o.nonzero, o.d), o.signal);
    r.sparse("mu1", spec.mu1);
    r.sparse("mu2", spec.mu2);
    r.reject_unknown();
    return fig1_noise_accumulation(o.m_list, spec, o.seed, o.rank_by_t_stat);
  }
  if (name == "fig2" || name == "spurious") {
    Fig2Options o;
    r.size("n", o.n);
    r.sizes("d_list", o.d_list);
    r.size("reps", o.reps);
    r.size("subset_size", o.subset_size);
    r.size("bins", o.bins);
    if (const auto* m = r.raw("method")) {
      if (*m == "greedy")
        o.method = SubsetSearch::greedy;
      else if (*m == "exact")
        o.method = SubsetSearch::exact;
      else
        throw ConfigurationError("config key method: expected greedy or exact");
    }
    r.seed(o.seed);
    r.reject_unknown();
    if (name == "spurious") {
      ExperimentReport rep = spurious_experiment(o.n, o.d_list, o.reps, o.subset_size, o.seed, o.method);
      return rep;
    }
    return fig2_spurious(o);
  }
  if (name == "fig4") {
    double lambda = 1.0, t_max = 3.0;
    std::size_t points = 601;
    r.real("lambda", lambda);
    r.size("points", points);
    r.real("t_max", t_max);
    r.reject_unknown();
    return fig4_penalties(lambda, points, t_max);
  }
  if (name == "fig11") {
    Fig11Options o;
    r.sizes("d_list", o.d_list);
    r.sizes("k_grid", o.k_grid);
    r.size("n", o.n);
    r.size("spikes", o.spikes);
    r.real("spike_sd_factor", o.spike_sd_factor);
    r.seed(o.seed);
    r.reject_unknown();
    return fig11_rp_vs_pca(o);
  }
  if (name == "endo") {
    EndoOptions o;
    r.size("n", o.n);
    r.size("d", o.d);
    r.real("noise_sd", o.noise_sd);
    r.size("signal_count", o.signal_count);
    r.real("signal", o.signal);
    r.size("endogenous_count", o.endogenous_count);
    r.real("endogenous_weight", o.endogenous_weight);
    if (const auto* m = r.raw("mode")) {
      if (*m == "direct")
        o.mode = EndogeneityMode::direct;
      else if (*m == "quadratic")
        o.mode = EndogeneityMode::quadratic;
      else
        throw ConfigurationError("config key mode: expected direct or quadratic");
    }
    r.size("folds", o.folds);
    r.size("lambda_count", o.lambda_count);
    r.size("permutations", o.permutations);
    r.flag("refit_residuals", o.refit_residuals);
    if (const auto* s = r.raw("statistic")) {
      if (*s == "ks")
        o.statistic = TailStatistic::ks;
      else if (*s == "ks_abs")
        o.statistic = TailStatistic::ks_abs;
      else if (*s == "ks_tail")
        o.statistic = TailStatistic::ks_tail;
      else
        throw ConfigurationError("config key statistic: expected ks, ks_abs or ks_tail");
    }
    r.seed(o.seed);
    r.reject_unknown();
    return endogeneity_demo(o);
  }
  throw ConfigurationError("unknown experiment '" + name + "' (expected fig1, fig2, fig4, fig11 or endo)");
}

}  // namespace sparselab
