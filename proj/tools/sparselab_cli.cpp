#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sparselab/dataset.hpp"
#include "sparselab/diagnostics.hpp"
#include "sparselab/dimred.hpp"
#include "sparselab/error.hpp"
#include "sparselab/harness.hpp"
#include "sparselab/penalties.hpp"
#include "sparselab/screening.hpp"
#include "sparselab/solvers.hpp"
#include "sparselab/stats.hpp"

namespace sl = sparselab;

namespace {

constexpr int kInvariantFailure = 3;

sl::Dataset load(const std::string& path, const std::string& response) {
  sl::CsvReadOptions options;
  options.response_column = response;
  return sl::read_csv_file(path, options);
}

sl::IndexSet parse_indices(const std::string& text, std::size_t d) {
  sl::IndexSet out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long v = std::stoul(item, &pos);
    if (pos != item.size()) throw sl::ConfigurationError("bad index '" + item + "'");
    if (v >= d) throw sl::ConfigurationError("index " + item + " out of range (d = " + std::to_string(d) + ")");
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    sl::write_text_file(path, text);
}

std::string coefficient_csv(const sl::Dataset& data, const sl::Vector& beta) {
  std::ostringstream s;
  s << "variable,index,beta\n";
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    s << data.column_name(static_cast<std::size_t>(j)) << ',' << j << ',' << sl::format_number(beta(j)) << '\n';
  return s.str();
}

// ---- fit ----

struct FitArgs {
  std::string data, response = "y", out, solver = "cd", penalty = "soft";
  double lambda = -1, gamma = -1, tol = 1e-9;
  std::size_t lambda_grid = 50, cv_folds = 0;
  std::uint64_t seed = 1;
  bool raw = false;
};

int run_fit(const FitArgs& a) {
  sl::Dataset data = load(a.data, a.response);
  if (!a.raw) data = sl::standardize(data);
  sl::PenaltySpec penalty = sl::parse_penalty(a.penalty, a.lambda > 0 ? a.lambda : 1.0);
  if (a.gamma > 0) penalty.gamma = a.gamma;

  double lambda = a.lambda;
  std::optional<sl::CvResult> cv;
  if (a.cv_folds > 0) {
    if (a.solver != "cd" && a.solver != "ista") throw sl::ConfigurationError("--cv-folds supports the cd and ista solvers");
    const auto grid = sl::lambda_grid(sl::lambda_max(data), a.lambda_grid);
    cv = sl::cross_validate(data, sl::lasso_path_solver(), grid, a.cv_folds, sl::Seed{a.seed});
    lambda = cv->lambda_star;
  }
  sl::FitResult fit;
  if (a.solver == "dantzig") {
    const double gamma_n = lambda > 0 ? lambda : sl::default_gamma_n(data);
    fit = sl::dantzig_selector({data, gamma_n});
    lambda = gamma_n;
  } else {
    if (!(lambda > 0)) throw sl::ConfigurationError("--lambda (or --cv-folds) is required for solver " + a.solver);
    penalty = penalty.with_lambda(lambda);
    if (a.solver == "cd") {
      if (penalty.family != sl::PenaltyFamily::soft) throw sl::ConfigurationError("solver cd fits the soft (L1) penalty only");
      fit = sl::coord_descent_l1(data, lambda, a.tol);
    } else if (a.solver == "ista") {
      fit = sl::ista(data, penalty, std::nullopt, a.tol);
    } else if (a.solver == "lla") {
      fit = sl::lla(data, penalty, sl::Vector::Zero(static_cast<Eigen::Index>(data.d())), a.tol);
    } else if (a.solver == "l0") {
      fit = sl::best_subset_l0(data, lambda);
    } else {
      throw sl::ConfigurationError("unknown solver '" + a.solver + "'");
    }
  }
  emit(a.out, coefficient_csv(data, fit.beta_hat));
  std::ostream& meta = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
  meta << "solver = " << a.solver << '\n'
       << "penalty = " << (a.solver == "dantzig" ? "dantzig" : sl::to_string(penalty)) << '\n'
       << "lambda = " << sl::format_number(lambda) << '\n'
       << "objective = " << sl::format_number(fit.objective) << '\n'
       << "iterations = " << fit.iterations << '\n'
       << "converged = " << (fit.converged ? "true" : "false") << '\n'
       << "active = " << fit.active_set.size() << '\n'
       << "standardized = " << (a.raw ? "false" : "true") << '\n';
  if (cv) meta << "cv_folds = " << a.cv_folds << "\nseed = " << a.seed << '\n';
  return fit.converged ? 0 : 1;
}

// ---- screen ----

struct ScreenArgs {
  std::string data, response = "y", out;
  double delta = -1;
  std::size_t top_k = 0;
};

int run_screen(const ScreenArgs& a) {
  const sl::Dataset data = sl::standardize(load(a.data, a.response));
  sl::ScreeningResult res;
  if (a.delta >= 0)
    res = sl::sis_select(data, sl::ThresholdRule{a.delta});
  else if (a.top_k > 0)
    res = sl::sis_select(data, sl::TopKRule{a.top_k});
  else
    res = sl::sis_select(data);
  std::vector<bool> kept(data.d(), false);
  for (auto j : res.survivors) kept[j] = true;
  std::ostringstream s;
  s << "rank,index,variable,marginal_beta,selected\n";
  for (std::size_t r = 0; r < res.ranking.size(); ++r) {
    const auto j = res.ranking[r];
    s << r + 1 << ',' << j << ',' << data.column_name(j) << ','
      << sl::format_number(res.marginal_beta(static_cast<Eigen::Index>(j))) << ',' << (kept[j] ? 1 : 0) << '\n';
  }
  emit(a.out, s.str());
  return 0;
}

// ---- diagnose ----

struct DiagnoseArgs {
  std::string what, data, response = "y", out = "results", support;
  std::size_t n = 60, reps = 200, subset_size = 4, permutations = 50, folds = 10, select_size = 0;
  std::vector<std::size_t> d_list{800, 6400};
  std::string method = "greedy", statistic = "ks_tail";
  bool refit = false;
  std::uint64_t seed = 1;
};

sl::FitResult residual_fit(const sl::Dataset& data, const DiagnoseArgs& a, sl::IndexSet& selected) {
  if (!a.support.empty()) {
    selected = parse_indices(a.support, data.d());
    return sl::ols_refit(data, selected);
  }
  auto res = sl::cv_lasso(data, a.folds, 40, sl::Seed{a.seed});
  selected = res.fit.active_set;
  return res.fit;
}

int run_diagnose(const DiagnoseArgs& a) {
  if (a.what == "spurious") {
    const auto method = a.method == "exact" ? sl::SubsetSearch::exact : sl::SubsetSearch::greedy;
    if (a.method != "exact" && a.method != "greedy") throw sl::ConfigurationError("--method must be greedy or exact");
    sl::ExperimentReport rep = sl::spurious_experiment(a.n, a.d_list, a.reps, a.subset_size, sl::Seed{a.seed}, method);
    const auto& t = rep.table("replicates");
    const auto d_col = t.numeric_column("d");
    for (const std::string stat : {"r_hat", "R_hat"}) {
      std::vector<sl::Sample> samples;
      const auto v = t.numeric_column(stat);
      for (auto d : a.d_list) {
        sl::Sample smp{"d = " + std::to_string(d), {}};
        for (std::size_t i = 0; i < v.size(); ++i)
          if (d_col[i] == static_cast<double>(d)) smp.values.push_back(v[i]);
        samples.push_back(std::move(smp));
      }
      rep.figures.emplace_back(stat + "_hist", sl::svg_histogram(stat, samples));
    }
    for (const auto& p : sl::write_report(a.out, rep)) std::cout << "wrote " << p << '\n';
    for (const auto& [k, v] : rep.summary) std::cout << k << " = " << sl::format_number(v) << '\n';
    return 0;
  }
  if (a.data.empty()) throw sl::ConfigurationError("diagnose " + a.what + " needs --data");
  if (a.what == "variance") {
    const sl::Dataset data = load(a.data, a.response);
    if (a.select_size > 0) {
      const auto est = sl::rcv_variance(data, sl::greedy_correlation_selector(a.select_size), sl::Seed{a.seed});
      std::cout << "method = rcv\nsigma2_hat = " << sl::format_number(est.sigma2_hat)
                << "\nsupport_size = " << est.support_size << '\n';
    } else {
      const auto est = sl::residual_variance(data, parse_indices(a.support, data.d()));
      std::cout << "method = naive\nsigma2_hat = " << sl::format_number(est.sigma2_hat)
                << "\nsupport_size = " << est.support_size << '\n';
    }
    return 0;
  }
  const sl::Dataset data = sl::standardize(load(a.data, a.response), true);
  sl::IndexSet selected;
  const sl::FitResult fit = residual_fit(data, a, selected);
  if (a.what == "endogeneity") {
    sl::TailStatistic stat = sl::TailStatistic::ks;
    if (a.statistic == "ks_abs")
      stat = sl::TailStatistic::ks_abs;
    else if (a.statistic == "ks_tail")
      stat = sl::TailStatistic::ks_tail;
    else if (a.statistic != "ks")
      throw sl::ConfigurationError("--statistic must be ks, ks_abs or ks_tail");
    // Lasso residuals unless --refit (a given --support is always an OLS fit)
    const sl::FitResult resid = a.refit && a.support.empty() ? sl::ols_refit(data, selected) : fit;
    const auto rep = sl::endogeneity_diagnostic(data, resid, a.permutations, sl::Seed{a.seed}, stat);
    sl::ExperimentReport out;
    out.id = "endogeneity";
    sl::Table corr{"correlations", {"variable", "raw_corr"}, {}};
    for (std::size_t j = 0; j < rep.raw_correlations.size(); ++j) corr.add_row({data.column_name(j), rep.raw_correlations[j]});
    sl::Table null{"null", {"permuted_corr"}, {}};
    for (double v : rep.permuted_correlations) null.add_row({v});
    out.tables = {std::move(corr), std::move(null)};
    out.summary = {{"tail_statistic", rep.tail_statistic}, {"threshold", rep.threshold}, {"p_value", rep.p_value},
                   {"flagged", rep.flagged() ? 1.0 : 0.0}, {"selected_count", double(selected.size())}};
    out.parameters = {{"data", a.data}, {"permutations", std::to_string(a.permutations)},
                      {"statistic", a.statistic}, {"refit", a.refit ? "true" : "false"},
                      {"seed", std::to_string(a.seed)}};
    out.figures.emplace_back("hist", sl::svg_histogram("corr(X_j, residual)", {{"raw", rep.raw_correlations},
                                                                                {"permuted", rep.permuted_correlations}}));
    for (const auto& p : sl::write_report(a.out, out)) std::cout << "wrote " << p << '\n';
    for (const auto& [k, v] : out.summary) std::cout << k << " = " << sl::format_number(v) << '\n';
    return 0;
  }
  if (a.what == "overid") {
    if (selected.empty()) throw sl::ValidationError("no variables selected; pass --support");
    const sl::FitResult refit = sl::ols_refit(data, selected);
    const auto rep = sl::overid_check(data, refit, selected);
    std::ostringstream s;
    s << "variable,index,corr_x,corr_x2\n";
    for (const auto& e : rep.entries)
      s << data.column_name(e.index) << ',' << e.index << ',' << sl::format_number(e.corr_x) << ','
        << sl::format_number(e.corr_x2) << '\n';
    std::cout << s.str();
    return 0;
  }
  throw sl::ConfigurationError("unknown diagnostic '" + a.what + "'");
}

// ---- reduce ----

struct ReduceArgs {
  std::string data, response, method = "rp", out_projected, out_report;
  std::size_t k = 0;
  std::uint64_t seed = 1;
  bool orthogonalize = false;
};

int run_reduce(const ReduceArgs& a) {
  const sl::Dataset data = load(a.data, a.response);
  sl::Projection proj;
  if (a.method == "pca")
    proj = sl::pca(data, a.k);
  else if (a.method == "rp")
    proj = sl::random_projection(data, a.k, sl::Seed{a.seed}, {a.orthogonalize});
  else
    throw sl::ConfigurationError("--method must be pca or rp");
  const sl::Matrix z = sl::project(data, proj);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < a.k; ++c) names.push_back("z" + std::to_string(c + 1));
  std::ostringstream s;
  sl::write_csv(s, sl::Dataset(z, std::nullopt, names));
  emit(a.out_projected, s.str());
  const auto rep = sl::distortion(data, proj);
  std::ostringstream r;
  r << "method,k,scale,pairs,median_relative_error\n"
    << sl::to_string(rep.method) << ',' << rep.k << ',' << sl::format_number(proj.scale) << ',' << rep.pairs << ','
    << sl::format_number(rep.median_relative_error) << '\n';
  if (a.out_report.empty())
    std::cerr << r.str();
  else
    emit(a.out_report, r.str());
  return 0;
}

// ---- reproduce ----

struct ReproduceArgs {
  std::string figure, out = "results", config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  bool paper_scale = false, rank_by_t_stat = false;
};

int run_reproduce(const ReproduceArgs& a) {
  sl::Config config;
  if (!a.config.empty()) config = sl::read_config_file(a.config);
  if (!a.figure.empty()) {
    const std::string id = a.figure == "endo" ? "endo" : "fig" + a.figure;
    if (config.count("experiment") && config["experiment"] != id)
      throw sl::ConfigurationError("--figure " + a.figure + " conflicts with config experiment " + config["experiment"]);
    config["experiment"] = id;
  }
  if (!config.count("experiment")) throw sl::ConfigurationError("pass --figure or a --config with an experiment key");
  const std::string id = config["experiment"];
  if (a.seed) {
    if (id == "fig4") throw sl::ConfigurationError("figure 4 is deterministic and takes no seed");
    config["seed"] = std::to_string(*a.seed);
  }
  if (a.paper_scale) {
    if (id != "fig2") throw sl::ConfigurationError("--paper-scale applies to figure 2 only");
    config["reps"] = std::to_string(sl::kFullScaleReps);
  }
  if (a.reps) {
    if (id != "fig2") throw sl::ConfigurationError("--reps applies to figure 2 only");
    config["reps"] = std::to_string(*a.reps);
  }
  if (a.rank_by_t_stat) {
    if (id != "fig1") throw sl::ConfigurationError("--rank-by-t-stat applies to figure 1 only");
    config["rank_by_t_stat"] = "true";
  }
  const sl::ExperimentReport report = sl::run_experiment(config);
  for (const auto& p : sl::write_report(a.out, report)) std::cout << "wrote " << p << '\n';
  for (const auto& [k, v] : report.summary) std::cout << k << " = " << sl::format_number(v) << '\n';
  std::cout << "wall_seconds = " << report.wall_seconds << '\n';
  const auto failures = sl::check_invariants(report);
  for (const auto& f : failures) std::cerr << "invariant failed: " << f << '\n';
  return failures.empty() ? 0 : kInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparselab: sparse high-dimensional regression, screening, diagnostics and dimension reduction"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a penalized regression and print the coefficient table");
  fit_cmd->add_option("--data", fit.data, "CSV with header")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--response", fit.response, "response column name")->capture_default_str();
  fit_cmd->add_option("--solver", fit.solver, "cd|ista|lla|dantzig|l0")->capture_default_str()
      ->check(CLI::IsMember({"cd", "ista", "lla", "dantzig", "l0"}));
  fit_cmd->add_option("--penalty", fit.penalty, "soft|hard|scad:GAMMA|mcp:GAMMA")->capture_default_str();
  fit_cmd->add_option("--lambda", fit.lambda, "penalty level (gamma_n for dantzig)");
  fit_cmd->add_option("--gamma", fit.gamma, "concavity parameter for scad/mcp");
  fit_cmd->add_option("--lambda-grid", fit.lambda_grid, "grid size for --cv-folds")->capture_default_str();
  fit_cmd->add_option("--cv-folds", fit.cv_folds, "choose lambda by K-fold cross-validation");
  fit_cmd->add_option("--seed", fit.seed, "fold assignment seed")->capture_default_str();
  fit_cmd->add_option("--tol", fit.tol, "solver tolerance")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "coefficient CSV path (default stdout)");
  fit_cmd->add_flag("--raw", fit.raw, "skip column standardization");

  ScreenArgs screen;
  auto* screen_cmd = app.add_subcommand("screen", "Sure independence screening by marginal coefficients");
  screen_cmd->add_option("--data", screen.data, "CSV with header")->required()->check(CLI::ExistingFile);
  screen_cmd->add_option("--response", screen.response, "response column name")->capture_default_str();
  auto* delta_opt = screen_cmd->add_option("--delta", screen.delta, "keep |beta_j| >= delta");
  screen_cmd->add_option("--top-k", screen.top_k, "keep the k largest |beta_j|")->excludes(delta_opt);
  screen_cmd->add_option("--out", screen.out, "CSV path (default stdout)");

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Spurious correlation, variance, endogeneity and over-identification");
  diag_cmd->add_option("what", diag.what, "spurious|variance|endogeneity|overid")->required()
      ->check(CLI::IsMember({"spurious", "variance", "endogeneity", "overid"}));
  diag_cmd->add_option("--data", diag.data, "CSV with header");
  diag_cmd->add_option("--response", diag.response, "response column name")->capture_default_str();
  diag_cmd->add_option("--out", diag.out, "output directory")->capture_default_str();
  diag_cmd->add_option("--n", diag.n, "spurious: sample size")->capture_default_str();
  diag_cmd->add_option("--d", diag.d_list, "spurious: dimensions")->delimiter(',');
  diag_cmd->add_option("--reps", diag.reps, "spurious: replicates")->capture_default_str();
  diag_cmd->add_option("--subset-size", diag.subset_size, "spurious: |S|")->capture_default_str();
  diag_cmd->add_option("--method", diag.method, "spurious: greedy|exact")->capture_default_str();
  diag_cmd->add_option("--support", diag.support, "comma-separated 0-based column indices");
  diag_cmd->add_option("--select-size", diag.select_size, "variance: run refitted cross-validation with greedy selection of this size");
  diag_cmd->add_option("--permutations", diag.permutations, "endogeneity: permutations")->capture_default_str();
  diag_cmd->add_option("--statistic", diag.statistic, "endogeneity: ks|ks_abs|ks_tail")->capture_default_str();
  diag_cmd->add_flag("--refit", diag.refit, "endogeneity: diagnose OLS-refit residuals of the CV-Lasso selection");
  diag_cmd->add_option("--folds", diag.folds, "cross-validation folds when --support is absent")->capture_default_str();
  diag_cmd->add_option("--seed", diag.seed, "seed")->capture_default_str();

  ReduceArgs reduce;
  auto* reduce_cmd = app.add_subcommand("reduce", "PCA or random projection, with pairwise-distance distortion");
  reduce_cmd->add_option("--data", reduce.data, "CSV with header")->required()->check(CLI::ExistingFile);
  reduce_cmd->add_option("--response", reduce.response, "column to drop before projecting");
  reduce_cmd->add_option("--method", reduce.method, "pca|rp")->capture_default_str()->check(CLI::IsMember({"pca", "rp"}));
  reduce_cmd->add_option("--k", reduce.k, "target dimension")->required();
  reduce_cmd->add_option("--seed", reduce.seed, "random projection seed")->capture_default_str();
  reduce_cmd->add_flag("--orthogonalize", reduce.orthogonalize, "Gram-Schmidt the random projection");
  reduce_cmd->add_option("--out", reduce.out_projected, "projected data CSV (default stdout)");
  reduce_cmd->add_option("--report", reduce.out_report, "distortion CSV (default stderr)");

  ReproduceArgs repro;
  auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate a figure's tables and charts");
  repro_cmd->add_option("--figure", repro.figure, "1|2|4|11|endo")->check(CLI::IsMember({"1", "2", "4", "11", "endo"}));
  repro_cmd->add_option("--config", repro.config, "key = value file (e.g. a previous *_params.txt)")
      ->check(CLI::ExistingFile);
  repro_cmd->add_option("--seed", repro.seed, "master seed");
  repro_cmd->add_option("--reps", repro.reps, "figure 2 replicates");
  repro_cmd->add_flag("--paper-scale", repro.paper_scale, "figure 2 with 1000 replicates");
  repro_cmd->add_flag("--rank-by-t-stat", repro.rank_by_t_stat, "figure 1 with data-driven feature ranking");
  repro_cmd->add_option("--out", repro.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*screen_cmd) return run_screen(screen);
    if (*diag_cmd) return run_diagnose(diag);
    if (*reduce_cmd) return run_reduce(reduce);
    if (*repro_cmd) return run_reproduce(repro);
  } catch (const sl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
