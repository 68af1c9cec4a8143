#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sparselab/diagnostics.hpp"
#include "sparselab/generators.hpp"
#include "sparselab/random.hpp"
#include "sparselab/report.hpp"
#include "sparselab/solvers.hpp"

namespace sparselab {

// ---- noise accumulation ----------------------------------------------------

// ||centroid_1 - centroid_2|| / mean distance of a point to its own class
// centroid, for 2-D scores whose first n1 rows are class 1.
double separation_score(const Matrix& scores, std::size_t n1);

struct Fig1Options {
  std::vector<std::size_t> m_list{2, 40, 200, 1000};
  std::size_t n_per_class = 100;
  std::size_t d = 1000;
  std::size_t nonzero = 10;
  double signal = 3.0;
  bool rank_by_t_stat = false;  // rank features by |two-sample t| instead of coordinate order
  Seed seed{1};
};

ExperimentReport fig1_noise_accumulation(const std::vector<std::size_t>& m_list, const TwoClassGaussianSpec& spec,
                                         Seed seed, bool rank_by_t_stat = false);
ExperimentReport fig1_noise_accumulation(const Fig1Options& options);

// ---- spurious correlation --------------------------------------------------

struct Fig2Options {
  std::size_t n = 60;
  std::vector<std::size_t> d_list{800, 6400};
  std::size_t reps = 200;
  std::size_t subset_size = 4;
  SubsetSearch method = SubsetSearch::greedy;
  std::size_t bins = 40;
  Seed seed{1};
};

inline constexpr std::size_t kFullScaleReps = 1000;

ExperimentReport fig2_spurious(Seed seed);
ExperimentReport fig2_spurious(const Fig2Options& options);

// ---- penalty curves --------------------------------------------------------

ExperimentReport fig4_penalties();

// ---- random projection vs PCA ---------------------------------------------

// Isotropic N(0, I_d) bulk plus `spikes` random directions whose scores have
// sd spike_sd_factor * sqrt(d).
struct SurrogateSpec {
  std::size_t n = 500;
  std::size_t d = 2500;
  std::size_t spikes = 5;
  double spike_sd_factor = 0.5;
};

Dataset gen_spiked_surrogate(const SurrogateSpec& spec, Seed seed);

struct Fig11Options {
  std::vector<std::size_t> d_list{100, 500, 2500};
  std::vector<std::size_t> k_grid{5, 10, 25, 50, 100, 250, 500};
  std::size_t n = 500;
  std::size_t spikes = 5;
  double spike_sd_factor = 0.5;
  Seed seed{1};
};

ExperimentReport fig11_rp_vs_pca(const std::vector<std::size_t>& d_list, const std::vector<std::size_t>& k_grid,
                                 Seed seed);
ExperimentReport fig11_rp_vs_pca(const Fig11Options& options);

// ---- endogeneity demo ------------------------------------------------------

struct CvLassoFit {
  FitResult fit;
  CvResult cv;
};

// Lasso at the K-fold cross-validated lambda on a log grid below lambda_max.
// `data` must be standardized.
CvLassoFit cv_lasso(const Dataset& data, std::size_t folds, std::size_t lambda_count, Seed seed);

struct EndoOptions {
  std::size_t n = 200;
  std::size_t d = 200;
  double noise_sd = 1.0;
  std::size_t signal_count = 3;
  double signal = 2.0;
  std::size_t endogenous_count = 100;  // variables after the signals
  double endogenous_weight = 0.3;      // alternating sign
  EndogeneityMode mode = EndogeneityMode::direct;
  std::size_t folds = 10;
  std::size_t lambda_count = 40;
  std::size_t permutations = 50;
  TailStatistic statistic = TailStatistic::ks_tail;
  bool refit_residuals = false;  // diagnose OLS-refit residuals instead of the Lasso's
  Seed seed{1};
};

struct EndoOutcome {
  EndogeneityReport endogeneity;
  OveridReport overid;  // empty when the selection is empty or too large to refit
  IndexSet selected;
  double lambda_star = 0.0;
};

// Planted endogeneity, cross-validated Lasso, the permutation diagnostic on
// its residuals (or on the OLS refit's), and the over-identification check on
// the OLS refit of the selected set.
EndoOutcome run_endogeneity(const EndoOptions& options);
ExperimentReport endogeneity_demo(Seed seed);
ExperimentReport endogeneity_demo(const EndoOptions& options);

// Checks a finished report against properties that hold for every run
// (value ranges, exact identities). Returns one message per violation.
std::vector<std::string> check_invariants(const ExperimentReport& report);

// ---- configuration ---------------------------------------------------------

// Plain-text `key = value` lines; '#' starts a comment.
using Config = std::map<std::string, std::string>;

Config read_config(std::istream& in);
Config read_config_file(const std::string& path);

// Runs the experiment named by config["experiment"] (fig1, fig2, fig4, fig11,
// endo); other keys override defaults. Unknown keys are rejected.
ExperimentReport run_experiment(const Config& config);

}  // namespace sparselab
