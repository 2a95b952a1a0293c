#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgt/behavioral.hpp"
#include "bgt/game.hpp"
#include "bgt/param_space.hpp"

namespace bgt {

struct ModelConfig {
  ModelKind kind = ModelKind::kSpikePoissonQch;
  Level0Spec level0;
};

struct LogLikelihood {
  double value = 0.0;
  long long floored = 0;  // observations whose probability hit the 1e-300 floor
};

// Caches per-game transformed feature matrices (parameter-independent), so
// repeated likelihood evaluations only redo the combine + ladder.
// Requires payoffs already normalized to cents.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const Dataset& normalized, const ModelConfig& config);

  LogLikelihood eval(const ModelParams& params) const;
  long long n_observations() const { return n_observations_; }
  double uniform_log_likelihood() const { return uniform_ll_; }

 private:
  struct Entry {
    const NormalFormGame* game;
    const GameObservations* obs;
    std::vector<FeatureVector> row_features;
    std::vector<FeatureVector> col_features;
  };
  ModelConfig config_;
  std::vector<Entry> entries_;
  long long n_observations_ = 0;
  double uniform_ll_ = 0.0;
};

// Sum over games, roles, actions of count * ln(predicted probability),
// probabilities floored at 1e-300.  Normalizes payoffs first.
double log_likelihood(const Dataset& dataset, const ModelConfig& config,
                      const ModelParams& params);
LogLikelihood log_likelihood_detail(const Dataset& dataset, const ModelConfig& config,
                                    const ModelParams& params);

struct FitOptions {
  int budget = 5000;    // objective evaluations across all restarts
  int restarts = 4;
  int threads = 1;
  double sigma0 = 0.6;
  FixedParams fixed;
  bool poisson_ch_free_epsilon = false;
};

struct FitResult {
  ModelParams params;
  double train_log_likelihood = 0.0;
  int restarts_used = 0;
  int evaluations = 0;
  long long floored_observations = 0;  // at the returned optimum
  std::vector<double> trace;           // winning restart's best-so-far LL per generation
};

// Maximum-likelihood fit via CMA-ES restarts in the transformed parameter
// space.  Deterministic given seed, for any thread count.
FitResult fit_mle(const Dataset& dataset, const ModelConfig& config, const FitOptions& options,
                  uint64_t seed);

struct FoldAssignment {
  uint64_t seed = 0;
  int n_folds = 0;
  std::map<std::string, int> fold_of_game;
  // per source, game ids in deal order (the stratification record)
  std::vector<std::pair<std::string, std::vector<std::string>>> per_source;

  int fold_of(const std::string& game_id) const;
};

// Games grouped by source, shuffled within source, dealt round-robin; fold
// sizes within each source differ by at most one.
FoldAssignment stratified_folds(const Dataset& dataset, int n_folds, uint64_t seed);

struct CvOptions {
  int rounds = 10;
  int folds = 10;
  FitOptions fit;
  int threads = 1;
};

struct CvReport {
  std::string dataset_name;
  std::string model_name;
  std::string level0_name;
  int rounds = 0;
  int folds = 0;
  long long n_observations = 0;
  std::vector<double> round_scores;       // held-out log-likelihood per round
  double mean_log_likelihood = 0.0;
  std::optional<double> half_width_95;    // Student's-t 95% half-width; absent when rounds == 1
  double uniform_log_likelihood = 0.0;
  double likelihood_ratio_per_obs = 1.0;  // geometric mean ratio to uniform per observation
  long long floored_observations = 0;
};

// Repeated stratified cross-validation: per round, fit on 9/10 of the games
// and score the held-out fold; round score sums held-out log-likelihoods.
CvReport cross_validate(const Dataset& dataset, const ModelConfig& config,
                        const CvOptions& options, uint64_t seed);

struct ModelComparison {
  struct Row {
    size_t report_index;
    double mean;
    std::optional<double> half_width;
  };
  std::vector<Row> rows;                       // sorted by mean, best first
  std::vector<std::vector<bool>> significant;  // [i][j]: intervals of rows i,j disjoint
};

// Pairwise interval-overlap comparison of reports on the same dataset.
ModelComparison compare_models(const std::vector<CvReport>& reports);

double student_t_quantile(double p, int df);

}  // namespace bgt
