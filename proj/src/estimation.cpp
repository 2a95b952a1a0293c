#include "bgt/estimation.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "bgt/cma_es.hpp"
#include "bgt/util.hpp"

namespace bgt {

namespace {

constexpr double kProbFloor = 1e-300;

// stream tags for sub-seed derivation
constexpr uint64_t kFitRestartStream = 0x66697452;   // "fitR"
constexpr uint64_t kCvFoldStream = 0x63764664;       // "cvFd"
constexpr uint64_t kCvFitStream = 0x63764674;        // "cvFt"

std::vector<std::string> spec_feature_names(const Level0Spec& spec) {
  std::vector<std::string> names;
  names.reserve(spec.kinds.size());
  for (FeatureKind k : spec.kinds) names.push_back(kind_name(k));
  return names;
}

MixedStrategy combine_level0(const ModelConfig& config,
                             const std::vector<FeatureVector>& features,
                             const ModelParams& params, size_t n_actions) {
  if (config.level0.kinds.empty()) return MixedStrategy::uniform(n_actions);
  Level0Weights weights;
  weights.w = params.level0_weights.empty() ? config.level0.weights.w : params.level0_weights;
  if (weights.w.empty()) weights.w.assign(config.level0.kinds.size(), 0.0);
  return config.level0.combiner == CombinerForm::kLinear ? linear_combine(features, weights)
                                                         : logit_combine(features, weights);
}

}  // namespace

LikelihoodEvaluator::LikelihoodEvaluator(const Dataset& normalized, const ModelConfig& config)
    : config_(config) {
  if (normalized.source_units != 1.0)
    throw ValidationError("LikelihoodEvaluator requires payoffs normalized to cents");
  config_.level0.validate();
  entries_.reserve(normalized.entries.size());
  for (const auto& entry : normalized.entries) {
    Entry e;
    e.game = &entry.game;
    e.obs = &entry.obs;
    if (!config_.level0.kinds.empty()) {
      e.row_features = feature_matrix(config_.level0.kinds, config_.level0.transforms,
                                      config_.level0.combiner, entry.game, Role::kRow);
      e.col_features = feature_matrix(config_.level0.kinds, config_.level0.transforms,
                                      config_.level0.combiner, entry.game, Role::kCol);
    }
    entries_.push_back(std::move(e));

    const double log_krow = std::log(static_cast<double>(entry.game.row_actions.size()));
    const double log_kcol = std::log(static_cast<double>(entry.game.col_actions.size()));
    for (long long c : entry.obs.row_counts) {
      n_observations_ += c;
      uniform_ll_ -= static_cast<double>(c) * log_krow;
    }
    for (long long c : entry.obs.col_counts) {
      n_observations_ += c;
      uniform_ll_ -= static_cast<double>(c) * log_kcol;
    }
  }
}

LogLikelihood LikelihoodEvaluator::eval(const ModelParams& params) const {
  LogLikelihood out;
  for (const auto& e : entries_) {
    MixedStrategy pi0_row = combine_level0(config_, e.row_features, params,
                                           e.game->row_actions.size());
    MixedStrategy pi0_col = combine_level0(config_, e.col_features, params,
                                           e.game->col_actions.size());
    auto [pred_row, pred_col] = predict_both_with_level0(*e.game, params, pi0_row, pi0_col);
    for (size_t a = 0; a < e.obs->row_counts.size(); ++a) {
      const long long c = e.obs->row_counts[a];
      if (c == 0) continue;
      double p = pred_row[a];
      if (p < kProbFloor) {
        p = kProbFloor;
        out.floored += c;
      }
      out.value += static_cast<double>(c) * std::log(p);
    }
    for (size_t a = 0; a < e.obs->col_counts.size(); ++a) {
      const long long c = e.obs->col_counts[a];
      if (c == 0) continue;
      double p = pred_col[a];
      if (p < kProbFloor) {
        p = kProbFloor;
        out.floored += c;
      }
      out.value += static_cast<double>(c) * std::log(p);
    }
  }
  return out;
}

LogLikelihood log_likelihood_detail(const Dataset& dataset, const ModelConfig& config,
                                    const ModelParams& params) {
  const Dataset normalized = normalize_payoffs(dataset);
  return LikelihoodEvaluator(normalized, config).eval(params);
}

double log_likelihood(const Dataset& dataset, const ModelConfig& config,
                      const ModelParams& params) {
  return log_likelihood_detail(dataset, config, params).value;
}

FitResult fit_mle(const Dataset& dataset, const ModelConfig& config, const FitOptions& options,
                  uint64_t seed) {
  if (options.budget < 1) throw ValidationError("fit budget must be >= 1");
  if (dataset.entries.empty()) throw ValidationError("fit requires a nonempty dataset");
  const Dataset normalized = normalize_payoffs(dataset);
  const LikelihoodEvaluator evaluator(normalized, config);
  const ParamSpace space(config.kind, spec_feature_names(config.level0), options.fixed,
                         options.poisson_ch_free_epsilon);

  auto objective = [&](const Eigen::VectorXd& y) {
    const ModelParams params = space.decode(y);
    const LogLikelihood ll = evaluator.eval(params);
    return -ll.value;
  };

  const int restarts = std::max(1, options.restarts);
  const int base_budget = options.budget / restarts;
  std::vector<std::optional<CmaResult>> results(restarts);
  parallel_for(static_cast<size_t>(restarts), options.threads, [&](size_t r) {
    int budget = base_budget + (r == 0 ? options.budget % restarts : 0);
    if (budget < 1) return;
    Rng rng(derive_seed(seed, kFitRestartStream, r));
    const Eigen::VectorXd x0 = r == 0 ? space.neutral_init() : space.random_init(rng);
    results[r] = cma_minimize(objective, x0, options.sigma0, budget, rng);
  });

  FitResult fit;
  int best = -1;
  for (int r = 0; r < restarts; ++r) {
    if (!results[r]) continue;
    ++fit.restarts_used;
    fit.evaluations += results[r]->evaluations;
    if (best < 0 || results[r]->best_f < results[best]->best_f) best = r;
  }
  if (best < 0) throw std::logic_error("fit_mle: no restart ran");
  fit.params = space.decode(results[best]->best_x);
  fit.params.validate();
  const LogLikelihood ll = evaluator.eval(fit.params);
  fit.train_log_likelihood = ll.value;
  fit.floored_observations = ll.floored;
  fit.trace.reserve(results[best]->trace.size());
  for (double f : results[best]->trace) fit.trace.push_back(-f);
  return fit;
}

int FoldAssignment::fold_of(const std::string& game_id) const {
  auto it = fold_of_game.find(game_id);
  if (it == fold_of_game.end())
    throw ValidationError("no fold assignment for game '" + game_id + "'");
  return it->second;
}

FoldAssignment stratified_folds(const Dataset& dataset, int n_folds, uint64_t seed) {
  if (n_folds < 2) throw ValidationError("stratified_folds requires n_folds >= 2");
  FoldAssignment out;
  out.seed = seed;
  out.n_folds = n_folds;

  // group by source in first-appearance order
  std::vector<std::string> source_order;
  std::map<std::string, std::vector<std::string>> by_source;
  for (const auto& entry : dataset.entries) {
    auto it = by_source.find(entry.source);
    if (it == by_source.end()) {
      source_order.push_back(entry.source);
      it = by_source.emplace(entry.source, std::vector<std::string>{}).first;
    }
    it->second.push_back(entry.game.id);
  }

  for (size_t s = 0; s < source_order.size(); ++s) {
    std::vector<std::string> ids = by_source[source_order[s]];
    Rng rng(derive_seed(seed, 0x73747261 /*"stra"*/, s));
    rng.shuffle(ids);
    for (size_t j = 0; j < ids.size(); ++j) {
      const int fold = static_cast<int>((s + j) % static_cast<size_t>(n_folds));
      out.fold_of_game[ids[j]] = fold;
    }
    out.per_source.emplace_back(source_order[s], std::move(ids));
  }
  return out;
}

double student_t_quantile(double p, int df) {
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, p);
}

CvReport cross_validate(const Dataset& dataset, const ModelConfig& config,
                        const CvOptions& options, uint64_t seed) {
  if (options.rounds < 1) throw ValidationError("cross_validate requires rounds >= 1");
  if (options.folds < 2) throw ValidationError("cross_validate requires folds >= 2");
  const Dataset normalized = normalize_payoffs(dataset);
  const size_t n_games = normalized.entries.size();

  CvReport report;
  report.dataset_name = normalized.name;
  report.model_name = model_kind_name(config.kind);
  report.level0_name = config.level0.name;
  report.rounds = options.rounds;
  report.folds = options.folds;
  {
    const LikelihoodEvaluator whole(normalized, config);
    report.n_observations = whole.n_observations();
    report.uniform_log_likelihood = whole.uniform_log_likelihood();
  }

  std::vector<FoldAssignment> assignments;
  assignments.reserve(options.rounds);
  for (int r = 0; r < options.rounds; ++r)
    assignments.push_back(
        stratified_folds(normalized, options.folds, derive_seed(seed, kCvFoldStream, r)));

  struct TaskResult {
    std::vector<std::pair<size_t, LogLikelihood>> per_game;  // dataset index -> held-out LL
  };
  const size_t n_tasks = static_cast<size_t>(options.rounds) * options.folds;
  std::vector<TaskResult> tasks(n_tasks);

  FitOptions fit_options = options.fit;
  fit_options.threads = 1;  // outer loop owns the parallelism

  parallel_for(n_tasks, options.threads, [&](size_t t) {
    const int round = static_cast<int>(t) / options.folds;
    const int fold = static_cast<int>(t) % options.folds;
    const FoldAssignment& assignment = assignments[round];

    Dataset train;
    train.name = normalized.name;
    train.source_units = 1.0;
    std::vector<size_t> test_indices;
    for (size_t g = 0; g < n_games; ++g) {
      if (assignment.fold_of(normalized.entries[g].game.id) == fold)
        test_indices.push_back(g);
      else
        train.entries.push_back(normalized.entries[g]);
    }
    if (test_indices.empty()) return;
    if (train.entries.empty())
      throw ValidationError("cross_validate: a fold contains every game");

    const FitResult fit = fit_mle(train, config, fit_options, derive_seed(seed, kCvFitStream, t));

    Dataset test_one;
    test_one.name = normalized.name;
    test_one.source_units = 1.0;
    for (size_t g : test_indices) {
      test_one.entries.assign(1, normalized.entries[g]);
      const LikelihoodEvaluator ev(test_one, config);
      tasks[t].per_game.emplace_back(g, ev.eval(fit.params));
    }
  });

  report.round_scores.assign(options.rounds, 0.0);
  for (int r = 0; r < options.rounds; ++r) {
    std::vector<double> ll_of_game(n_games, 0.0);
    for (int f = 0; f < options.folds; ++f)
      for (const auto& [g, ll] : tasks[static_cast<size_t>(r) * options.folds + f].per_game) {
        ll_of_game[g] = ll.value;
        report.floored_observations += ll.floored;
      }
    double score = 0.0;
    for (size_t g = 0; g < n_games; ++g) score += ll_of_game[g];  // fixed summation order
    report.round_scores[r] = score;
  }

  double mean = 0.0;
  for (double s : report.round_scores) mean += s;
  mean /= report.round_scores.size();
  report.mean_log_likelihood = mean;
  if (options.rounds > 1) {
    double ss = 0.0;
    for (double s : report.round_scores) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (options.rounds - 1));
    report.half_width_95 = student_t_quantile(0.975, options.rounds - 1) * sd /
                           std::sqrt(static_cast<double>(options.rounds));
  }
  if (report.n_observations > 0)
    report.likelihood_ratio_per_obs =
        std::exp((mean - report.uniform_log_likelihood) / report.n_observations);
  return report;
}

ModelComparison compare_models(const std::vector<CvReport>& reports) {
  if (reports.size() < 2)
    throw ValidationError("compare_models requires at least two reports");
  for (size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].dataset_name != reports[0].dataset_name ||
        reports[i].n_observations != reports[0].n_observations)
      throw ValidationError("compare_models: reports come from different datasets");
  }
  ModelComparison cmp;
  for (size_t i = 0; i < reports.size(); ++i)
    cmp.rows.push_back({i, reports[i].mean_log_likelihood, reports[i].half_width_95});
  std::stable_sort(cmp.rows.begin(), cmp.rows.end(),
                   [](const auto& a, const auto& b) { return a.mean > b.mean; });
  cmp.significant.assign(reports.size(), std::vector<bool>(reports.size(), false));
  for (size_t i = 0; i < cmp.rows.size(); ++i)
    for (size_t j = 0; j < cmp.rows.size(); ++j) {
      if (i == j) continue;
      const auto& a = cmp.rows[i];
      const auto& b = cmp.rows[j];
      const double ha = a.half_width.value_or(0.0);
      const double hb = b.half_width.value_or(0.0);
      // disjoint intervals
      cmp.significant[i][j] = (a.mean - ha > b.mean + hb) || (b.mean - hb > a.mean + ha);
    }
  return cmp;
}

}  // namespace bgt
