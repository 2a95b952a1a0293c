#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "bgt/estimation.hpp"
#include "bgt/synth.hpp"
#include "test_util.hpp"

using namespace bgt;
using namespace bgt::testing;

namespace {

Dataset one_game_dataset(const NormalFormGame& game, std::vector<long long> row_counts,
                         std::vector<long long> col_counts) {
  Dataset ds;
  ds.name = "t";
  ds.source_units = 1.0;
  DatasetEntry e;
  e.game = game;
  e.obs = {game.id, std::move(row_counts), std::move(col_counts)};
  e.source = "t";
  ds.entries.push_back(std::move(e));
  return ds;
}

Dataset uniform_count_games(int n_games, long long count_per_action) {
  Dataset ds;
  ds.name = "u";
  ds.source_units = 1.0;
  for (int i = 0; i < n_games; ++i) {
    DatasetEntry e;
    e.game = make_game("g" + std::to_string(i), {{3.0 + i, 0}, {5, 1}}, {{3, 5}, {0, 1.0 + i}});
    e.obs = {e.game.id, {count_per_action, count_per_action}, {count_per_action, count_per_action}};
    e.source = "u";
    ds.entries.push_back(std::move(e));
  }
  return ds;
}

GeneratorConfig recovery_config(uint64_t seed, long long obs_per_role) {
  GeneratorConfig gc;
  gc.n_games = 20;
  gc.min_actions = 3;
  gc.max_actions = 3;
  gc.payoff_min = 0;
  gc.payoff_max = 250;
  gc.symmetric_fraction = 0.4;
  gc.observations_per_game_per_role = obs_per_role;
  gc.params.kind = ModelKind::kSpikePoissonQch;
  gc.params.spike_poisson = {1.0, 0.4, 0.2};
  gc.params.level0_weights = {0.2, 0.1, 0.3, 0.1};
  gc.level0 = linear4_spec();
  gc.seed = seed;
  gc.threads = 2;
  return gc;
}

}  // namespace

TEST_CASE("log_likelihood arithmetic") {
  SUBCASE("counts against a known 3:1 prediction") {
    // a 2x1 game whose max-payoff feature softmaxes to (0.75, 0.25); the full
    // level-0 spike makes the model prediction equal the level-0 distribution
    NormalFormGame g = make_game("gap", {{std::log(3.0)}, {0}}, {{0}, {0}});
    Level0Spec spec;
    spec.name = "softmax_max";
    spec.kinds = {FeatureKind::kMaxReal};
    spec.combiner = CombinerForm::kLogit;
    spec.weights.w = {1.0};
    ModelConfig config{ModelKind::kSpikePoissonQch, spec};
    ModelParams p;
    p.spike_poisson = {1.0, 1.0, 0.7};
    Dataset ds = one_game_dataset(g, {3, 1}, {0});
    CHECK(log_likelihood(ds, config, p) ==
          doctest::Approx(-2.2493405784752333).epsilon(1e-12));
  }
  SUBCASE("uniform prediction has the closed form") {
    Dataset ds = uniform_count_games(3, 4);
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    ModelParams p;
    p.spike_poisson = {1.0, 0.0, 0.0};  // lambda 0: every level uniform
    CHECK(log_likelihood(ds, config, p) ==
          doctest::Approx(48.0 * std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("zero counts give zero") {
    Dataset ds = one_game_dataset(prisoners_dilemma(), {0, 0}, {0, 0});
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    ModelParams p;
    p.spike_poisson = {1.0, 0.3, 0.5};
    CHECK(log_likelihood(ds, config, p) == 0.0);
  }
  SUBCASE("decomposes over disjoint game sets") {
    Rng rng(41);
    Dataset all;
    all.name = "d";
    all.source_units = 1.0;
    for (int i = 0; i < 6; ++i) {
      DatasetEntry e;
      e.game = random_game(rng, 3, 3, 0, 60, true);
      e.game.id = "g" + std::to_string(i);
      e.obs.game_id = e.game.id;
      for (int a = 0; a < 3; ++a) {
        e.obs.row_counts.push_back(static_cast<long long>(rng.uniform_int(20)));
        e.obs.col_counts.push_back(static_cast<long long>(rng.uniform_int(20)));
      }
      e.source = "d";
      all.entries.push_back(std::move(e));
    }
    Dataset first = all, second = all;
    first.entries.resize(3);
    second.entries.erase(second.entries.begin(), second.entries.begin() + 3);
    ModelConfig config{ModelKind::kSpikePoissonQch, linear4_spec()};
    ModelParams p;
    p.spike_poisson = {1.2, 0.3, 0.1};
    p.level0_weights = {0.2, 0.1, 0.3, 0.1};
    CHECK(log_likelihood(all, config, p) ==
          doctest::Approx(log_likelihood(first, config, p) + log_likelihood(second, config, p))
              .epsilon(1e-9));
  }
}

TEST_CASE("fit_mle") {
  SUBCASE("uniform observations are fit to the uniform likelihood") {
    Dataset ds = uniform_count_games(2, 8);
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    FitOptions fo;
    fo.budget = 4000;
    fo.restarts = 4;
    FitResult fit = fit_mle(ds, config, fo, 3);
    CHECK(fit.train_log_likelihood == doctest::Approx(64.0 * std::log(0.5)).epsilon(1e-8));
    CHECK(std::abs(fit.train_log_likelihood - 64.0 * std::log(0.5)) < 1e-6);
  }
  SUBCASE("budget of one returns the single evaluated point") {
    Dataset ds = uniform_count_games(1, 2);
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    FitOptions fo;
    fo.budget = 1;
    fo.restarts = 4;
    FitResult fit = fit_mle(ds, config, fo, 3);
    CHECK(fit.evaluations == 1);
    CHECK(fit.restarts_used == 1);
  }
  SUBCASE("result beats twenty random parameter draws") {
    Dataset ds = generate(recovery_config(77, 30));
    ModelConfig config{ModelKind::kSpikePoissonQch, linear4_spec()};
    FitOptions fo;
    fo.budget = 1500;
    fo.restarts = 2;
    fo.threads = 2;
    FitResult fit = fit_mle(ds, config, fo, 5);
    fit.params.validate();
    Rng rng(99);
    for (int draw = 0; draw < 20; ++draw) {
      ModelParams p;
      p.spike_poisson = {rng.uniform(0, 5), rng.uniform(), rng.uniform(0, 2)};
      double rest = 1.0;
      p.level0_weights.clear();
      for (int f = 0; f < 4; ++f) {
        p.level0_weights.push_back(rest * rng.uniform(0, 0.5));
        rest -= p.level0_weights.back();
      }
      CHECK(fit.train_log_likelihood >= log_likelihood(ds, config, p));
    }
  }
  SUBCASE("deterministic for a fixed seed across thread counts") {
    Dataset ds = generate(recovery_config(6, 20));
    ModelConfig config{ModelKind::kSpikePoissonQch, linear4_spec()};
    FitOptions fo;
    fo.budget = 600;
    fo.restarts = 3;
    fo.threads = 1;
    FitResult a = fit_mle(ds, config, fo, 11);
    fo.threads = 3;
    FitResult b = fit_mle(ds, config, fo, 11);
    CHECK(a.train_log_likelihood == b.train_log_likelihood);
    CHECK(a.params.spike_poisson.tau == b.params.spike_poisson.tau);
    CHECK(a.params.level0_weights == b.params.level0_weights);
  }
  SUBCASE("recovers generating parameters from a large synthetic sample") {
    // 50000 observations; the acceptance suite runs the stated small-sample protocol
    Dataset ds = generate(recovery_config(1000, 1250));
    ModelConfig config{ModelKind::kSpikePoissonQch, linear4_spec()};
    FitOptions fo;
    fo.budget = 5000;
    fo.restarts = 4;
    fo.threads = 2;
    FitResult fit = fit_mle(ds, config, fo, 1);
    CHECK(std::abs(fit.params.spike_poisson.tau - 1.0) <= 0.15);
    CHECK(std::abs(fit.params.spike_poisson.epsilon - 0.4) <= 0.1);
    CHECK(std::abs(fit.params.spike_poisson.lambda - 0.2) <= 0.15);
    const std::vector<double> truth = {0.2, 0.1, 0.3, 0.1};
    for (int f = 0; f < 4; ++f)
      CHECK(std::abs(fit.params.level0_weights[f] - truth[f]) <= 0.15);
  }
}

TEST_CASE("stratified_folds") {
  SUBCASE("even division") {
    Dataset ds = generate([&] {
      GeneratorConfig gc = recovery_config(8, 0);
      gc.n_games = 20;
      return gc;
    }());
    FoldAssignment fa = stratified_folds(ds, 10, 17);
    std::map<int, int> sizes;
    for (const auto& e : ds.entries) sizes[fa.fold_of(e.game.id)]++;
    for (const auto& [fold, size] : sizes) CHECK(size == 2);
  }
  SUBCASE("23 games in 10 folds leaves exactly three folds of three") {
    GeneratorConfig gc = recovery_config(9, 0);
    gc.n_games = 23;
    Dataset ds = generate(gc);
    FoldAssignment fa = stratified_folds(ds, 10, 17);
    std::map<int, int> sizes;
    for (const auto& e : ds.entries) sizes[fa.fold_of(e.game.id)]++;
    int threes = 0, twos = 0;
    for (const auto& [fold, size] : sizes) {
      CHECK((size == 2 || size == 3));
      threes += size == 3;
      twos += size == 2;
    }
    CHECK(threes == 3);
    CHECK(twos == 7);
  }
  SUBCASE("same seed twice gives the identical assignment") {
    GeneratorConfig gc = recovery_config(10, 0);
    gc.n_games = 37;
    gc.n_sources = 4;
    Dataset ds = generate(gc);
    FoldAssignment a = stratified_folds(ds, 10, 123);
    FoldAssignment b = stratified_folds(ds, 10, 123);
    CHECK(a.fold_of_game == b.fold_of_game);
    FoldAssignment c = stratified_folds(ds, 10, 124);
    CHECK(a.fold_of_game != c.fold_of_game);
  }
  SUBCASE("per-source fold sizes differ by at most one") {
    GeneratorConfig gc = recovery_config(11, 0);
    gc.n_games = 57;
    gc.n_sources = 5;
    Dataset ds = generate(gc);
    for (uint64_t seed = 0; seed < 50; ++seed) {
      FoldAssignment fa = stratified_folds(ds, 10, seed);
      std::map<std::string, std::map<int, int>> counts;
      for (const auto& e : ds.entries) counts[e.source][fa.fold_of(e.game.id)]++;
      for (const auto& [source, folds] : counts) {
        int lo = 1 << 20, hi = 0;
        for (int f = 0; f < 10; ++f) {
          auto it = folds.find(f);
          const int size = it == folds.end() ? 0 : it->second;
          lo = std::min(lo, size);
          hi = std::max(hi, size);
        }
        CHECK(hi - lo <= 1);
      }
    }
  }
  SUBCASE("fewer games than folds is still valid") {
    GeneratorConfig gc = recovery_config(12, 0);
    gc.n_games = 4;
    Dataset ds = generate(gc);
    FoldAssignment fa = stratified_folds(ds, 10, 5);
    for (const auto& e : ds.entries) CHECK(fa.fold_of(e.game.id) < 10);
  }
  SUBCASE("rejects fewer than two folds") {
    Dataset ds = uniform_count_games(4, 1);
    CHECK_THROWS_AS(stratified_folds(ds, 1, 0), ValidationError);
  }
}

TEST_CASE("cross_validate") {
  SUBCASE("constant uniform predictor has zero variance and the closed-form score") {
    Dataset ds = uniform_count_games(8, 4);
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    CvOptions options;
    options.rounds = 4;
    options.folds = 4;
    options.fit.budget = 60;
    options.fit.restarts = 1;
    options.fit.fixed.lambda = 0.0;  // clamp: prediction is uniform whatever the fit does
    options.threads = 2;
    CvReport report = cross_validate(ds, config, options, 21);
    REQUIRE(report.round_scores.size() == 4);
    for (double s : report.round_scores) CHECK(s == report.round_scores[0]);
    CHECK(report.mean_log_likelihood ==
          doctest::Approx(8 * 16.0 * std::log(0.5)).epsilon(1e-9));
    CHECK(report.half_width_95.value() == 0.0);
    CHECK(report.likelihood_ratio_per_obs == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("a single round reports no interval") {
    Dataset ds = uniform_count_games(4, 2);
    ModelConfig config{ModelKind::kSpikePoissonQch, uniform_spec()};
    CvOptions options;
    options.rounds = 1;
    options.folds = 2;
    options.fit.budget = 40;
    options.fit.restarts = 1;
    CvReport report = cross_validate(ds, config, options, 2);
    CHECK_FALSE(report.half_width_95.has_value());
  }
  SUBCASE("informative level-0 beats uniform on synthetic nonuniform data") {
    GeneratorConfig gc = recovery_config(2024, 150);
    gc.n_games = 24;
    Dataset ds = generate(gc);
    CvOptions options;
    options.rounds = 2;
    options.folds = 4;
    options.fit.budget = 900;
    options.fit.restarts = 2;
    options.threads = 2;
    CvReport uniform_report =
        cross_validate(ds, {ModelKind::kSpikePoissonQch, uniform_spec()}, options, 5);
    CvReport linear4_report =
        cross_validate(ds, {ModelKind::kSpikePoissonQch, linear4_spec()}, options, 5);
    CHECK(linear4_report.mean_log_likelihood > uniform_report.mean_log_likelihood);
    CHECK(linear4_report.likelihood_ratio_per_obs > 1.0);
  }
  SUBCASE("byte-deterministic across thread counts") {
    Dataset ds = generate(recovery_config(31, 25));
    ModelConfig config{ModelKind::kSpikePoissonQch, linear4_spec()};
    CvOptions options;
    options.rounds = 2;
    options.folds = 3;
    options.fit.budget = 200;
    options.fit.restarts = 2;
    options.threads = 1;
    CvReport a = cross_validate(ds, config, options, 77);
    options.threads = 4;
    CvReport b = cross_validate(ds, config, options, 77);
    CHECK(a.round_scores == b.round_scores);
    CHECK(a.mean_log_likelihood == b.mean_log_likelihood);
  }
}

TEST_CASE("compare_models") {
  CvReport a;
  a.dataset_name = "d";
  a.n_observations = 100;
  a.mean_log_likelihood = -50;
  a.half_width_95 = 1.0;
  CvReport b = a;

  SUBCASE("identical reports are not significantly different") {
    ModelComparison cmp = compare_models({a, b});
    CHECK_FALSE(cmp.significant[0][1]);
  }
  SUBCASE("disjoint intervals are significant") {
    b.mean_log_likelihood = -46.0;  // [-47,-45] vs [-51,-49]
    ModelComparison cmp = compare_models({a, b});
    CHECK(cmp.significant[0][1]);
    CHECK(cmp.rows[0].report_index == 1);  // sorted best first
  }
  SUBCASE("overlapping intervals are not significant") {
    b.mean_log_likelihood = -48.5;
    ModelComparison cmp = compare_models({a, b});
    CHECK_FALSE(cmp.significant[0][1]);
  }
  SUBCASE("mismatched datasets are rejected") {
    b.dataset_name = "other";
    CHECK_THROWS_AS(compare_models({a, b}), ValidationError);
  }
}

TEST_CASE("student_t_quantile matches the known df=9 value") {
  CHECK(student_t_quantile(0.975, 9) == doctest::Approx(2.2621571628).epsilon(1e-9));
}
