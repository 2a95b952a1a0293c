#include "bgt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bgt/util.hpp"

namespace bgt {

namespace {

constexpr uint64_t kSelFoldStream = 0x73656c46;  // "selF"
constexpr uint64_t kSelFitStream = 0x73656c54;   // "selT"

struct Instance {
  int test_fold;
  int validation_fold;
};

// set comparison key: sorted kind indices
std::vector<int> set_key(const std::vector<FeatureKind>& kinds) {
  std::vector<int> key;
  for (FeatureKind k : kinds) key.push_back(static_cast<int>(k));
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

SelectionTrace forward_select(const Dataset& dataset,
                              const std::vector<FeatureKind>& candidates, ModelKind kind,
                              const SelectionOptions& options, uint64_t seed,
                              const SelectionObserver& observer) {
  if (candidates.size() < 2)
    throw ValidationError("forward_select requires at least two candidate features");
  for (size_t i = 0; i < candidates.size(); ++i)
    for (size_t j = i + 1; j < candidates.size(); ++j)
      if (candidates[i] == candidates[j])
        throw ValidationError("forward_select: duplicate candidate feature");
  if (options.folds < 3)
    throw ValidationError("forward_select requires folds >= 3 (train/validation/test)");

  const Dataset normalized = normalize_payoffs(dataset);
  const FoldAssignment assignment =
      stratified_folds(normalized, options.folds, derive_seed(seed, kSelFoldStream));

  // instance i holds out test fold i mod folds and validates on the
  // (i mod (folds-1))-th remaining fold
  std::vector<Instance> instances;
  for (int i = 0; i < options.n_instances; ++i) {
    const int test = i % options.folds;
    int v = i % (options.folds - 1);
    if (v >= test) ++v;  // skip the test fold
    instances.push_back({test, v});
  }

  // per-instance game index partitions, shared across candidate sets
  struct InstanceData {
    Dataset fit;
    Dataset validation;
    std::vector<std::string> fit_ids, validation_ids, test_ids;
  };
  std::vector<InstanceData> data(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    auto& d = data[i];
    d.fit.name = d.validation.name = normalized.name;
    d.fit.source_units = d.validation.source_units = 1.0;
    for (const auto& entry : normalized.entries) {
      const int fold = assignment.fold_of(entry.game.id);
      if (fold == instances[i].test_fold) {
        d.test_ids.push_back(entry.game.id);
      } else if (fold == instances[i].validation_fold) {
        d.validation.entries.push_back(entry);
        d.validation_ids.push_back(entry.game.id);
      } else {
        d.fit.entries.push_back(entry);
        d.fit_ids.push_back(entry.game.id);
      }
    }
    if (d.fit.entries.empty() || d.validation.entries.empty())
      throw ValidationError("forward_select: empty fit or validation fold");
  }

  FitOptions fit_options = options.fit;
  fit_options.threads = 1;

  auto evaluate_sets = [&](const std::vector<std::vector<FeatureKind>>& sets)
      -> std::vector<SelectionEvaluation> {
    std::vector<SelectionEvaluation> evals(sets.size());
    const size_t n_tasks = sets.size() * instances.size();
    std::vector<double> scores(n_tasks, 0.0);
    parallel_for(n_tasks, options.threads, [&](size_t t) {
      const size_t s = t / instances.size();
      const size_t i = t % instances.size();
      const auto& d = data[i];

      Level0Spec spec;
      spec.name = "candidate";
      spec.kinds = sets[s];
      spec.transforms = options.transforms;
      spec.combiner = options.combiner;
      spec.weights.w.assign(sets[s].size(), 0.0);
      ModelConfig config{kind, spec};

      if (observer) observer(sets[s], static_cast<int>(i), d.fit_ids, d.validation_ids, d.test_ids);
      for (const auto& vid : d.validation_ids)
        for (const auto& tid : d.test_ids)
          if (vid == tid) throw std::logic_error("validation game overlaps test fold");

      const FitResult fit =
          fit_mle(d.fit, config, fit_options, derive_seed(seed, kSelFitStream, i));
      const LikelihoodEvaluator ev(d.validation, config);
      scores[t] = ev.eval(fit.params).value;
    });
    for (size_t s = 0; s < sets.size(); ++s) {
      auto& e = evals[s];
      e.kinds = sets[s];
      e.instance_scores.assign(scores.begin() + s * instances.size(),
                               scores.begin() + (s + 1) * instances.size());
      double mean = 0.0;
      for (double v : e.instance_scores) mean += v;
      mean /= e.instance_scores.size();
      e.score = mean;
      if (e.instance_scores.size() > 1) {
        double ss = 0.0;
        for (double v : e.instance_scores) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (e.instance_scores.size() - 1));
        e.half_width = student_t_quantile(0.975, static_cast<int>(e.instance_scores.size()) - 1) *
                       sd / std::sqrt(static_cast<double>(e.instance_scores.size()));
      }
    }
    return evals;
  };

  SelectionTrace trace;

  // stage 1: every one- and two-element subset
  std::vector<std::vector<FeatureKind>> stage1;
  for (FeatureKind k : candidates) stage1.push_back({k});
  for (size_t i = 0; i < candidates.size(); ++i)
    for (size_t j = i + 1; j < candidates.size(); ++j)
      stage1.push_back({candidates[i], candidates[j]});
  auto evals = evaluate_sets(stage1);
  trace.evaluated = evals;

  auto better = [](const SelectionEvaluation& a, const SelectionEvaluation& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.kinds.size() != b.kinds.size()) return a.kinds.size() < b.kinds.size();
    return set_key(a.kinds) < set_key(b.kinds);
  };

  const SelectionEvaluation* best_pair = nullptr;
  for (const auto& e : trace.evaluated)
    if (e.kinds.size() == 2 && (!best_pair || better(e, *best_pair))) best_pair = &e;
  SelectionEvaluation current = *best_pair;
  trace.chosen_path.push_back(current.kinds);

  // Instances are shared across candidate sets, so continuation is judged on
  // the paired per-instance differences: the challenger must beat the
  // incumbent by more than the 95% half-width of those differences.
  auto paired_significant = [&](const SelectionEvaluation& incumbent,
                                const SelectionEvaluation& challenger) {
    const size_t n = incumbent.instance_scores.size();
    if (n < 2) return challenger.score > incumbent.score;
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i)
      mean += challenger.instance_scores[i] - incumbent.instance_scores[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = challenger.instance_scores[i] - incumbent.instance_scores[i] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double half = student_t_quantile(0.975, static_cast<int>(n) - 1) * sd /
                        std::sqrt(static_cast<double>(n));
    return mean > half;
  };

  // grow one feature per stage while the improvement is significant
  for (;;) {
    std::vector<std::vector<FeatureKind>> supersets;
    for (FeatureKind k : candidates) {
      if (std::find(current.kinds.begin(), current.kinds.end(), k) != current.kinds.end())
        continue;
      auto bigger = current.kinds;
      bigger.push_back(k);
      supersets.push_back(std::move(bigger));
    }
    if (supersets.empty()) break;
    auto stage_evals = evaluate_sets(supersets);
    trace.evaluated.insert(trace.evaluated.end(), stage_evals.begin(), stage_evals.end());
    const SelectionEvaluation* best = &stage_evals[0];
    for (const auto& e : stage_evals)
      if (better(e, *best)) best = &e;
    if (!paired_significant(current, *best)) break;
    current = *best;
    trace.chosen_path.push_back(current.kinds);
  }

  trace.selected = trace.chosen_path.back();
  return trace;
}

}  // namespace bgt
