#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bgt/estimation.hpp"

namespace bgt {

struct SelectionOptions {
  int folds = 10;
  int n_instances = 10;  // (test fold, validation fold) pairs per evaluation
  FitOptions fit;
  int threads = 1;
  TransformFlags transforms = {true, true};
  CombinerForm combiner = CombinerForm::kLinear;
};

struct SelectionEvaluation {
  std::vector<FeatureKind> kinds;
  double score = 0.0;       // mean validation log-likelihood over instances
  double half_width = 0.0;  // Student's-t 95% half-width over instances
  std::vector<double> instance_scores;
};

struct SelectionTrace {
  std::vector<SelectionEvaluation> evaluated;
  std::vector<std::vector<FeatureKind>> chosen_path;  // adopted set per stage
  std::vector<FeatureKind> selected;                  // final adopted set
};

// Called once per (candidate set, instance) with the game ids used to fit,
// to validate, and the untouched test fold.  For provenance checks in tests.
using SelectionObserver =
    std::function<void(const std::vector<FeatureKind>& kinds, int instance,
                       const std::vector<std::string>& fit_ids,
                       const std::vector<std::string>& validation_ids,
                       const std::vector<std::string>& test_ids)>;

// Forward selection over candidate features.  Stage 1 evaluates every one-
// and two-element subset and adopts the best two-element subset; later
// stages evaluate every one-feature extension of the adopted set and
// continue while the best extension beats the incumbent by more than the
// 95% half-width of their paired per-instance score differences.
// Validation scores come from subfold instances carved out of the training
// folds; test folds are never evaluated.
SelectionTrace forward_select(const Dataset& dataset,
                              const std::vector<FeatureKind>& candidates, ModelKind kind,
                              const SelectionOptions& options, uint64_t seed,
                              const SelectionObserver& observer = nullptr);

}  // namespace bgt
