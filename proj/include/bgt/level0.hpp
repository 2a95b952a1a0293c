#pragma once

#include <string>
#include <vector>

#include "bgt/features.hpp"
#include "bgt/game.hpp"

namespace bgt {

// Per-feature weights w_f in [0,1] with sum <= 1; the remainder
// w0 = 1 - sum(w_f) is the weight of uniform randomization.
struct Level0Weights {
  std::vector<double> w;

  double w0() const;
  void validate() const;
  size_t size() const { return w.size(); }
};

// A named level-0 specification: which features, which transforms, how they
// are combined, and with what weights.
struct Level0Spec {
  std::string name;
  std::vector<FeatureKind> kinds;
  TransformFlags transforms;
  CombinerForm combiner = CombinerForm::kLinear;
  Level0Weights weights;

  void validate() const;
};

// pi(a) proportional to w0 + sum_f w_f * f(a).  Requires nonnegative feature
// values; zero total mass falls back to uniform.
MixedStrategy linear_combine(const std::vector<FeatureVector>& features,
                             const Level0Weights& weights);

// pi(a) proportional to exp(w0 + sum_f w_f * f(a)), max-stabilized.
MixedStrategy logit_combine(const std::vector<FeatureVector>& features,
                            const Level0Weights& weights);

// Computes the spec's feature matrix for (game, player) and combines it.
// A spec with no features yields the uniform distribution.
MixedStrategy predict_level0(const Level0Spec& spec, const NormalFormGame& game, Role player);

// Named specifications.  Weights default to zero (pure uniform) and are
// normally estimated during fitting.
Level0Spec uniform_spec();
Level0Spec linear4_spec();
Level0Spec linear8_spec();

// uniform | linear4 | linear8, or a path to a spec JSON file.
Level0Spec level0_spec_from_arg(const std::string& name_or_path);

Level0Spec level0_spec_from_json(const std::string& json_text);
std::string level0_spec_to_json(const Level0Spec& spec);

}  // namespace bgt
