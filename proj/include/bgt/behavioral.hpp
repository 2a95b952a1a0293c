#pragma once

#include <string>
#include <vector>

#include "bgt/game.hpp"
#include "bgt/level0.hpp"

namespace bgt {

// Level distribution parameters: a point mass epsilon at level 0 on top of
// Poisson(tau), plus the quantal-response precision lambda (inverse cents).
struct SpikePoissonParams {
  double tau = 1.0;
  double epsilon = 0.0;
  double lambda = 1.0;

  void validate() const;
};

enum class ModelKind { kSpikePoissonQch, kPoissonCh, kLevelK };

ModelKind model_kind_from_name(const std::string&);
std::string model_kind_name(ModelKind);

inline constexpr int kLevelKMaxLevel = 4;  // population over levels 0..4

struct ModelParams {
  ModelKind kind = ModelKind::kSpikePoissonQch;
  SpikePoissonParams spike_poisson;
  std::vector<double> level0_weights;  // overrides spec weights when nonempty
  // level-k extras
  std::vector<double> level_probs = {1, 0, 0, 0, 0};
  double error_rate = 0.0;

  void validate() const;
};

std::string model_params_to_json(const ModelParams&);
ModelParams model_params_from_json(const std::string& json_text);

// Quantal best response: s(a) proportional to exp(lambda * EU(a)).
// lambda = 0 mixes uniformly; large lambda approaches best response.
MixedStrategy qbr(const NormalFormGame& game, Role player,
                  const MixedStrategy& opponent_strategy, double lambda);

// Exact best response, uniform over the argmax set (ties within 1e-9 cents).
MixedStrategy best_response(const NormalFormGame& game, Role player,
                            const MixedStrategy& opponent_strategy);

// g(0) = eps + (1-eps) Poisson(0; tau), g(m) = (1-eps) Poisson(m; tau),
// truncated at l_max and renormalized to sum to 1.
std::vector<double> level_weights(const SpikePoissonParams& params, int l_max);

// Smallest truncation level with untruncated cumulative mass >= 1 - 1e-9,
// capped at 50.
int choose_l_max(const SpikePoissonParams& params);

// Normalized mixture of level predictions 0..m-1 under weights g; returns
// uniform when the weight mass of those levels is zero.
MixedStrategy truncated_belief(const std::vector<MixedStrategy>& level_predictions,
                               const std::vector<double>& g, int m);

// Spike-Poisson quantal cognitive hierarchy: level m quantally best responds
// to the opponent's truncated mixture of levels < m; the prediction is the
// g-weighted mixture over all levels.
MixedStrategy qch_predict(const NormalFormGame& game, Role player, const ModelParams& params,
                          const Level0Spec& level0);

// Cognitive hierarchy with exact best response at every level >= 1.
MixedStrategy poisson_ch_predict(const NormalFormGame& game, Role player,
                                 const ModelParams& params, const Level0Spec& level0);

// Level-k: level m best responds to level m-1 only, mixed with uniform noise
// at rate error_rate; the population over levels 0..4 is level_probs.
MixedStrategy level_k_predict(const NormalFormGame& game, Role player, const ModelParams& params,
                              const Level0Spec& level0);

// Dispatch on params.kind.
MixedStrategy predict(const NormalFormGame& game, Role player, const ModelParams& params,
                      const Level0Spec& level0);

// Both roles' predictions from precomputed level-0 distributions (the ladder
// couples the two roles, so computing them together costs one ladder).
std::pair<MixedStrategy, MixedStrategy> predict_both_with_level0(const NormalFormGame& game,
                                                                 const ModelParams& params,
                                                                 const MixedStrategy& level0_row,
                                                                 const MixedStrategy& level0_col);

// The spec with weights replaced by params.level0_weights when present.
Level0Spec effective_spec(const Level0Spec& spec, const ModelParams& params);

}  // namespace bgt
