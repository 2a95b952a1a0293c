#pragma once

#include <string>
#include <vector>

#include "bgt/game.hpp"

namespace bgt {

// The six action features, each in a binary (argmax/argmin membership) and a
// real-valued variant.
enum class FeatureKind {
  kMaxminBinary,
  kMinReal,
  kMaxmaxBinary,
  kMaxReal,
  kMinimaxRegretBinary,
  kMaxRegretReal,
  kFairBinary,
  kUnfairReal,
  kMaxSymmetricBinary,
  kSymmetricReal,
  kWelfareBinary,
  kWelfareReal,
};

inline constexpr FeatureKind kAllFeatureKinds[] = {
    FeatureKind::kMaxminBinary,        FeatureKind::kMinReal,
    FeatureKind::kMaxmaxBinary,        FeatureKind::kMaxReal,
    FeatureKind::kMinimaxRegretBinary, FeatureKind::kMaxRegretReal,
    FeatureKind::kFairBinary,          FeatureKind::kUnfairReal,
    FeatureKind::kMaxSymmetricBinary,  FeatureKind::kSymmetricReal,
    FeatureKind::kWelfareBinary,       FeatureKind::kWelfareReal,
};

bool is_binary_kind(FeatureKind kind);
std::string kind_name(FeatureKind kind);          // canonical lowercase name
FeatureKind kind_from_name(const std::string&);   // throws ValidationError

// How feature values will be combined into a distribution; decides the inv
// transformation applied to minimized quantities (1/x for linear, -x for
// logit) and whether payoff-valued features are shifted into R+.
enum class CombinerForm { kLinear, kLogit };

CombinerForm combiner_from_name(const std::string&);
std::string combiner_name(CombinerForm);

using FeatureVector = std::vector<double>;

struct TransformFlags {
  bool informativeness = false;
  bool normalized_activation = false;
};

// Absolute tolerance on payoff comparisons when forming argmax/argmin sets.
inline constexpr double kTieTolerance = 1e-9;

// Nonnegative forgone utility: loss(a, o) = max_a' u(a', o) - u(a, o).
// Every opponent-action column contains at least one zero.
Matrix regret_loss(const NormalFormGame& game, Role player);

// 0/1 membership in the defining argmax/argmin set.  Ties within
// kTieTolerance all receive 1.  The max-symmetric feature is identically
// zero on asymmetric games.
FeatureVector binary_feature(FeatureKind kind, const NormalFormGame& game, Role player);

// Real-valued variant.  Minimized quantities (max regret, unfairness) pass
// through inv; for the linear form, payoff-valued features are shifted by
// the game's minimum relevant value so all outputs are nonnegative.
FeatureVector real_feature(FeatureKind kind, CombinerForm combiner,
                           const NormalFormGame& game, Role player);

// Zeroes a feature whose value is identical for every action.
FeatureVector informativeness_transform(FeatureVector f);

// Rescales nonnegative values to sum to 1; an all-zero vector stays zero.
FeatureVector normalized_activation_transform(FeatureVector f);

// One vector per kind, transforms applied in order:
// raw -> informativeness -> normalized activation.
std::vector<FeatureVector> feature_matrix(const std::vector<FeatureKind>& kinds,
                                          TransformFlags transforms, CombinerForm combiner,
                                          const NormalFormGame& game, Role player);

namespace detail {
// Allocation-free kernel behind binary_feature/real_feature; `out` must hold
// one slot per action of `player`.  Exposed for bulk sweeps over many games.
void feature_into(FeatureKind kind, CombinerForm combiner, const NormalFormGame& game,
                  Role player, double* out);
}  // namespace detail

}  // namespace bgt
