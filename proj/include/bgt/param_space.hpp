#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bgt/behavioral.hpp"
#include "bgt/rng.hpp"

namespace bgt {

// Parameters held constant during fitting or sampling (sub-models).
struct FixedParams {
  std::optional<double> tau;
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<double> error_rate;
  std::optional<std::vector<double>> level_probs;
  std::optional<std::vector<double>> level0_weights;
};

// Box for the flat prior in original coordinates.  Lower bounds are zero,
// epsilon/error_rate live in [0,1], and weights on the simplex by
// construction; only the open-ended upper bounds are configurable.
struct PriorBox {
  double tau_max = 10.0;
  double lambda_max = 5.0;
};

// Bijection between an unconstrained search vector y and ModelParams:
// tau = exp(y), epsilon = sigmoid(y), lambda = exp(y), level-0 weights and
// level-k population via softmax with an implicit slack coordinate.  The
// same transforms serve the likelihood optimizer and the posterior sampler
// (which adds the Jacobian so its flat prior is flat in original space).
class ParamSpace {
 public:
  ParamSpace(ModelKind kind, std::vector<std::string> feature_names, FixedParams fixed = {},
             bool poisson_ch_free_epsilon = false);

  int dim() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& param_names() const { return names_; }
  ModelKind kind() const { return kind_; }

  ModelParams decode(const Eigen::VectorXd& y) const;
  Eigen::VectorXd encode(const ModelParams& params) const;
  double log_jacobian(const Eigen::VectorXd& y) const;
  bool in_box(const ModelParams& params, const PriorBox& box) const;

  // Original-space values of the free parameters, in dim order.
  std::vector<double> free_values(const ModelParams& params) const;

  Eigen::VectorXd neutral_init() const;
  Eigen::VectorXd random_init(Rng& rng) const;

 private:
  enum class Block { kTau, kEpsilon, kLambda, kWeights, kLevelProbs, kErrorRate };

  ModelKind kind_;
  std::vector<std::string> feature_names_;
  FixedParams fixed_;
  std::vector<Block> blocks_;          // free blocks in dim order
  std::vector<std::string> names_;     // one name per free dim
  int weights_offset_ = -1;            // dim index of first weight logit, or -1
  int level_probs_offset_ = -1;
  int tau_index_ = -1, epsilon_index_ = -1, lambda_index_ = -1, error_rate_index_ = -1;
};

}  // namespace bgt
