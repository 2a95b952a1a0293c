#include "bgt/param_space.hpp"

#include <cmath>

namespace bgt {

namespace {

constexpr double kLogClamp = 30.0;  // exp argument bound; keeps decode finite

double sigmoid(double y) { return 1.0 / (1.0 + std::exp(-y)); }

double clamped_exp(double y) { return std::exp(std::clamp(y, -kLogClamp, kLogClamp)); }

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

// softmax of [y_0..y_{K-1}, 0]; returns the K non-slack components, with the
// slack probability written to *slack.
std::vector<double> softmax_with_slack(const double* y, size_t k, double* slack) {
  double top = 0.0;
  for (size_t i = 0; i < k; ++i) top = std::max(top, y[i]);
  double denom = std::exp(-top);
  std::vector<double> out(k);
  for (size_t i = 0; i < k; ++i) {
    out[i] = std::exp(y[i] - top);  // <= 1 by construction
    denom += out[i];
  }
  for (size_t i = 0; i < k; ++i) out[i] /= denom;
  *slack = std::exp(-top) / denom;
  return out;
}

}  // namespace

ParamSpace::ParamSpace(ModelKind kind, std::vector<std::string> feature_names, FixedParams fixed,
                       bool poisson_ch_free_epsilon)
    : kind_(kind), feature_names_(std::move(feature_names)), fixed_(std::move(fixed)) {
  auto add = [&](Block block, const std::string& name) {
    blocks_.push_back(block);
    names_.push_back(name);
  };
  const bool hierarchy = kind != ModelKind::kLevelK;
  if (hierarchy && !fixed_.tau) {
    tau_index_ = dim();
    add(Block::kTau, "tau");
  }
  const bool epsilon_free =
      hierarchy && !fixed_.epsilon &&
      (kind == ModelKind::kSpikePoissonQch || poisson_ch_free_epsilon);
  if (epsilon_free) {
    epsilon_index_ = dim();
    add(Block::kEpsilon, "epsilon");
  }
  if (kind == ModelKind::kSpikePoissonQch && !fixed_.lambda) {
    lambda_index_ = dim();
    add(Block::kLambda, "lambda");
  }
  if (kind == ModelKind::kLevelK) {
    if (!fixed_.level_probs) {
      level_probs_offset_ = dim();
      for (int l = 0; l < kLevelKMaxLevel; ++l)
        add(Block::kLevelProbs, "level_prob_" + std::to_string(l));
    }
    if (!fixed_.error_rate) {
      error_rate_index_ = dim();
      add(Block::kErrorRate, "error_rate");
    }
  }
  if (!fixed_.level0_weights && !feature_names_.empty()) {
    weights_offset_ = dim();
    for (const auto& f : feature_names_) add(Block::kWeights, "w_" + f);
  }
}

ModelParams ParamSpace::decode(const Eigen::VectorXd& y) const {
  if (y.size() != dim()) throw std::invalid_argument("ParamSpace::decode: wrong dimension");
  ModelParams p;
  p.kind = kind_;
  p.spike_poisson.tau = fixed_.tau.value_or(1.0);
  p.spike_poisson.epsilon = fixed_.epsilon.value_or(0.0);
  p.spike_poisson.lambda = fixed_.lambda.value_or(0.0);
  if (tau_index_ >= 0) p.spike_poisson.tau = clamped_exp(y[tau_index_]);
  if (epsilon_index_ >= 0) p.spike_poisson.epsilon = sigmoid(y[epsilon_index_]);
  if (lambda_index_ >= 0) p.spike_poisson.lambda = clamped_exp(y[lambda_index_]);
  if (kind_ == ModelKind::kLevelK) {
    if (fixed_.level_probs) {
      p.level_probs = *fixed_.level_probs;
    } else {
      double slack = 0.0;
      p.level_probs = softmax_with_slack(y.data() + level_probs_offset_, kLevelKMaxLevel, &slack);
      p.level_probs.push_back(slack);
    }
    p.error_rate = fixed_.error_rate.value_or(0.0);
    if (error_rate_index_ >= 0) p.error_rate = sigmoid(y[error_rate_index_]);
  }
  if (fixed_.level0_weights) {
    p.level0_weights = *fixed_.level0_weights;
  } else if (weights_offset_ >= 0) {
    double slack = 0.0;
    p.level0_weights = softmax_with_slack(y.data() + weights_offset_, feature_names_.size(), &slack);
  }
  return p;
}

Eigen::VectorXd ParamSpace::encode(const ModelParams& params) const {
  Eigen::VectorXd y(dim());
  auto logit = [](double x) {
    const double c = std::clamp(x, 1e-12, 1.0 - 1e-12);
    return std::log(c / (1.0 - c));
  };
  if (tau_index_ >= 0) y[tau_index_] = std::log(std::max(params.spike_poisson.tau, 1e-12));
  if (epsilon_index_ >= 0) y[epsilon_index_] = logit(params.spike_poisson.epsilon);
  if (lambda_index_ >= 0) y[lambda_index_] = std::log(std::max(params.spike_poisson.lambda, 1e-12));
  if (level_probs_offset_ >= 0) {
    const double slack = std::max(params.level_probs[kLevelKMaxLevel], 1e-12);
    for (int l = 0; l < kLevelKMaxLevel; ++l)
      y[level_probs_offset_ + l] = std::log(std::max(params.level_probs[l], 1e-12) / slack);
  }
  if (error_rate_index_ >= 0) y[error_rate_index_] = logit(params.error_rate);
  if (weights_offset_ >= 0) {
    double wsum = 0.0;
    for (double w : params.level0_weights) wsum += w;
    const double slack = std::max(1.0 - wsum, 1e-12);
    for (size_t f = 0; f < feature_names_.size(); ++f)
      y[weights_offset_ + f] = std::log(std::max(params.level0_weights[f], 1e-12) / slack);
  }
  return y;
}

double ParamSpace::log_jacobian(const Eigen::VectorXd& y) const {
  const ModelParams p = decode(y);
  double lj = 0.0;
  if (tau_index_ >= 0) lj += safe_log(p.spike_poisson.tau);
  if (epsilon_index_ >= 0)
    lj += safe_log(p.spike_poisson.epsilon) + safe_log(1.0 - p.spike_poisson.epsilon);
  if (lambda_index_ >= 0) lj += safe_log(p.spike_poisson.lambda);
  if (level_probs_offset_ >= 0)
    for (double prob : p.level_probs) lj += safe_log(prob);
  if (error_rate_index_ >= 0) lj += safe_log(p.error_rate) + safe_log(1.0 - p.error_rate);
  if (weights_offset_ >= 0) {
    double wsum = 0.0;
    for (double w : p.level0_weights) {
      lj += safe_log(w);
      wsum += w;
    }
    lj += safe_log(1.0 - wsum);  // slack coordinate
  }
  return lj;
}

bool ParamSpace::in_box(const ModelParams& params, const PriorBox& box) const {
  if (params.spike_poisson.tau > box.tau_max) return false;
  if (params.spike_poisson.lambda > box.lambda_max) return false;
  return true;
}

std::vector<double> ParamSpace::free_values(const ModelParams& params) const {
  std::vector<double> out;
  out.reserve(names_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    switch (blocks_[i]) {
      case Block::kTau: out.push_back(params.spike_poisson.tau); break;
      case Block::kEpsilon: out.push_back(params.spike_poisson.epsilon); break;
      case Block::kLambda: out.push_back(params.spike_poisson.lambda); break;
      case Block::kErrorRate: out.push_back(params.error_rate); break;
      case Block::kLevelProbs:
        out.push_back(params.level_probs[i - level_probs_offset_]);
        break;
      case Block::kWeights:
        out.push_back(params.level0_weights[i - weights_offset_]);
        break;
    }
  }
  return out;
}

Eigen::VectorXd ParamSpace::neutral_init() const {
  ModelParams p;
  p.kind = kind_;
  p.spike_poisson = {1.5, 0.3, 0.2};
  p.level_probs = {0.3, 0.3, 0.2, 0.1, 0.1};
  p.error_rate = 0.2;
  const size_t k = feature_names_.size();
  if (k > 0) p.level0_weights.assign(k, 0.5 / static_cast<double>(k));
  return encode(p);
}

Eigen::VectorXd ParamSpace::random_init(Rng& rng) const {
  Eigen::VectorXd y(dim());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    switch (blocks_[i]) {
      case Block::kTau: y[i] = rng.uniform(std::log(0.25), std::log(2.5)); break;
      case Block::kEpsilon: y[i] = rng.uniform(-2.0, 1.0); break;
      case Block::kLambda: y[i] = rng.uniform(std::log(0.02), std::log(1.0)); break;
      case Block::kErrorRate: y[i] = rng.uniform(-2.0, 0.5); break;
      case Block::kLevelProbs: y[i] = rng.uniform(-1.0, 1.0); break;
      case Block::kWeights: y[i] = rng.uniform(-1.5, 0.5); break;
    }
  }
  return y;
}

}  // namespace bgt
