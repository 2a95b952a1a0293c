#include "bgt/behavioral.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace bgt {

using nlohmann::json;

void SpikePoissonParams::validate() const {
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0, got " + format_double(tau));
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ValidationError("epsilon must be in [0,1], got " + format_double(epsilon));
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0, got " + format_double(lambda));
}

void ModelParams::validate() const {
  spike_poisson.validate();
  for (double w : level0_weights)
    if (!(w >= 0.0 && w <= 1.0))
      throw ValidationError("level-0 weight outside [0,1]: " + format_double(w));
  double wsum = 0.0;
  for (double w : level0_weights) wsum += w;
  if (wsum > 1.0 + 1e-9)
    throw ValidationError("level-0 weights sum to " + format_double(wsum) + " > 1");
  if (kind == ModelKind::kLevelK) {
    if (level_probs.size() != kLevelKMaxLevel + 1)
      throw ValidationError("level_probs must have " + std::to_string(kLevelKMaxLevel + 1) +
                            " entries");
    double psum = 0.0;
    for (double p : level_probs) {
      if (!(p >= 0.0)) throw ValidationError("level_probs contains a negative entry");
      psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9)
      throw ValidationError("level_probs sums to " + format_double(psum));
    if (!(error_rate >= 0.0 && error_rate <= 1.0))
      throw ValidationError("error_rate must be in [0,1], got " + format_double(error_rate));
  }
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "qch") return ModelKind::kSpikePoissonQch;
  if (name == "poisson-ch") return ModelKind::kPoissonCh;
  if (name == "level-k") return ModelKind::kLevelK;
  throw ValidationError("unknown model kind: '" + name + "' (expected qch|poisson-ch|level-k)");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSpikePoissonQch: return "qch";
    case ModelKind::kPoissonCh: return "poisson-ch";
    case ModelKind::kLevelK: return "level-k";
  }
  throw std::logic_error("unknown model kind");
}

std::string model_params_to_json(const ModelParams& p) {
  json doc;
  doc["model"] = model_kind_name(p.kind);
  if (p.kind != ModelKind::kLevelK) {
    doc["tau"] = p.spike_poisson.tau;
    doc["epsilon"] = p.spike_poisson.epsilon;
  }
  if (p.kind == ModelKind::kSpikePoissonQch) doc["lambda"] = p.spike_poisson.lambda;
  if (p.kind == ModelKind::kLevelK) {
    doc["level_probs"] = p.level_probs;
    doc["error_rate"] = p.error_rate;
  }
  doc["level0_weights"] = p.level0_weights;
  return doc.dump(2);
}

ModelParams model_params_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params parse failure: ") + e.what());
  }
  ModelParams p;
  p.kind = model_kind_from_name(doc.value("model", "qch"));
  auto require = [&](const char* field) {
    if (!doc.contains(field))
      throw ValidationError(std::string("params: missing field '") + field + "' for model " +
                            model_kind_name(p.kind));
    return doc[field];
  };
  switch (p.kind) {
    case ModelKind::kSpikePoissonQch:
      p.spike_poisson.tau = require("tau").get<double>();
      p.spike_poisson.epsilon = require("epsilon").get<double>();
      p.spike_poisson.lambda = require("lambda").get<double>();
      break;
    case ModelKind::kPoissonCh:
      p.spike_poisson.tau = require("tau").get<double>();
      p.spike_poisson.epsilon = doc.value("epsilon", 0.0);
      p.spike_poisson.lambda = 0.0;
      break;
    case ModelKind::kLevelK:
      p.level_probs = require("level_probs").get<std::vector<double>>();
      p.error_rate = require("error_rate").get<double>();
      break;
  }
  p.level0_weights = doc.value("level0_weights", std::vector<double>{});
  p.validate();
  return p;
}

MixedStrategy qbr(const NormalFormGame& game, Role player, const MixedStrategy& opponent_strategy,
                  double lambda) {
  const size_t n = game.num_actions(player);
  std::vector<double> score(n);
  for (size_t a = 0; a < n; ++a)
    score[a] = lambda * expected_utility(game, player, a, opponent_strategy);
  const double top = *std::max_element(score.begin(), score.end());
  double total = 0.0;
  for (double& s : score) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : score) s /= total;
  return MixedStrategy{std::move(score)};
}

MixedStrategy best_response(const NormalFormGame& game, Role player,
                            const MixedStrategy& opponent_strategy) {
  const size_t n = game.num_actions(player);
  std::vector<double> eu(n);
  for (size_t a = 0; a < n; ++a) eu[a] = expected_utility(game, player, a, opponent_strategy);
  const double top = *std::max_element(eu.begin(), eu.end());
  std::vector<double> out(n, 0.0);
  size_t ties = 0;
  for (size_t a = 0; a < n; ++a)
    if (eu[a] >= top - 1e-9) {
      out[a] = 1.0;
      ++ties;
    }
  for (double& p : out) p /= static_cast<double>(ties);
  return MixedStrategy{std::move(out)};
}

std::vector<double> level_weights(const SpikePoissonParams& params, int l_max) {
  params.validate();
  if (l_max < 0) throw std::invalid_argument("level_weights: l_max must be >= 0");
  std::vector<double> g(l_max + 1);
  double pois = std::exp(-params.tau);  // Poisson(0; tau); tau=0 gives 1
  double sum = 0.0;
  for (int m = 0; m <= l_max; ++m) {
    g[m] = (1.0 - params.epsilon) * pois + (m == 0 ? params.epsilon : 0.0);
    sum += g[m];
    pois *= params.tau / static_cast<double>(m + 1);
  }
  if (sum <= 0.0) {
    // All mass underflowed past the truncation point (epsilon = 0, huge tau).
    g.assign(l_max + 1, 0.0);
    g[l_max] = 1.0;
    return g;
  }
  for (double& x : g) x /= sum;
  return g;
}

int choose_l_max(const SpikePoissonParams& params) {
  constexpr int kCap = 50;
  double pois = std::exp(-params.tau);
  double cumulative = 0.0;
  for (int m = 0; m <= kCap; ++m) {
    cumulative += (1.0 - params.epsilon) * pois + (m == 0 ? params.epsilon : 0.0);
    if (cumulative >= 1.0 - 1e-9) return m;
    pois *= params.tau / static_cast<double>(m + 1);
  }
  return kCap;
}

MixedStrategy truncated_belief(const std::vector<MixedStrategy>& level_predictions,
                               const std::vector<double>& g, int m) {
  if (m < 1) throw std::invalid_argument("truncated_belief: m must be >= 1");
  if (level_predictions.size() < static_cast<size_t>(m) || g.size() < static_cast<size_t>(m))
    throw std::invalid_argument("truncated_belief: need predictions and weights for levels < m");
  const size_t n = level_predictions[0].size();
  double mass = 0.0;
  for (int l = 0; l < m; ++l) mass += g[l];
  if (mass <= 0.0) return MixedStrategy::uniform(n);
  std::vector<double> mix(n, 0.0);
  for (int l = 0; l < m; ++l)
    for (size_t a = 0; a < n; ++a) mix[a] += g[l] * level_predictions[l][a];
  for (double& p : mix) p /= mass;
  return MixedStrategy{std::move(mix)};
}

namespace {

using StrategyPair = std::pair<MixedStrategy, MixedStrategy>;

// Shared ladder for the two cognitive-hierarchy models: level m responds to
// the opponent's truncated mixture of levels < m, quantally or exactly.
StrategyPair hierarchy_both(const NormalFormGame& game, const ModelParams& params,
                            const MixedStrategy& pi0_row, const MixedStrategy& pi0_col,
                            bool quantal) {
  const int l_max = choose_l_max(params.spike_poisson);
  const std::vector<double> g = level_weights(params.spike_poisson, l_max);

  std::vector<MixedStrategy> row_levels, col_levels;
  row_levels.reserve(l_max + 1);
  col_levels.reserve(l_max + 1);
  row_levels.push_back(pi0_row);
  col_levels.push_back(pi0_col);
  for (int m = 1; m <= l_max; ++m) {
    MixedStrategy row_belief = truncated_belief(col_levels, g, m);
    MixedStrategy col_belief = truncated_belief(row_levels, g, m);
    const double lambda = params.spike_poisson.lambda;
    row_levels.push_back(quantal ? qbr(game, Role::kRow, row_belief, lambda)
                                 : best_response(game, Role::kRow, row_belief));
    col_levels.push_back(quantal ? qbr(game, Role::kCol, col_belief, lambda)
                                 : best_response(game, Role::kCol, col_belief));
  }
  return {truncated_belief(row_levels, g, l_max + 1), truncated_belief(col_levels, g, l_max + 1)};
}

StrategyPair level_k_both(const NormalFormGame& game, const ModelParams& params,
                          const MixedStrategy& pi0_row, const MixedStrategy& pi0_col) {
  const double delta = params.error_rate;
  std::vector<MixedStrategy> row_levels{pi0_row}, col_levels{pi0_col};
  for (int m = 1; m <= kLevelKMaxLevel; ++m) {
    for (Role r : {Role::kRow, Role::kCol}) {
      const auto& opp_prev = (r == Role::kRow ? col_levels : row_levels)[m - 1];
      MixedStrategy br = best_response(game, r, opp_prev);
      const size_t n = br.size();
      for (size_t a = 0; a < n; ++a)
        br.probs[a] = (1.0 - delta) * br.probs[a] + delta / static_cast<double>(n);
      (r == Role::kRow ? row_levels : col_levels).push_back(std::move(br));
    }
  }
  auto mix_levels = [&](const std::vector<MixedStrategy>& levels) {
    const size_t n = levels[0].size();
    std::vector<double> mix(n, 0.0);
    double total = 0.0;
    for (int m = 0; m <= kLevelKMaxLevel; ++m)
      for (size_t a = 0; a < n; ++a) mix[a] += params.level_probs[m] * levels[m][a];
    for (double p : mix) total += p;
    for (double& p : mix) p /= total;
    return MixedStrategy{std::move(mix)};
  };
  return {mix_levels(row_levels), mix_levels(col_levels)};
}

StrategyPair predict_both(const NormalFormGame& game, const ModelParams& params,
                          const Level0Spec& level0) {
  const Level0Spec spec = effective_spec(level0, params);
  return predict_both_with_level0(game, params, predict_level0(spec, game, Role::kRow),
                                  predict_level0(spec, game, Role::kCol));
}

}  // namespace

std::pair<MixedStrategy, MixedStrategy> predict_both_with_level0(const NormalFormGame& game,
                                                                 const ModelParams& params,
                                                                 const MixedStrategy& level0_row,
                                                                 const MixedStrategy& level0_col) {
  params.validate();
  switch (params.kind) {
    case ModelKind::kSpikePoissonQch:
      return hierarchy_both(game, params, level0_row, level0_col, /*quantal=*/true);
    case ModelKind::kPoissonCh:
      return hierarchy_both(game, params, level0_row, level0_col, /*quantal=*/false);
    case ModelKind::kLevelK:
      return level_k_both(game, params, level0_row, level0_col);
  }
  throw std::logic_error("unknown model kind");
}

MixedStrategy qch_predict(const NormalFormGame& game, Role player, const ModelParams& params,
                          const Level0Spec& level0) {
  if (params.kind != ModelKind::kSpikePoissonQch)
    throw std::invalid_argument("qch_predict: params.kind is not qch");
  auto [row, col] = predict_both(game, params, level0);
  return player == Role::kRow ? row : col;
}

MixedStrategy poisson_ch_predict(const NormalFormGame& game, Role player,
                                 const ModelParams& params, const Level0Spec& level0) {
  if (params.kind != ModelKind::kPoissonCh)
    throw std::invalid_argument("poisson_ch_predict: params.kind is not poisson-ch");
  auto [row, col] = predict_both(game, params, level0);
  return player == Role::kRow ? row : col;
}

MixedStrategy level_k_predict(const NormalFormGame& game, Role player, const ModelParams& params,
                              const Level0Spec& level0) {
  if (params.kind != ModelKind::kLevelK)
    throw std::invalid_argument("level_k_predict: params.kind is not level-k");
  auto [row, col] = predict_both(game, params, level0);
  return player == Role::kRow ? row : col;
}

MixedStrategy predict(const NormalFormGame& game, Role player, const ModelParams& params,
                      const Level0Spec& level0) {
  auto [row, col] = predict_both(game, params, level0);
  return player == Role::kRow ? row : col;
}

Level0Spec effective_spec(const Level0Spec& spec, const ModelParams& params) {
  if (params.level0_weights.empty()) return spec;
  if (params.level0_weights.size() != spec.kinds.size())
    throw ValidationError("params carry " + std::to_string(params.level0_weights.size()) +
                          " level-0 weights but spec '" + spec.name + "' has " +
                          std::to_string(spec.kinds.size()) + " features");
  Level0Spec out = spec;
  out.weights.w = params.level0_weights;
  return out;
}

}  // namespace bgt
