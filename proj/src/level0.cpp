#include "bgt/level0.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bgt {

using nlohmann::json;

double Level0Weights::w0() const {
  double sum = 0.0;
  for (double x : w) sum += x;
  return std::max(0.0, 1.0 - sum);
}

void Level0Weights::validate() const {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0 && x <= 1.0))
      throw ValidationError("level-0 weight " + format_double(x) + " outside [0,1]");
    sum += x;
  }
  if (sum > 1.0 + 1e-9)
    throw ValidationError("level-0 weights sum to " + format_double(sum) + " > 1");
}

void Level0Spec::validate() const {
  weights.validate();
  if (!weights.w.empty() && weights.w.size() != kinds.size())
    throw ValidationError("spec '" + name + "': " + std::to_string(weights.w.size()) +
                          " weights for " + std::to_string(kinds.size()) + " features");
}

namespace {

void check_features(const std::vector<FeatureVector>& features, const Level0Weights& weights) {
  if (features.size() != weights.w.size())
    throw ValidationError("combine: " + std::to_string(features.size()) + " features but " +
                          std::to_string(weights.w.size()) + " weights");
  if (features.empty()) return;
  const size_t n = features[0].size();
  if (n == 0) throw ValidationError("combine: empty feature vector");
  for (const auto& f : features)
    if (f.size() != n) throw ValidationError("combine: feature vectors of unequal length");
}

}  // namespace

MixedStrategy linear_combine(const std::vector<FeatureVector>& features,
                             const Level0Weights& weights) {
  weights.validate();
  check_features(features, weights);
  const size_t n = features.empty() ? 1 : features[0].size();
  const double w0 = weights.w0();
  std::vector<double> mass(n, w0);
  for (size_t f = 0; f < features.size(); ++f)
    for (size_t a = 0; a < n; ++a) {
      if (features[f][a] < 0.0)
        throw ValidationError("linear_combine: negative feature value " +
                              format_double(features[f][a]));
      mass[a] += weights.w[f] * features[f][a];
    }
  double total = 0.0;
  for (double m : mass) total += m;
  if (total <= 0.0) return MixedStrategy::uniform(n);
  for (double& m : mass) m /= total;
  return MixedStrategy{std::move(mass)};
}

MixedStrategy logit_combine(const std::vector<FeatureVector>& features,
                            const Level0Weights& weights) {
  weights.validate();
  check_features(features, weights);
  const size_t n = features.empty() ? 1 : features[0].size();
  std::vector<double> score(n, 0.0);  // w0 is an additive constant; it cancels
  for (size_t f = 0; f < features.size(); ++f)
    for (size_t a = 0; a < n; ++a) score[a] += weights.w[f] * features[f][a];
  const double top = *std::max_element(score.begin(), score.end());
  double total = 0.0;
  for (double& s : score) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : score) s /= total;
  return MixedStrategy{std::move(score)};
}

MixedStrategy predict_level0(const Level0Spec& spec, const NormalFormGame& game, Role player) {
  spec.validate();
  const size_t n = game.num_actions(player);
  if (spec.kinds.empty()) return MixedStrategy::uniform(n);
  Level0Weights weights = spec.weights;
  if (weights.w.empty()) weights.w.assign(spec.kinds.size(), 0.0);
  auto features = feature_matrix(spec.kinds, spec.transforms, spec.combiner, game, player);
  return spec.combiner == CombinerForm::kLinear ? linear_combine(features, weights)
                                                : logit_combine(features, weights);
}

Level0Spec uniform_spec() {
  Level0Spec spec;
  spec.name = "uniform";
  return spec;
}

Level0Spec linear4_spec() {
  Level0Spec spec;
  spec.name = "linear4";
  spec.kinds = {FeatureKind::kMaxmaxBinary, FeatureKind::kMaxminBinary, FeatureKind::kFairBinary,
                FeatureKind::kMaxSymmetricBinary};
  spec.transforms = {true, true};
  spec.combiner = CombinerForm::kLinear;
  spec.weights.w.assign(4, 0.0);
  return spec;
}

Level0Spec linear8_spec() {
  Level0Spec spec = linear4_spec();
  spec.name = "linear8";
  spec.kinds.insert(spec.kinds.end(),
                    {FeatureKind::kMaxReal, FeatureKind::kMinReal, FeatureKind::kUnfairReal,
                     FeatureKind::kSymmetricReal});
  spec.weights.w.assign(8, 0.0);
  return spec;
}

Level0Spec level0_spec_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("level-0 spec parse failure: ") + e.what());
  }
  Level0Spec spec;
  spec.name = doc.value("name", "custom");
  spec.combiner = combiner_from_name(doc.value("combiner", "linear"));
  for (const auto& k : doc.value("kinds", std::vector<std::string>{}))
    spec.kinds.push_back(kind_from_name(k));
  spec.transforms.informativeness = doc.value("informativeness", false);
  spec.transforms.normalized_activation = doc.value("normalized_activation", false);
  spec.weights.w = doc.value("weights", std::vector<double>{});
  if (spec.weights.w.empty()) spec.weights.w.assign(spec.kinds.size(), 0.0);
  spec.validate();
  return spec;
}

std::string level0_spec_to_json(const Level0Spec& spec) {
  json doc;
  doc["name"] = spec.name;
  doc["combiner"] = combiner_name(spec.combiner);
  std::vector<std::string> kinds;
  for (FeatureKind k : spec.kinds) kinds.push_back(kind_name(k));
  doc["kinds"] = kinds;
  doc["informativeness"] = spec.transforms.informativeness;
  doc["normalized_activation"] = spec.transforms.normalized_activation;
  doc["weights"] = spec.weights.w;
  return doc.dump(2);
}

Level0Spec level0_spec_from_arg(const std::string& name_or_path) {
  if (name_or_path == "uniform") return uniform_spec();
  if (name_or_path == "linear4") return linear4_spec();
  if (name_or_path == "linear8") return linear8_spec();
  std::ifstream in(name_or_path);
  if (!in) throw ValidationError("cannot open level-0 spec file: " + name_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return level0_spec_from_json(buf.str());
}

}  // namespace bgt
