#include "bgt/posterior.hpp"

#include <algorithm>
#include <cmath>

namespace bgt {

namespace {

constexpr uint64_t kMhStream = 0x6d686368;  // "mhch"
constexpr double kTargetAcceptance = 0.23;

}  // namespace

PosteriorChain mh_sample(const Dataset& dataset, const ModelConfig& config,
                         const MhOptions& options, uint64_t seed) {
  if (options.iterations <= options.burn_in)
    throw ValidationError("mh_sample requires iterations > burn_in");
  if (options.thinning < 1) throw ValidationError("mh_sample requires thinning >= 1");
  const Dataset normalized = normalize_payoffs(dataset);
  const LikelihoodEvaluator evaluator(normalized, config);
  std::vector<std::string> feature_names;
  for (FeatureKind k : config.level0.kinds) feature_names.push_back(kind_name(k));
  const ParamSpace space(config.kind, feature_names, options.fixed,
                         options.poisson_ch_free_epsilon);
  const int dim = space.dim();
  if (dim == 0) throw ValidationError("mh_sample: no free parameters");

  auto log_target = [&](const Eigen::VectorXd& y, ModelParams* out_params) {
    ModelParams params = space.decode(y);
    if (!space.in_box(params, options.box)) return -std::numeric_limits<double>::infinity();
    const double ll = evaluator.eval(params).value;
    const double lj = space.log_jacobian(y);
    if (out_params) *out_params = std::move(params);
    return ll + lj;
  };

  Rng rng(derive_seed(seed, kMhStream));
  Eigen::VectorXd y = space.neutral_init();
  ModelParams current_params;
  double current = log_target(y, &current_params);

  PosteriorChain chain;
  chain.kind = config.kind;
  chain.param_names = space.param_names();
  chain.iterations = options.iterations;
  chain.burn_in = options.burn_in;
  chain.thinning = options.thinning;
  chain.seed = seed;
  chain.box = options.box;

  Eigen::VectorXd coord_scale = Eigen::VectorXd::Constant(dim, 0.3);
  double global_scale = 1.0;

  // running moments of the chain during burn-in, for per-coordinate scales
  Eigen::VectorXd run_mean = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd run_m2 = Eigen::VectorXd::Zero(dim);
  long long run_n = 0;

  long long accepted_post = 0;
  long long proposals_post = 0;

  Eigen::VectorXd proposal(dim);
  for (long long it = 0; it < options.iterations; ++it) {
    for (int i = 0; i < dim; ++i)
      proposal[i] = y[i] + global_scale * coord_scale[i] * rng.normal();
    ModelParams prop_params;
    const double cand = log_target(proposal, &prop_params);
    const bool accept = std::log(std::max(rng.uniform(), 1e-300)) < cand - current;
    if (accept) {
      y = proposal;
      current = cand;
      current_params = std::move(prop_params);
    }

    const bool in_burn_in = it < options.burn_in;
    if (in_burn_in) {
      // Robbins-Monro step-size adaptation toward the target acceptance rate
      const double gamma = 2.0 / std::sqrt(static_cast<double>(it) + 10.0);
      global_scale *= std::exp(gamma * ((accept ? 1.0 : 0.0) - kTargetAcceptance));
      global_scale = std::clamp(global_scale, 1e-4, 1e4);
      ++run_n;
      for (int i = 0; i < dim; ++i) {
        const double d = y[i] - run_mean[i];
        run_mean[i] += d / static_cast<double>(run_n);
        run_m2[i] += d * (y[i] - run_mean[i]);
      }
      if (run_n >= 500 && (it + 1) % 500 == 0) {
        for (int i = 0; i < dim; ++i) {
          const double sd = std::sqrt(run_m2[i] / static_cast<double>(run_n - 1));
          coord_scale[i] = std::clamp(sd, 1e-3, 10.0);
        }
      }
    } else {
      ++proposals_post;
      if (accept) ++accepted_post;
      const long long since_burn = it - options.burn_in;
      if ((since_burn + 1) % options.thinning == 0) {
        chain.sample_params.push_back(current_params);
        chain.samples.push_back(space.free_values(current_params));
      }
    }
  }
  chain.acceptance_rate =
      proposals_post > 0 ? static_cast<double>(accepted_post) / proposals_post : 0.0;
  return chain;
}

double MarginalCdf::quantile(double q) const {
  if (sorted_values.empty()) throw ValidationError("quantile of empty marginal");
  const double n = static_cast<double>(sorted_values.size());
  long long idx = static_cast<long long>(std::ceil(q * n)) - 1;
  idx = std::clamp<long long>(idx, 0, sorted_values.size() - 1);
  return sorted_values[static_cast<size_t>(idx)];
}

double MarginalCdf::cdf_at(double x) const {
  auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

MarginalCdf marginal_cdf(const PosteriorChain& chain, const std::string& selector) {
  if (chain.sample_params.empty()) throw ValidationError("marginal_cdf of empty chain");
  MarginalCdf out;
  out.selector = selector;
  out.sorted_values.reserve(chain.sample_params.size());

  if (selector.size() == 2 && selector[0] == 'g' && selector[1] >= '0' && selector[1] <= '3') {
    const int level = selector[1] - '0';
    for (const auto& p : chain.sample_params) {
      const int l_max = choose_l_max(p.spike_poisson);
      const std::vector<double> g = level_weights(p.spike_poisson, l_max);
      out.sorted_values.push_back(level <= l_max ? g[level] : 0.0);
    }
  } else if (selector == "w0") {
    for (const auto& p : chain.sample_params) {
      double sum = 0.0;
      for (double w : p.level0_weights) sum += w;
      out.sorted_values.push_back(std::max(0.0, 1.0 - sum));
    }
  } else {
    auto it = std::find(chain.param_names.begin(), chain.param_names.end(), selector);
    if (it == chain.param_names.end())
      throw ValidationError("unknown marginal selector: '" + selector + "'");
    const size_t idx = static_cast<size_t>(it - chain.param_names.begin());
    for (const auto& s : chain.samples) out.sorted_values.push_back(s[idx]);
  }
  std::sort(out.sorted_values.begin(), out.sorted_values.end());
  return out;
}

}  // namespace bgt
