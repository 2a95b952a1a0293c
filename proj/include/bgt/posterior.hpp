#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bgt/estimation.hpp"

namespace bgt {

struct MhOptions {
  long long iterations = 100000;  // total steps, including burn-in
  long long burn_in = 20000;
  int thinning = 10;
  PriorBox box;
  FixedParams fixed;
  bool poisson_ch_free_epsilon = false;
};

struct PosteriorChain {
  ModelKind kind = ModelKind::kSpikePoissonQch;
  std::vector<std::string> param_names;           // free parameters, original space
  std::vector<std::vector<double>> samples;       // kept samples, original space
  std::vector<ModelParams> sample_params;         // full parameter sets per kept sample
  double acceptance_rate = 0.0;                   // after burn-in
  long long iterations = 0;
  long long burn_in = 0;
  int thinning = 1;
  uint64_t seed = 0;
  PriorBox box;
};

// Random-walk Metropolis over the transformed parameter space, targeting
// likelihood x flat prior on the bounded original space (Jacobian-corrected).
// Proposal scales adapt only during burn-in.  Deterministic given seed.
PosteriorChain mh_sample(const Dataset& dataset, const ModelConfig& config,
                         const MhOptions& options, uint64_t seed);

// Sorted sample of one scalar quantity from a chain.
struct MarginalCdf {
  std::string selector;
  std::vector<double> sorted_values;

  // order statistic: the ceil(q*n)-th smallest value
  double quantile(double q) const;
  double median() const { return quantile(0.5); }
  // P(X <= x) under the empirical distribution
  double cdf_at(double x) const;
};

// Selectors: any free parameter name from the chain (e.g. "tau", "lambda",
// "w_fair_binary"), "w0", or "g0".."g3" for the truncated-renormalized level
// weights computed from each sample's tau and epsilon.
MarginalCdf marginal_cdf(const PosteriorChain& chain, const std::string& selector);

}  // namespace bgt
