#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bgt/rng.hpp"

namespace bgt {

struct CmaResult {
  Eigen::VectorXd best_x;
  double best_f = 0.0;
  int evaluations = 0;
  std::vector<double> trace;  // best-so-far objective after each generation
};

// Covariance matrix adaptation evolution strategy (minimization).  Rank-mu
// update with cumulative step-size adaptation; the initial mean x0 is always
// evaluated first, so max_evals = 1 returns f(x0).
CmaResult cma_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const Eigen::VectorXd& x0, double sigma0, int max_evals, Rng& rng);

}  // namespace bgt
