#include "bgt/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bgt {

CmaResult cma_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                       const Eigen::VectorXd& x0, double sigma0, int max_evals, Rng& rng) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const int n = static_cast<int>(x0.size());
  CmaResult result;
  result.best_x = x0;
  result.best_f = objective(x0);
  result.evaluations = 1;
  result.trace.push_back(result.best_f);
  if (n == 0 || max_evals <= 1) return result;

  const int lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i)
    weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(static_cast<double>(n)) *
                       (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  VectorXd mean = x0;
  double sigma = sigma0;
  MatrixXd C = MatrixXd::Identity(n, n);
  MatrixXd B = MatrixXd::Identity(n, n);
  VectorXd D = VectorXd::Ones(n);
  VectorXd p_sigma = VectorXd::Zero(n);
  VectorXd p_c = VectorXd::Zero(n);
  int generation = 0;

  std::vector<VectorXd> ys(lambda), xs(lambda);
  std::vector<double> fs(lambda);
  std::vector<int> order(lambda);

  while (result.evaluations < max_evals) {
    ++generation;
    const int batch = std::min(lambda, max_evals - result.evaluations);
    for (int k = 0; k < batch; ++k) {
      VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      ys[k] = B * (D.asDiagonal() * z);
      xs[k] = mean + sigma * ys[k];
      fs[k] = objective(xs[k]);
      ++result.evaluations;
      if (fs[k] < result.best_f) {
        result.best_f = fs[k];
        result.best_x = xs[k];
      }
    }
    result.trace.push_back(result.best_f);
    if (batch < lambda) break;  // budget exhausted mid-generation: no update

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });

    VectorXd y_w = VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean += sigma * y_w;

    // C^{ -1/2 } y_w = B D^{-1} B^T y_w
    VectorXd c_inv_sqrt_yw = B * (D.cwiseInverse().asDiagonal() * (B.transpose() * y_w));
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_yw;
    const double ps_norm = p_sigma.norm();
    const bool h_sigma =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * generation)) <
        (1.4 + 2.0 / (n + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c +
          (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * (ys[order[i]] * ys[order[i]].transpose());
    const double delta_h = (1.0 - (h_sigma ? 1.0 : 0.0)) * c_c * (2.0 - c_c);
    C = (1.0 - c_1 - c_mu) * C + c_1 * (p_c * p_c.transpose() + delta_h * C) + c_mu * rank_mu;

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
    sigma = std::clamp(sigma, 1e-12, 1e6);

    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
    if (eig.info() != Eigen::Success) {  // reset on numerical breakdown
      C = MatrixXd::Identity(n, n);
      B = MatrixXd::Identity(n, n);
      D = VectorXd::Ones(n);
      p_sigma.setZero();
      p_c.setZero();
      continue;
    }
    B = eig.eigenvectors();
    D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();

    if (sigma * D.maxCoeff() < 1e-11) break;  // converged
  }
  return result;
}

}  // namespace bgt
