#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bgt/features.hpp"
#include "bgt/game.hpp"
#include "bgt/rng.hpp"

namespace bgt::testing {

inline NormalFormGame make_game(const std::string& id,
                                const std::vector<std::vector<double>>& row_payoffs,
                                const std::vector<std::vector<double>>& col_payoffs) {
  NormalFormGame g;
  g.id = id;
  g.row_payoffs = Matrix::from_rows(row_payoffs);
  g.col_payoffs = Matrix::from_rows(col_payoffs);
  for (size_t a = 0; a < g.row_payoffs.rows(); ++a) g.row_actions.push_back("r" + std::to_string(a));
  for (size_t a = 0; a < g.row_payoffs.cols(); ++a) g.col_actions.push_back("c" + std::to_string(a));
  g.validate();
  return g;
}

// Prisoner's dilemma: actions (C, D), row payoffs [[3,0],[5,1]], symmetric.
inline NormalFormGame prisoners_dilemma() {
  return make_game("pd", {{3, 0}, {5, 1}}, {{3, 5}, {0, 1}});
}

inline NormalFormGame matching_pennies() {
  return make_game("mp", {{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
}

inline NormalFormGame random_game(Rng& rng, size_t n_rows, size_t n_cols, double lo, double hi,
                                  bool integer_payoffs = false) {
  NormalFormGame g;
  g.id = "rand";
  g.row_payoffs = Matrix(n_rows, n_cols);
  g.col_payoffs = Matrix(n_rows, n_cols);
  for (size_t r = 0; r < n_rows; ++r)
    for (size_t c = 0; c < n_cols; ++c) {
      double a = rng.uniform(lo, hi);
      double b = rng.uniform(lo, hi);
      if (integer_payoffs) {
        a = std::floor(a);
        b = std::floor(b);
      }
      g.row_payoffs(r, c) = a;
      g.col_payoffs(r, c) = b;
    }
  for (size_t a = 0; a < n_rows; ++a) g.row_actions.push_back("r" + std::to_string(a));
  for (size_t a = 0; a < n_cols; ++a) g.col_actions.push_back("c" + std::to_string(a));
  return g;
}

// Straight-line reference ladder with uniform level-0, written directly from
// the model definition (no shared code with the library implementation).
inline std::vector<double> reference_qch(const NormalFormGame& g, Role player, double tau,
                                  double epsilon, double lambda) {
  const size_t n_row = g.row_actions.size(), n_col = g.col_actions.size();
  int l_max = 0;
  {
    double cum = 0.0;
    for (int m = 0; m <= 50; ++m) {
      const double pois = std::exp(-tau) * std::pow(tau, m) / std::tgamma(m + 1.0);
      cum += (m == 0 ? epsilon + (1 - epsilon) * pois : (1 - epsilon) * pois);
      l_max = m;
      if (cum >= 1.0 - 1e-9) break;
    }
  }
  std::vector<double> g_weights(l_max + 1);
  double g_sum = 0.0;
  for (int m = 0; m <= l_max; ++m) {
    const double pois = std::exp(-tau) * std::pow(tau, m) / std::tgamma(m + 1.0);
    g_weights[m] = (m == 0 ? epsilon + (1 - epsilon) * pois : (1 - epsilon) * pois);
    g_sum += g_weights[m];
  }
  for (double& w : g_weights) w /= g_sum;

  std::vector<std::vector<double>> row_levels{std::vector<double>(n_row, 1.0 / n_row)};
  std::vector<std::vector<double>> col_levels{std::vector<double>(n_col, 1.0 / n_col)};
  for (int m = 1; m <= l_max; ++m) {
    double mass = 0.0;
    for (int l = 0; l < m; ++l) mass += g_weights[l];
    std::vector<double> row_belief(n_col, 0.0), col_belief(n_row, 0.0);
    for (int l = 0; l < m; ++l) {
      for (size_t a = 0; a < n_col; ++a) row_belief[a] += g_weights[l] * col_levels[l][a] / mass;
      for (size_t a = 0; a < n_row; ++a) col_belief[a] += g_weights[l] * row_levels[l][a] / mass;
    }
    std::vector<double> row_next(n_row), col_next(n_col);
    double row_denom = 0.0, col_denom = 0.0;
    for (size_t a = 0; a < n_row; ++a) {
      double eu = 0.0;
      for (size_t o = 0; o < n_col; ++o) eu += row_belief[o] * g.row_payoffs(a, o);
      row_next[a] = std::exp(lambda * eu);
      row_denom += row_next[a];
    }
    for (size_t a = 0; a < n_col; ++a) {
      double eu = 0.0;
      for (size_t o = 0; o < n_row; ++o) eu += col_belief[o] * g.col_payoffs(o, a);
      col_next[a] = std::exp(lambda * eu);
      col_denom += col_next[a];
    }
    for (double& v : row_next) v /= row_denom;
    for (double& v : col_next) v /= col_denom;
    row_levels.push_back(row_next);
    col_levels.push_back(col_next);
  }
  const auto& own = player == Role::kRow ? row_levels : col_levels;
  const size_t n = player == Role::kRow ? n_row : n_col;
  std::vector<double> out(n, 0.0);
  double mass = 0.0;
  for (int m = 0; m <= l_max; ++m) mass += g_weights[m];
  for (int m = 0; m <= l_max; ++m)
    for (size_t a = 0; a < n; ++a) out[a] += g_weights[m] * own[m][a] / mass;
  return out;
}

// Kolmogorov-Smirnov statistic of sorted samples against a cdf.
template <typename Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(i / n - f));
  }
  return d;
}

}  // namespace bgt::testing

// Brute-force reference implementations of the action features, written
// directly from their defining formulas over explicit profile enumerations.
// Kept independent of the library implementations they are used to check.
namespace bgt::oracle {

inline double u_of(const NormalFormGame& g, Role who, size_t row_action, size_t col_action) {
  return who == Role::kRow ? g.row_payoffs(row_action, col_action)
                           : g.col_payoffs(row_action, col_action);
}

// Enumerates profiles (r, c); own index of `p` is r for the row player and c
// for the column player.
inline std::vector<double> feature(FeatureKind kind, CombinerForm comb, const NormalFormGame& g,
                                   Role p) {
  const size_t n_rows = g.row_payoffs.rows();
  const size_t n_cols = g.row_payoffs.cols();
  const size_t n = p == Role::kRow ? n_rows : n_cols;
  const double inf = std::numeric_limits<double>::infinity();
  const double tol = 1e-9;
  std::vector<double> out(n, 0.0);

  auto own_index = [&](size_t r, size_t c) { return p == Role::kRow ? r : c; };
  auto per_action_min = [&](auto&& value) {
    std::vector<double> acc(n, inf);
    for (size_t r = 0; r < n_rows; ++r)
      for (size_t c = 0; c < n_cols; ++c) {
        const size_t a = own_index(r, c);
        acc[a] = std::min(acc[a], value(r, c));
      }
    return acc;
  };
  auto per_action_max = [&](auto&& value) {
    std::vector<double> acc(n, -inf);
    for (size_t r = 0; r < n_rows; ++r)
      for (size_t c = 0; c < n_cols; ++c) {
        const size_t a = own_index(r, c);
        acc[a] = std::max(acc[a], value(r, c));
      }
    return acc;
  };
  auto mark_argmax = [&](const std::vector<double>& vals) {
    double best = -inf;
    for (double v : vals) best = std::max(best, v);
    for (size_t a = 0; a < n; ++a) out[a] = vals[a] >= best - tol ? 1.0 : 0.0;
  };
  auto mark_argmin = [&](const std::vector<double>& vals) {
    double best = inf;
    for (double v : vals) best = std::min(best, v);
    for (size_t a = 0; a < n; ++a) out[a] = vals[a] <= best + tol ? 1.0 : 0.0;
  };
  auto inv = [&](std::vector<double> vals) {
    for (double& v : vals)
      v = comb == CombinerForm::kLinear ? 1.0 / std::max(v, 1e-6) : -v;
    return vals;
  };
  auto shifted = [&](std::vector<double> vals, double shift) {
    if (comb == CombinerForm::kLinear)
      for (double& v : vals) v -= shift;
    return vals;
  };
  auto own_payoff = [&](size_t r, size_t c) { return u_of(g, p, r, c); };
  auto unfairness = [&](size_t r, size_t c) {
    return std::abs(u_of(g, Role::kRow, r, c) - u_of(g, Role::kCol, r, c));
  };
  auto welfare = [&](size_t r, size_t c) {
    return u_of(g, Role::kRow, r, c) + u_of(g, Role::kCol, r, c);
  };
  auto min_over_profiles = [&](auto&& value) {
    double v = inf;
    for (size_t r = 0; r < n_rows; ++r)
      for (size_t c = 0; c < n_cols; ++c) v = std::min(v, value(r, c));
    return v;
  };
  bool symmetric = n_rows == n_cols;
  if (symmetric)
    for (size_t r = 0; r < n_rows && symmetric; ++r)
      for (size_t c = 0; c < n_cols && symmetric; ++c)
        if (g.col_payoffs(r, c) != g.row_payoffs(c, r)) symmetric = false;

  // regret of own action at profile: u - best reply utility (nonnegative form)
  auto regret = [&](size_t r, size_t c) {
    double best = -inf;
    for (size_t a = 0; a < n; ++a)
      best = std::max(best, p == Role::kRow ? u_of(g, p, a, c) : u_of(g, p, r, a));
    return best - u_of(g, p, r, c);
  };

  switch (kind) {
    case FeatureKind::kMaxminBinary: mark_argmax(per_action_min(own_payoff)); break;
    case FeatureKind::kMinReal:
      out = shifted(per_action_min(own_payoff), min_over_profiles(own_payoff));
      break;
    case FeatureKind::kMaxmaxBinary: mark_argmax(per_action_max(own_payoff)); break;
    case FeatureKind::kMaxReal:
      out = shifted(per_action_max(own_payoff), min_over_profiles(own_payoff));
      break;
    case FeatureKind::kMinimaxRegretBinary: mark_argmin(per_action_max(regret)); break;
    case FeatureKind::kMaxRegretReal: out = inv(per_action_max(regret)); break;
    case FeatureKind::kFairBinary: mark_argmin(per_action_min(unfairness)); break;
    case FeatureKind::kUnfairReal: out = inv(per_action_min(unfairness)); break;
    case FeatureKind::kMaxSymmetricBinary: {
      if (!symmetric) break;
      std::vector<double> diag(n);
      for (size_t a = 0; a < n; ++a) diag[a] = u_of(g, p, a, a);
      mark_argmax(diag);
      break;
    }
    case FeatureKind::kSymmetricReal: {
      if (!symmetric) break;
      std::vector<double> diag(n);
      for (size_t a = 0; a < n; ++a) diag[a] = u_of(g, p, a, a);
      out = shifted(std::move(diag), min_over_profiles(own_payoff));
      break;
    }
    case FeatureKind::kWelfareBinary: mark_argmax(per_action_max(welfare)); break;
    case FeatureKind::kWelfareReal:
      out = shifted(per_action_max(welfare), min_over_profiles(welfare));
      break;
  }
  return out;
}

}  // namespace bgt::oracle
