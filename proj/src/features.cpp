#include "bgt/features.hpp"

#include <algorithm>
#include <cmath>

namespace bgt {

namespace {

constexpr double kInvEpsilon = 1e-6;  // guard for 1/x at zero regret/unfairness
constexpr size_t kStackActions = 32;

struct Scratch {
  double stack[kStackActions];
  double stack2[kStackActions];
  std::vector<double> heap;
  std::vector<double> heap2;
  double* get(size_t n) {
    if (n <= kStackActions) return stack;
    heap.resize(n);
    return heap.data();
  }
  // second buffer, safe to use alongside get()
  double* get2(size_t n) {
    if (n <= kStackActions) return stack2;
    heap2.resize(n);
    return heap2.data();
  }
};

void argmax_set(const double* vals, size_t n, double* out) {
  double best = vals[0];
  for (size_t i = 1; i < n; ++i) best = std::max(best, vals[i]);
  for (size_t i = 0; i < n; ++i) out[i] = vals[i] >= best - kTieTolerance ? 1.0 : 0.0;
}

void argmin_set(const double* vals, size_t n, double* out) {
  double best = vals[0];
  for (size_t i = 1; i < n; ++i) best = std::min(best, vals[i]);
  for (size_t i = 0; i < n; ++i) out[i] = vals[i] <= best + kTieTolerance ? 1.0 : 0.0;
}

void min_payoff_per_action(const NormalFormGame& g, Role p, double* out) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  for (size_t a = 0; a < n; ++a) {
    double v = g.payoff(p, a, 0);
    for (size_t o = 1; o < m; ++o) v = std::min(v, g.payoff(p, a, o));
    out[a] = v;
  }
}

void max_payoff_per_action(const NormalFormGame& g, Role p, double* out) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  for (size_t a = 0; a < n; ++a) {
    double v = g.payoff(p, a, 0);
    for (size_t o = 1; o < m; ++o) v = std::max(v, g.payoff(p, a, o));
    out[a] = v;
  }
}

// max_o [max_a' u(a',o) - u(a,o)] per action a.
void max_regret_per_action(const NormalFormGame& g, Role p, double* out, Scratch& scratch) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  double* colmax = scratch.get2(m);  // must not alias out
  for (size_t o = 0; o < m; ++o) {
    double v = g.payoff(p, 0, o);
    for (size_t a = 1; a < n; ++a) v = std::max(v, g.payoff(p, a, o));
    colmax[o] = v;
  }
  for (size_t a = 0; a < n; ++a) {
    double worst = 0.0;
    for (size_t o = 0; o < m; ++o) worst = std::max(worst, colmax[o] - g.payoff(p, a, o));
    out[a] = worst;
  }
}

// min_o |u_i - u_j| over profiles reachable with action a.
void min_unfairness_per_action(const NormalFormGame& g, Role p, double* out) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  const Role q = other(p);
  for (size_t a = 0; a < n; ++a) {
    double v = std::abs(g.payoff(p, a, 0) - g.payoff(q, 0, a));
    for (size_t o = 1; o < m; ++o)
      v = std::min(v, std::abs(g.payoff(p, a, o) - g.payoff(q, o, a)));
    out[a] = v;
  }
}

// max_o [u_i + u_j] over profiles reachable with action a.
void max_welfare_per_action(const NormalFormGame& g, Role p, double* out) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  const Role q = other(p);
  for (size_t a = 0; a < n; ++a) {
    double v = g.payoff(p, a, 0) + g.payoff(q, 0, a);
    for (size_t o = 1; o < m; ++o) v = std::max(v, g.payoff(p, a, o) + g.payoff(q, o, a));
    out[a] = v;
  }
}

double min_own_payoff(const NormalFormGame& g, Role p) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  double v = g.payoff(p, 0, 0);
  for (size_t a = 0; a < n; ++a)
    for (size_t o = 0; o < m; ++o) v = std::min(v, g.payoff(p, a, o));
  return v;
}

double min_welfare(const NormalFormGame& g, Role p) {
  const size_t n = g.num_actions(p), m = g.num_actions(other(p));
  const Role q = other(p);
  double v = g.payoff(p, 0, 0) + g.payoff(q, 0, 0);
  for (size_t a = 0; a < n; ++a)
    for (size_t o = 0; o < m; ++o) v = std::min(v, g.payoff(p, a, o) + g.payoff(q, o, a));
  return v;
}

double inv_transform(double x, CombinerForm combiner) {
  return combiner == CombinerForm::kLinear ? 1.0 / std::max(x, kInvEpsilon) : -x;
}

}  // namespace

namespace detail {

void feature_into(FeatureKind kind, CombinerForm combiner, const NormalFormGame& g, Role p,
                  double* out) {
  const size_t n = g.num_actions(p);
  Scratch scratch;
  switch (kind) {
    case FeatureKind::kMaxminBinary: {
      double* vals = scratch.get(n);
      min_payoff_per_action(g, p, vals);
      argmax_set(vals, n, out);
      return;
    }
    case FeatureKind::kMinReal: {
      min_payoff_per_action(g, p, out);
      if (combiner == CombinerForm::kLinear) {
        const double shift = min_own_payoff(g, p);
        for (size_t a = 0; a < n; ++a) out[a] -= shift;
      }
      return;
    }
    case FeatureKind::kMaxmaxBinary: {
      double* vals = scratch.get(n);
      max_payoff_per_action(g, p, vals);
      argmax_set(vals, n, out);
      return;
    }
    case FeatureKind::kMaxReal: {
      max_payoff_per_action(g, p, out);
      if (combiner == CombinerForm::kLinear) {
        const double shift = min_own_payoff(g, p);
        for (size_t a = 0; a < n; ++a) out[a] -= shift;
      }
      return;
    }
    case FeatureKind::kMinimaxRegretBinary: {
      double* vals = scratch.get(n);
      max_regret_per_action(g, p, vals, scratch);
      argmin_set(vals, n, out);
      return;
    }
    case FeatureKind::kMaxRegretReal: {
      max_regret_per_action(g, p, out, scratch);
      for (size_t a = 0; a < n; ++a) out[a] = inv_transform(out[a], combiner);
      return;
    }
    case FeatureKind::kFairBinary: {
      double* vals = scratch.get(n);
      min_unfairness_per_action(g, p, vals);
      argmin_set(vals, n, out);
      return;
    }
    case FeatureKind::kUnfairReal: {
      min_unfairness_per_action(g, p, out);
      for (size_t a = 0; a < n; ++a) out[a] = inv_transform(out[a], combiner);
      return;
    }
    case FeatureKind::kMaxSymmetricBinary: {
      if (!is_symmetric(g)) {
        std::fill(out, out + n, 0.0);
        return;
      }
      double* vals = scratch.get(n);
      for (size_t a = 0; a < n; ++a) vals[a] = g.payoff(p, a, a);
      argmax_set(vals, n, out);
      return;
    }
    case FeatureKind::kSymmetricReal: {
      if (!is_symmetric(g)) {
        std::fill(out, out + n, 0.0);
        return;
      }
      for (size_t a = 0; a < n; ++a) out[a] = g.payoff(p, a, a);
      if (combiner == CombinerForm::kLinear) {
        const double shift = min_own_payoff(g, p);
        for (size_t a = 0; a < n; ++a) out[a] -= shift;
      }
      return;
    }
    case FeatureKind::kWelfareBinary: {
      double* vals = scratch.get(n);
      max_welfare_per_action(g, p, vals);
      argmax_set(vals, n, out);
      return;
    }
    case FeatureKind::kWelfareReal: {
      max_welfare_per_action(g, p, out);
      if (combiner == CombinerForm::kLinear) {
        const double shift = min_welfare(g, p);
        for (size_t a = 0; a < n; ++a) out[a] -= shift;
      }
      return;
    }
  }
  throw std::logic_error("unknown feature kind");
}

}  // namespace detail

bool is_binary_kind(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMaxminBinary:
    case FeatureKind::kMaxmaxBinary:
    case FeatureKind::kMinimaxRegretBinary:
    case FeatureKind::kFairBinary:
    case FeatureKind::kMaxSymmetricBinary:
    case FeatureKind::kWelfareBinary:
      return true;
    default:
      return false;
  }
}

std::string kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMaxminBinary: return "maxmin_binary";
    case FeatureKind::kMinReal: return "min_real";
    case FeatureKind::kMaxmaxBinary: return "maxmax_binary";
    case FeatureKind::kMaxReal: return "max_real";
    case FeatureKind::kMinimaxRegretBinary: return "minimax_regret_binary";
    case FeatureKind::kMaxRegretReal: return "max_regret_real";
    case FeatureKind::kFairBinary: return "fair_binary";
    case FeatureKind::kUnfairReal: return "unfair_real";
    case FeatureKind::kMaxSymmetricBinary: return "max_symmetric_binary";
    case FeatureKind::kSymmetricReal: return "symmetric_real";
    case FeatureKind::kWelfareBinary: return "welfare_binary";
    case FeatureKind::kWelfareReal: return "welfare_real";
  }
  throw std::logic_error("unknown feature kind");
}

FeatureKind kind_from_name(const std::string& name) {
  for (FeatureKind kind : kAllFeatureKinds)
    if (kind_name(kind) == name) return kind;
  throw ValidationError("unknown feature kind: '" + name + "'");
}

CombinerForm combiner_from_name(const std::string& name) {
  if (name == "linear") return CombinerForm::kLinear;
  if (name == "logit") return CombinerForm::kLogit;
  throw ValidationError("unknown combiner: '" + name + "'");
}

std::string combiner_name(CombinerForm combiner) {
  return combiner == CombinerForm::kLinear ? "linear" : "logit";
}

Matrix regret_loss(const NormalFormGame& game, Role player) {
  const size_t n = game.num_actions(player), m = game.num_actions(other(player));
  Matrix loss(n, m);
  for (size_t o = 0; o < m; ++o) {
    double colmax = game.payoff(player, 0, o);
    for (size_t a = 1; a < n; ++a) colmax = std::max(colmax, game.payoff(player, a, o));
    for (size_t a = 0; a < n; ++a) loss(a, o) = colmax - game.payoff(player, a, o);
  }
  return loss;
}

FeatureVector binary_feature(FeatureKind kind, const NormalFormGame& game, Role player) {
  if (!is_binary_kind(kind))
    throw std::invalid_argument("binary_feature: " + kind_name(kind) + " is not a binary kind");
  FeatureVector out(game.num_actions(player));
  detail::feature_into(kind, CombinerForm::kLinear, game, player, out.data());
  return out;
}

FeatureVector real_feature(FeatureKind kind, CombinerForm combiner, const NormalFormGame& game,
                           Role player) {
  if (is_binary_kind(kind))
    throw std::invalid_argument("real_feature: " + kind_name(kind) + " is not a real-valued kind");
  FeatureVector out(game.num_actions(player));
  detail::feature_into(kind, combiner, game, player, out.data());
  return out;
}

FeatureVector informativeness_transform(FeatureVector f) {
  for (size_t i = 1; i < f.size(); ++i)
    if (f[i] != f[0]) return f;
  std::fill(f.begin(), f.end(), 0.0);
  return f;
}

FeatureVector normalized_activation_transform(FeatureVector f) {
  double sum = 0.0;
  for (double v : f) {
    if (v < 0.0)
      throw ValidationError("normalized_activation_transform: negative feature value " +
                            format_double(v));
    sum += v;
  }
  if (sum > 0.0)
    for (double& v : f) v /= sum;
  return f;
}

std::vector<FeatureVector> feature_matrix(const std::vector<FeatureKind>& kinds,
                                          TransformFlags transforms, CombinerForm combiner,
                                          const NormalFormGame& game, Role player) {
  std::vector<FeatureVector> out;
  out.reserve(kinds.size());
  for (FeatureKind kind : kinds) {
    FeatureVector f = is_binary_kind(kind) ? binary_feature(kind, game, player)
                                           : real_feature(kind, combiner, game, player);
    if (transforms.informativeness) f = informativeness_transform(std::move(f));
    if (transforms.normalized_activation) f = normalized_activation_transform(std::move(f));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace bgt
