#include "bgt/synth.hpp"

#include <cstdio>

#include "bgt/rng.hpp"
#include "bgt/util.hpp"

namespace bgt {

namespace {
constexpr uint64_t kSynthGameStream = 0x73796e47;  // "synG"
}

void GeneratorConfig::validate() const {
  if (n_games < 1) throw ValidationError("generator: n_games must be >= 1");
  if (min_actions < 1 || max_actions < min_actions)
    throw ValidationError("generator: need 1 <= min_actions <= max_actions");
  if (payoff_max < payoff_min) throw ValidationError("generator: payoff_max < payoff_min");
  if (payoff_step < 1) throw ValidationError("generator: payoff_step must be >= 1");
  if (!(symmetric_fraction >= 0.0 && symmetric_fraction <= 1.0))
    throw ValidationError("generator: symmetric_fraction must be in [0,1]");
  if (n_sources < 1) throw ValidationError("generator: n_sources must be >= 1");
  if (observations_per_game_per_role < 0)
    throw ValidationError("generator: observations_per_game_per_role must be >= 0");
  params.validate();
  level0.validate();
}

Dataset generate(const GeneratorConfig& config) {
  config.validate();
  Dataset out;
  out.name = config.name;
  out.source_units = 1.0;  // payoffs are generated directly in cents
  out.entries.resize(config.n_games);

  parallel_for(static_cast<size_t>(config.n_games), config.threads, [&](size_t g) {
    Rng rng(derive_seed(config.seed, kSynthGameStream, g));
    DatasetEntry& entry = out.entries[g];

    const long long span = (config.payoff_max - config.payoff_min) / config.payoff_step + 1;
    const int action_span = config.max_actions - config.min_actions + 1;
    const bool symmetric = rng.uniform() < config.symmetric_fraction;
    const size_t n_rows =
        config.min_actions + static_cast<int>(rng.uniform_int(action_span));
    const size_t n_cols =
        symmetric ? n_rows : config.min_actions + static_cast<int>(rng.uniform_int(action_span));

    NormalFormGame& game = entry.game;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "g%04zu", g);
    game.id = buf;
    for (size_t a = 0; a < n_rows; ++a) game.row_actions.push_back("r" + std::to_string(a));
    for (size_t a = 0; a < n_cols; ++a) game.col_actions.push_back("c" + std::to_string(a));
    game.row_payoffs = Matrix(n_rows, n_cols);
    game.col_payoffs = Matrix(n_rows, n_cols);
    for (size_t r = 0; r < n_rows; ++r)
      for (size_t c = 0; c < n_cols; ++c)
        game.row_payoffs(r, c) = static_cast<double>(
            config.payoff_min +
            config.payoff_step * static_cast<long long>(rng.uniform_int(span)));
    if (symmetric) {
      for (size_t r = 0; r < n_rows; ++r)
        for (size_t c = 0; c < n_cols; ++c) game.col_payoffs(r, c) = game.row_payoffs(c, r);
    } else {
      for (size_t r = 0; r < n_rows; ++r)
        for (size_t c = 0; c < n_cols; ++c)
          game.col_payoffs(r, c) = static_cast<double>(
              config.payoff_min +
              config.payoff_step * static_cast<long long>(rng.uniform_int(span)));
    }

    const Level0Spec spec = effective_spec(config.level0, config.params);
    auto [pred_row, pred_col] = predict_both_with_level0(
        game, config.params, predict_level0(spec, game, Role::kRow),
        predict_level0(spec, game, Role::kCol));

    entry.obs.game_id = game.id;
    entry.obs.row_counts.assign(n_rows, 0);
    entry.obs.col_counts.assign(n_cols, 0);
    for (long long i = 0; i < config.observations_per_game_per_role; ++i)
      ++entry.obs.row_counts[rng.categorical(pred_row.probs)];
    for (long long i = 0; i < config.observations_per_game_per_role; ++i)
      ++entry.obs.col_counts[rng.categorical(pred_col.probs)];

    entry.source = config.n_sources == 1
                       ? config.name
                       : "S" + std::to_string(g % static_cast<size_t>(config.n_sources));
  });
  out.validate();
  return out;
}

}  // namespace bgt
