#pragma once

#include <cstdint>
#include <string>

#include "bgt/behavioral.hpp"
#include "bgt/game.hpp"

namespace bgt {

// Synthetic dataset generator: random integer-cent games played by a
// configured model, with observation counts sampled from its predictions.
struct GeneratorConfig {
  std::string name = "synthetic";
  int n_games = 20;
  int min_actions = 3;
  int max_actions = 3;
  long long payoff_min = 0;    // integer cents, drawn uniformly
  long long payoff_max = 100;
  long long payoff_step = 1;   // lattice spacing; >1 emulates point-denominated payoffs
  double symmetric_fraction = 0.5;  // fraction of games with col = transpose(row)
  int n_sources = 1;                // games dealt round-robin to sources S0..S{k-1}
  long long observations_per_game_per_role = 100;
  ModelParams params;
  Level0Spec level0;
  uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

Dataset generate(const GeneratorConfig& config);

}  // namespace bgt
