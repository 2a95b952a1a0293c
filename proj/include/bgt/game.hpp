#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "bgt/util.hpp"

namespace bgt {

// Dense row-major matrix of payoffs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Role { kRow, kCol };

inline Role other(Role r) { return r == Role::kRow ? Role::kCol : Role::kRow; }
inline const char* role_name(Role r) { return r == Role::kRow ? "row" : "col"; }

// Two-player normal-form game.  Payoff matrices are indexed
// [row action][col action] for both players.  Treated as immutable once
// validated; safe to share across threads.
struct NormalFormGame {
  std::string id;
  std::vector<std::string> row_actions;
  std::vector<std::string> col_actions;
  Matrix row_payoffs;
  Matrix col_payoffs;

  size_t num_actions(Role role) const {
    return role == Role::kRow ? row_actions.size() : col_actions.size();
  }

  // Payoff to `role` when it plays `own` and the opponent plays `opp`
  // (indices are each player's own action indices).
  double payoff(Role role, size_t own, size_t opp) const {
    return role == Role::kRow ? row_payoffs(own, opp) : col_payoffs(opp, own);
  }

  void validate() const;  // throws ValidationError
};

// Probability distribution over one player's actions.
struct MixedStrategy {
  std::vector<double> probs;

  static MixedStrategy uniform(size_t n) {
    return MixedStrategy{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }
  size_t size() const { return probs.size(); }
  double operator[](size_t i) const { return probs[i]; }
  void validate() const;  // nonnegative, sums to 1 within 1e-9

  bool operator==(const MixedStrategy& other) const = default;
};

// Observed action counts for one game, per player role.
struct GameObservations {
  std::string game_id;
  std::vector<long long> row_counts;
  std::vector<long long> col_counts;

  long long total() const;
};

struct DatasetEntry {
  NormalFormGame game;
  GameObservations obs;
  std::string source;  // source study label; defaults to the dataset name
};

// Named collection of (game, observations) pairs sharing a payoff unit.
// source_units is the cents-per-payoff-point conversion factor.
struct Dataset {
  std::string name;
  double source_units = 1.0;
  std::vector<DatasetEntry> entries;

  void validate() const;
  long long total_observations() const;
};

Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(const std::string& json_text);  // same checks as load_dataset
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
std::string dataset_to_json(const Dataset& dataset);

// A single-game file: either a bare game object (counts optional) or a
// dataset document containing exactly one game.
NormalFormGame load_game(const std::filesystem::path& path);

// Converts all payoffs to expected cents and sets source_units to 1.
Dataset normalize_payoffs(const Dataset& dataset);

// u_i(a_i, s_{-i}): expected payoff of `action` for `role` against a mixed
// opponent strategy.
double expected_utility(const NormalFormGame& game, Role role, size_t action,
                        const MixedStrategy& opponent_strategy);

// True iff action sets have equal size and the column player's payoff matrix
// is exactly the transpose of the row player's.
bool is_symmetric(const NormalFormGame& game);

}  // namespace bgt
