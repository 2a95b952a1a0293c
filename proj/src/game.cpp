#include "bgt/game.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bgt {

using nlohmann::json;

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols())
      throw ValidationError("matrix rows have inconsistent lengths");
    for (size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

void NormalFormGame::validate() const {
  auto fail = [&](const std::string& what) {
    throw ValidationError("game '" + id + "': " + what);
  };
  if (row_actions.empty()) fail("row_actions is empty");
  if (col_actions.empty()) fail("col_actions is empty");
  if (row_payoffs.rows() != row_actions.size() || row_payoffs.cols() != col_actions.size())
    fail("row_payoffs is " + std::to_string(row_payoffs.rows()) + "x" +
         std::to_string(row_payoffs.cols()) + ", expected " +
         std::to_string(row_actions.size()) + "x" + std::to_string(col_actions.size()));
  if (col_payoffs.rows() != row_actions.size() || col_payoffs.cols() != col_actions.size())
    fail("col_payoffs is " + std::to_string(col_payoffs.rows()) + "x" +
         std::to_string(col_payoffs.cols()) + ", expected " +
         std::to_string(row_actions.size()) + "x" + std::to_string(col_actions.size()));
  for (double v : row_payoffs.data())
    if (!std::isfinite(v)) fail("row_payoffs contains a non-finite entry");
  for (double v : col_payoffs.data())
    if (!std::isfinite(v)) fail("col_payoffs contains a non-finite entry");
}

void MixedStrategy::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ValidationError("mixed strategy has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("mixed strategy sums to " + format_double(sum));
}

long long GameObservations::total() const {
  long long n = 0;
  for (long long c : row_counts) n += c;
  for (long long c : col_counts) n += c;
  return n;
}

void Dataset::validate() const {
  if (!(source_units > 0.0))
    throw ValidationError("dataset '" + name + "': cents_per_point must be positive");
  std::set<std::string> ids;
  for (const auto& entry : entries) {
    entry.game.validate();
    if (!ids.insert(entry.game.id).second)
      throw ValidationError("dataset '" + name + "': duplicate game id '" + entry.game.id + "'");
    const auto& obs = entry.obs;
    auto fail = [&](const std::string& what) {
      throw ValidationError("game '" + entry.game.id + "': " + what);
    };
    if (obs.row_counts.size() != entry.game.row_actions.size())
      fail("row_counts has " + std::to_string(obs.row_counts.size()) + " entries, expected " +
           std::to_string(entry.game.row_actions.size()));
    if (obs.col_counts.size() != entry.game.col_actions.size())
      fail("col_counts has " + std::to_string(obs.col_counts.size()) + " entries, expected " +
           std::to_string(entry.game.col_actions.size()));
    for (long long c : obs.row_counts)
      if (c < 0) fail("row_counts contains a negative count");
    for (long long c : obs.col_counts)
      if (c < 0) fail("col_counts contains a negative count");
  }
}

long long Dataset::total_observations() const {
  long long n = 0;
  for (const auto& entry : entries) n += entry.obs.total();
  return n;
}

namespace {

Matrix matrix_from_json(const json& j, const std::string& game_id, const std::string& field) {
  if (!j.is_array())
    throw ValidationError("game '" + game_id + "': " + field + " must be an array of arrays");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array())
      throw ValidationError("game '" + game_id + "': " + field + " must be an array of arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number())
        throw ValidationError("game '" + game_id + "': " + field + " has a non-numeric entry");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const ValidationError&) {
    throw ValidationError("game '" + game_id + "': " + field + " rows have inconsistent lengths");
  }
}

const json& require(const json& j, const char* field, const std::string& context) {
  auto it = j.find(field);
  if (it == j.end())
    throw ValidationError(context + ": missing field '" + field + "'");
  return *it;
}

}  // namespace

Dataset parse_dataset(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dataset parse failure: ") + e.what());
  }
  Dataset ds;
  ds.name = require(doc, "name", "dataset").get<std::string>();
  ds.source_units = require(doc, "cents_per_point", "dataset '" + ds.name + "'").get<double>();
  const json& games = require(doc, "games", "dataset '" + ds.name + "'");
  for (const auto& g : games) {
    DatasetEntry entry;
    entry.game.id = require(g, "id", "dataset '" + ds.name + "' game entry").get<std::string>();
    const std::string ctx = "game '" + entry.game.id + "'";
    entry.game.row_actions = require(g, "row_actions", ctx).get<std::vector<std::string>>();
    entry.game.col_actions = require(g, "col_actions", ctx).get<std::vector<std::string>>();
    entry.game.row_payoffs = matrix_from_json(require(g, "row_payoffs", ctx), entry.game.id, "row_payoffs");
    entry.game.col_payoffs = matrix_from_json(require(g, "col_payoffs", ctx), entry.game.id, "col_payoffs");
    entry.obs.game_id = entry.game.id;
    entry.obs.row_counts = require(g, "row_counts", ctx).get<std::vector<long long>>();
    entry.obs.col_counts = require(g, "col_counts", ctx).get<std::vector<long long>>();
    entry.source = g.value("source", ds.name);
    ds.entries.push_back(std::move(entry));
  }
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

NormalFormGame load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open game file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("game parse failure: ") + e.what());
  }
  if (doc.contains("games")) {
    Dataset ds = parse_dataset(buf.str());
    if (ds.entries.size() != 1)
      throw ValidationError("game file '" + path.string() + "' must contain exactly one game");
    return ds.entries[0].game;
  }
  NormalFormGame game;
  game.id = require(doc, "id", "game file").get<std::string>();
  const std::string ctx = "game '" + game.id + "'";
  game.row_actions = require(doc, "row_actions", ctx).get<std::vector<std::string>>();
  game.col_actions = require(doc, "col_actions", ctx).get<std::vector<std::string>>();
  game.row_payoffs = matrix_from_json(require(doc, "row_payoffs", ctx), game.id, "row_payoffs");
  game.col_payoffs = matrix_from_json(require(doc, "col_payoffs", ctx), game.id, "col_payoffs");
  game.validate();
  return game;
}

std::string dataset_to_json(const Dataset& dataset) {
  json games = json::array();
  for (const auto& entry : dataset.entries) {
    json g;
    g["id"] = entry.game.id;
    g["row_actions"] = entry.game.row_actions;
    g["col_actions"] = entry.game.col_actions;
    auto matrix_json = [](const Matrix& m) {
      json rows = json::array();
      for (size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    g["row_payoffs"] = matrix_json(entry.game.row_payoffs);
    g["col_payoffs"] = matrix_json(entry.game.col_payoffs);
    g["row_counts"] = entry.obs.row_counts;
    g["col_counts"] = entry.obs.col_counts;
    if (entry.source != dataset.name) g["source"] = entry.source;
    games.push_back(std::move(g));
  }
  json doc;
  doc["name"] = dataset.name;
  doc["cents_per_point"] = dataset.source_units;
  doc["games"] = std::move(games);
  return doc.dump(2);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file: " + path.string());
  out << dataset_to_json(dataset) << "\n";
}

Dataset normalize_payoffs(const Dataset& dataset) {
  dataset.validate();
  Dataset out = dataset;
  const double scale = dataset.source_units;
  for (auto& entry : out.entries) {
    for (double& v : entry.game.row_payoffs.data()) v *= scale;
    for (double& v : entry.game.col_payoffs.data()) v *= scale;
  }
  out.source_units = 1.0;
  return out;
}

double expected_utility(const NormalFormGame& game, Role role, size_t action,
                        const MixedStrategy& opponent_strategy) {
  const size_t n_own = game.num_actions(role);
  const size_t n_opp = game.num_actions(other(role));
  if (action >= n_own)
    throw std::out_of_range("expected_utility: action index out of range");
  if (opponent_strategy.size() != n_opp)
    throw std::out_of_range("expected_utility: opponent strategy has wrong length");
  double eu = 0.0;
  for (size_t o = 0; o < n_opp; ++o)
    eu += opponent_strategy[o] * game.payoff(role, action, o);
  return eu;
}

bool is_symmetric(const NormalFormGame& game) {
  const size_t n = game.row_actions.size();
  if (game.col_actions.size() != n) return false;
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c)
      if (game.col_payoffs(r, c) != game.row_payoffs(c, r)) return false;
  return true;
}

}  // namespace bgt
