// bgt: behavioral predictions for normal-form games.
//
// Subcommands: features | predict | fit | cv | posterior | select | synth.
// Every run writes its outputs plus a manifest.json into --out; all
// randomness derives from --seed, so reruns are byte-identical.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgt/estimation.hpp"
#include "bgt/posterior.hpp"
#include "bgt/selection.hpp"
#include "bgt/synth.hpp"
#include "bgt/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("BGT_L0_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return bgt::hardware_threads();
}

// Collects output files and writes the run manifest, also on failure.
class RunContext {
 public:
  RunContext(std::string command, fs::path out_dir, uint64_t seed)
      : command_(std::move(command)), out_dir_(std::move(out_dir)), seed_(seed) {
    started_at_ = iso_timestamp();
    fs::create_directories(out_dir_);
  }

  void set_config(json config) { config_ = std::move(config); }

  void write_text(const std::string& name, const std::string& content) {
    std::ofstream out(out_dir_ / name, std::ios::binary);
    if (!out) throw bgt::ValidationError("cannot write output file: " + (out_dir_ / name).string());
    out << content;
    outputs_.push_back(name);
  }

  void write_json(const std::string& name, const json& doc) {
    write_text(name, doc.dump(2) + "\n");
  }

  void finish(const std::string& status, const std::string& error = "") {
    json manifest;
    manifest["command"] = command_;
    manifest["config"] = config_;
    manifest["seed"] = seed_;
    manifest["version"] = kVersion;
    manifest["started_at"] = started_at_;
    manifest["finished_at"] = iso_timestamp();
    manifest["outputs"] = outputs_;
    manifest["status"] = status;
    if (!error.empty()) manifest["error"] = error;
    std::ofstream out(out_dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path out_dir_;
  uint64_t seed_;
  std::string started_at_;
  json config_;
  std::vector<std::string> outputs_;
};

json params_to_json_value(const bgt::ModelParams& p) {
  return json::parse(bgt::model_params_to_json(p));
}

json level0_to_json_value(const bgt::Level0Spec& spec) {
  return json::parse(bgt::level0_spec_to_json(spec));
}

bgt::ModelParams load_params_file(const std::string& path, const std::string& model_flag) {
  std::ifstream in(path);
  if (!in) throw bgt::ValidationError("cannot open params file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (!model_flag.empty()) {
    json doc = json::parse(text, nullptr, false);
    if (!doc.is_discarded() && doc.is_object() && !doc.contains("model")) {
      doc["model"] = model_flag;
      text = doc.dump();
    }
  }
  bgt::ModelParams params = bgt::model_params_from_json(text);
  if (!model_flag.empty() && bgt::model_kind_name(params.kind) != model_flag)
    throw bgt::ValidationError("params file specifies model '" +
                               bgt::model_kind_name(params.kind) + "' but --model is '" +
                               model_flag + "'");
  return params;
}

std::vector<bgt::FeatureKind> parse_kinds(const std::string& csv) {
  std::vector<bgt::FeatureKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) kinds.push_back(bgt::kind_from_name(item));
  }
  return kinds;
}

std::string feature_csv(const bgt::NormalFormGame& game, bgt::Role role,
                        const std::vector<bgt::FeatureKind>& kinds,
                        bgt::TransformFlags transforms, bgt::CombinerForm combiner) {
  auto matrix = bgt::feature_matrix(kinds, transforms, combiner, game, role);
  std::ostringstream out;
  out << "action";
  for (auto kind : kinds) out << "," << bgt::kind_name(kind);
  out << "\n";
  const auto& labels = role == bgt::Role::kRow ? game.row_actions : game.col_actions;
  for (size_t a = 0; a < labels.size(); ++a) {
    out << labels[a];
    for (size_t k = 0; k < kinds.size(); ++k) out << "," << bgt::format_double(matrix[k][a]);
    out << "\n";
  }
  return out.str();
}

json cv_report_json(const bgt::CvReport& report) {
  json doc;
  doc["dataset"] = report.dataset_name;
  doc["model"] = report.model_name;
  doc["level0"] = report.level0_name;
  doc["rounds"] = report.rounds;
  doc["folds"] = report.folds;
  doc["n_observations"] = report.n_observations;
  doc["round_scores"] = report.round_scores;
  doc["mean_log_likelihood"] = report.mean_log_likelihood;
  if (report.half_width_95)
    doc["half_width_95"] = *report.half_width_95;
  else
    doc["half_width_95"] = nullptr;
  doc["uniform_log_likelihood"] = report.uniform_log_likelihood;
  doc["likelihood_ratio_per_obs"] = report.likelihood_ratio_per_obs;
  doc["floored_observations"] = report.floored_observations;
  return doc;
}

const std::vector<bgt::FeatureKind> kBinaryKindOrder = {
    bgt::FeatureKind::kMaxmaxBinary,        bgt::FeatureKind::kMaxminBinary,
    bgt::FeatureKind::kMinimaxRegretBinary, bgt::FeatureKind::kWelfareBinary,
    bgt::FeatureKind::kFairBinary,          bgt::FeatureKind::kMaxSymmetricBinary,
};

std::string set_code(const std::vector<bgt::FeatureKind>& kinds, const std::string& codes) {
  std::string label;
  for (size_t i = 0; i < kBinaryKindOrder.size(); ++i)
    for (auto kind : kinds)
      if (kind == kBinaryKindOrder[i]) label += codes[i];
  return label;
}

int run_command(const std::string& name, RunContext& ctx, const std::function<void()>& body) {
  try {
    body();
    ctx.finish("ok");
    return 0;
  } catch (const bgt::ValidationError& e) {
    ctx.finish("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ctx.finish("error", e.what());
    std::cerr << name << ": internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral predictions for normal-form games"};
  app.require_subcommand(1);

  // shared flag storage
  std::string dataset_path, game_path, params_path, level0_arg = "uniform", model_name = "qch";
  std::string out_dir = ".";
  uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "master random seed")->capture_default_str();
    sub->add_option("--threads", threads,
                    "worker threads (default: BGT_L0_THREADS or all cores)");
  };

  // features
  auto* features_cmd = app.add_subcommand("features", "dump a game's feature matrix as CSV");
  std::string features_kinds_csv, features_combiner = "linear";
  bool informativeness = false, normalized_activation = false;
  features_cmd->add_option("--game", game_path, "game JSON file")->required();
  features_cmd->add_option("--kinds", features_kinds_csv, "comma-separated feature kinds");
  features_cmd->add_option("--combiner", features_combiner, "linear|logit")
      ->capture_default_str();
  features_cmd->add_flag("--informativeness", informativeness, "zero uninformative features");
  features_cmd->add_flag("--normalized-activation", normalized_activation,
                         "rescale features to sum to 1");
  add_common(features_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "predict play for one game");
  predict_cmd->add_option("--game", game_path, "game JSON file")->required();
  predict_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")->capture_default_str();
  predict_cmd->add_option("--params", params_path, "model parameter JSON file")->required();
  predict_cmd->add_option("--level0", level0_arg, "uniform|linear4|linear8|<spec.json>")
      ->capture_default_str();
  add_common(predict_cmd);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit on a dataset");
  int budget = 5000, restarts = 4;
  fit_cmd->add_option("--dataset", dataset_path, "dataset JSON file")->required();
  fit_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")->capture_default_str();
  fit_cmd->add_option("--level0", level0_arg, "uniform|linear4|linear8|<spec.json>")
      ->capture_default_str();
  fit_cmd->add_option("--budget", budget, "objective evaluations")->capture_default_str();
  fit_cmd->add_option("--restarts", restarts, "optimizer restarts")->capture_default_str();
  add_common(fit_cmd);

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "repeated stratified cross-validation");
  int rounds = 10, folds = 10;
  cv_cmd->add_option("--dataset", dataset_path, "dataset JSON file")->required();
  cv_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")->capture_default_str();
  cv_cmd->add_option("--level0", level0_arg, "uniform|linear4|linear8|<spec.json>")
      ->capture_default_str();
  cv_cmd->add_option("--rounds", rounds, "cross-validation rounds")->capture_default_str();
  cv_cmd->add_option("--folds", folds, "folds per round")->capture_default_str();
  cv_cmd->add_option("--budget", budget, "objective evaluations per fit")->capture_default_str();
  cv_cmd->add_option("--restarts", restarts, "optimizer restarts per fit")->capture_default_str();
  add_common(cv_cmd);

  // posterior
  auto* posterior_cmd = app.add_subcommand("posterior", "Metropolis-Hastings posterior sampling");
  long long iterations = 100000, burn_in = 20000;
  int thinning = 10;
  double tau_max = 10.0, lambda_max = 5.0;
  std::vector<std::string> marginals;
  posterior_cmd->add_option("--dataset", dataset_path, "dataset JSON file")->required();
  posterior_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")
      ->capture_default_str();
  posterior_cmd->add_option("--level0", level0_arg, "uniform|linear4|linear8|<spec.json>")
      ->capture_default_str();
  posterior_cmd->add_option("--iterations", iterations, "total chain steps")
      ->capture_default_str();
  posterior_cmd->add_option("--burn-in", burn_in, "adaptation steps discarded")
      ->capture_default_str();
  posterior_cmd->add_option("--thin", thinning, "keep every n-th sample")->capture_default_str();
  posterior_cmd->add_option("--tau-max", tau_max, "flat prior upper bound for tau")
      ->capture_default_str();
  posterior_cmd->add_option("--lambda-max", lambda_max, "flat prior upper bound for lambda")
      ->capture_default_str();
  posterior_cmd->add_option("--marginal", marginals,
                            "marginal CDFs to emit (default: g0..g3 and all parameters)");
  add_common(posterior_cmd);

  // select
  auto* select_cmd = app.add_subcommand("select", "forward selection over binary features");
  std::string candidates_csv, codes = "MNRWFS";
  int sel_folds = 10, sel_instances = 10;
  select_cmd->add_option("--dataset", dataset_path, "dataset JSON file")->required();
  select_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")->capture_default_str();
  select_cmd->add_option("--candidates", candidates_csv,
                         "comma-separated binary feature kinds (default: all six)");
  select_cmd->add_option("--folds", sel_folds, "stratified folds")->capture_default_str();
  select_cmd->add_option("--instances", sel_instances, "validation subfold instances")
      ->capture_default_str();
  select_cmd->add_option("--budget", budget, "objective evaluations per fit")
      ->capture_default_str();
  select_cmd->add_option("--restarts", restarts, "optimizer restarts per fit")
      ->capture_default_str();
  select_cmd
      ->add_option("--codes", codes,
                   "six letters labeling maxmax,maxmin,regret,welfare,fair,max-symmetric")
      ->capture_default_str();
  add_common(select_cmd);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  bgt::GeneratorConfig gen;
  gen.payoff_max = 250;
  gen.symmetric_fraction = 0.4;
  std::string synth_name = "synthetic";
  synth_cmd->add_option("--games", gen.n_games, "number of games")->capture_default_str();
  synth_cmd->add_option("--min-actions", gen.min_actions, "")->capture_default_str();
  synth_cmd->add_option("--max-actions", gen.max_actions, "")->capture_default_str();
  synth_cmd->add_option("--payoff-min", gen.payoff_min, "integer cents")->capture_default_str();
  synth_cmd->add_option("--payoff-max", gen.payoff_max, "integer cents")->capture_default_str();
  synth_cmd->add_option("--payoff-step", gen.payoff_step, "payoff lattice spacing")
      ->capture_default_str();
  synth_cmd
      ->add_option("--symmetric-fraction", gen.symmetric_fraction,
                   "fraction of games with col = transpose(row)")
      ->capture_default_str();
  synth_cmd->add_option("--sources", gen.n_sources, "number of source labels")
      ->capture_default_str();
  synth_cmd->add_option("--obs", gen.observations_per_game_per_role,
                        "observations per game per role")
      ->capture_default_str();
  synth_cmd->add_option("--model", model_name, "qch|poisson-ch|level-k")->capture_default_str();
  synth_cmd->add_option("--params", params_path, "generating parameter JSON file")->required();
  synth_cmd->add_option("--level0", level0_arg, "uniform|linear4|linear8|<spec.json>")
      ->capture_default_str();
  synth_cmd->add_option("--name", synth_name, "dataset name")->capture_default_str();
  add_common(synth_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const int n_threads = resolve_threads(threads);

  if (features_cmd->parsed()) {
    RunContext ctx("features", out_dir, seed);
    return run_command("features", ctx, [&] {
      bgt::NormalFormGame game = bgt::load_game(game_path);
      std::vector<bgt::FeatureKind> kinds =
          features_kinds_csv.empty()
              ? std::vector<bgt::FeatureKind>(std::begin(bgt::kAllFeatureKinds),
                                              std::end(bgt::kAllFeatureKinds))
              : parse_kinds(features_kinds_csv);
      bgt::TransformFlags transforms{informativeness, normalized_activation};
      bgt::CombinerForm combiner = bgt::combiner_from_name(features_combiner);
      json config;
      config["game"] = game_path;
      config["combiner"] = features_combiner;
      config["informativeness"] = informativeness;
      config["normalized_activation"] = normalized_activation;
      std::vector<std::string> kind_names;
      for (auto kind : kinds) kind_names.push_back(bgt::kind_name(kind));
      config["kinds"] = kind_names;
      ctx.set_config(config);
      ctx.write_text("features_row.csv",
                     feature_csv(game, bgt::Role::kRow, kinds, transforms, combiner));
      ctx.write_text("features_col.csv",
                     feature_csv(game, bgt::Role::kCol, kinds, transforms, combiner));
    });
  }

  if (predict_cmd->parsed()) {
    RunContext ctx("predict", out_dir, seed);
    return run_command("predict", ctx, [&] {
      bgt::NormalFormGame game = bgt::load_game(game_path);
      bgt::ModelParams params =
          load_params_file(params_path, predict_cmd->count("--model") ? model_name : "");
      bgt::Level0Spec level0 = bgt::level0_spec_from_arg(level0_arg);
      json config;
      config["game"] = game_path;
      config["model"] = bgt::model_kind_name(params.kind);
      config["params"] = params_to_json_value(params);
      config["level0"] = level0_to_json_value(level0);
      ctx.set_config(config);

      auto row = bgt::predict(game, bgt::Role::kRow, params, level0);
      auto col = bgt::predict(game, bgt::Role::kCol, params, level0);
      json prediction;
      prediction["game_id"] = game.id;
      prediction["row"] = row.probs;
      prediction["col"] = col.probs;
      ctx.write_json("prediction.json", prediction);

      std::ostringstream csv;
      csv << "role,action,probability\n";
      for (size_t a = 0; a < game.row_actions.size(); ++a)
        csv << "row," << game.row_actions[a] << "," << bgt::format_double(row.probs[a]) << "\n";
      for (size_t a = 0; a < game.col_actions.size(); ++a)
        csv << "col," << game.col_actions[a] << "," << bgt::format_double(col.probs[a]) << "\n";
      ctx.write_text("prediction.csv", csv.str());
    });
  }

  if (fit_cmd->parsed()) {
    RunContext ctx("fit", out_dir, seed);
    return run_command("fit", ctx, [&] {
      bgt::Dataset dataset = bgt::load_dataset(dataset_path);
      bgt::ModelConfig config{bgt::model_kind_from_name(model_name),
                              bgt::level0_spec_from_arg(level0_arg)};
      bgt::FitOptions options;
      options.budget = budget;
      options.restarts = restarts;
      options.threads = n_threads;
      json cfg;
      cfg["dataset"] = dataset_path;
      cfg["model"] = model_name;
      cfg["level0"] = level0_to_json_value(config.level0);
      cfg["budget"] = budget;
      cfg["restarts"] = restarts;
      cfg["threads"] = n_threads;
      ctx.set_config(cfg);

      bgt::FitResult fit = bgt::fit_mle(dataset, config, options, seed);
      json doc;
      doc["model"] = model_name;
      doc["level0"] = level0_to_json_value(config.level0);
      doc["params"] = params_to_json_value(fit.params);
      doc["train_log_likelihood"] = fit.train_log_likelihood;
      doc["restarts_used"] = fit.restarts_used;
      doc["evaluations"] = fit.evaluations;
      doc["floored_observations"] = fit.floored_observations;
      doc["trace"] = fit.trace;
      ctx.write_json("fit.json", doc);
    });
  }

  if (cv_cmd->parsed()) {
    RunContext ctx("cv", out_dir, seed);
    return run_command("cv", ctx, [&] {
      bgt::Dataset dataset = bgt::load_dataset(dataset_path);
      bgt::ModelConfig config{bgt::model_kind_from_name(model_name),
                              bgt::level0_spec_from_arg(level0_arg)};
      bgt::CvOptions options;
      options.rounds = rounds;
      options.folds = folds;
      options.fit.budget = budget;
      options.fit.restarts = restarts;
      options.threads = n_threads;
      json cfg;
      cfg["dataset"] = dataset_path;
      cfg["model"] = model_name;
      cfg["level0"] = level0_to_json_value(config.level0);
      cfg["rounds"] = rounds;
      cfg["folds"] = folds;
      cfg["budget"] = budget;
      cfg["restarts"] = restarts;
      cfg["threads"] = n_threads;
      ctx.set_config(cfg);

      bgt::CvReport report = bgt::cross_validate(dataset, config, options, seed);
      ctx.write_json("cv.json", cv_report_json(report));
      std::ostringstream csv;
      csv << "round,log_likelihood,likelihood_ratio_per_obs\n";
      for (size_t r = 0; r < report.round_scores.size(); ++r) {
        const double ratio =
            report.n_observations > 0
                ? std::exp((report.round_scores[r] - report.uniform_log_likelihood) /
                           report.n_observations)
                : 1.0;
        csv << r << "," << bgt::format_double(report.round_scores[r]) << ","
            << bgt::format_double(ratio) << "\n";
      }
      ctx.write_text("cv_rounds.csv", csv.str());
    });
  }

  if (posterior_cmd->parsed()) {
    RunContext ctx("posterior", out_dir, seed);
    return run_command("posterior", ctx, [&] {
      bgt::Dataset dataset = bgt::load_dataset(dataset_path);
      bgt::ModelConfig config{bgt::model_kind_from_name(model_name),
                              bgt::level0_spec_from_arg(level0_arg)};
      bgt::MhOptions options;
      options.iterations = iterations;
      options.burn_in = burn_in;
      options.thinning = thinning;
      options.box.tau_max = tau_max;
      options.box.lambda_max = lambda_max;
      json cfg;
      cfg["dataset"] = dataset_path;
      cfg["model"] = model_name;
      cfg["level0"] = level0_to_json_value(config.level0);
      cfg["iterations"] = iterations;
      cfg["burn_in"] = burn_in;
      cfg["thinning"] = thinning;
      cfg["tau_max"] = tau_max;
      cfg["lambda_max"] = lambda_max;
      ctx.set_config(cfg);

      bgt::PosteriorChain chain = bgt::mh_sample(dataset, config, options, seed);

      std::ostringstream csv;
      for (size_t i = 0; i < chain.param_names.size(); ++i)
        csv << (i ? "," : "") << chain.param_names[i];
      csv << "\n";
      for (const auto& row : chain.samples) {
        for (size_t i = 0; i < row.size(); ++i)
          csv << (i ? "," : "") << bgt::format_double(row[i]);
        csv << "\n";
      }
      ctx.write_text("chain.csv", csv.str());

      std::vector<std::string> selectors = marginals;
      if (selectors.empty()) {
        selectors = {"g0", "g1", "g2", "g3"};
        for (const auto& name : chain.param_names) selectors.push_back(name);
        if (!config.level0.kinds.empty()) selectors.push_back("w0");
      }
      for (const auto& selector : selectors) {
        bgt::MarginalCdf cdf = bgt::marginal_cdf(chain, selector);
        std::ostringstream mcsv;
        mcsv << "value,cumulative_probability\n";
        const double n = static_cast<double>(cdf.sorted_values.size());
        for (size_t i = 0; i < cdf.sorted_values.size(); ++i)
          mcsv << bgt::format_double(cdf.sorted_values[i]) << ","
               << bgt::format_double((i + 1) / n) << "\n";
        ctx.write_text("cdf_" + selector + ".csv", mcsv.str());
      }

      json doc;
      doc["model"] = model_name;
      doc["level0"] = level0_to_json_value(config.level0);
      doc["acceptance_rate"] = chain.acceptance_rate;
      doc["iterations"] = chain.iterations;
      doc["burn_in"] = chain.burn_in;
      doc["thinning"] = chain.thinning;
      doc["kept_samples"] = chain.samples.size();
      doc["param_names"] = chain.param_names;
      doc["box"] = {{"tau_max", tau_max}, {"lambda_max", lambda_max}};
      ctx.write_json("posterior.json", doc);
    });
  }

  if (select_cmd->parsed()) {
    RunContext ctx("select", out_dir, seed);
    return run_command("select", ctx, [&] {
      if (codes.size() != 6)
        throw bgt::ValidationError("--codes must provide exactly six letters");
      bgt::Dataset dataset = bgt::load_dataset(dataset_path);
      std::vector<bgt::FeatureKind> candidates =
          candidates_csv.empty() ? kBinaryKindOrder : parse_kinds(candidates_csv);
      for (auto kind : candidates)
        if (!bgt::is_binary_kind(kind))
          throw bgt::ValidationError("select candidates must be binary kinds, got " +
                                     bgt::kind_name(kind));
      bgt::SelectionOptions options;
      options.folds = sel_folds;
      options.n_instances = sel_instances;
      options.fit.budget = budget;
      options.fit.restarts = restarts;
      options.threads = n_threads;
      json cfg;
      cfg["dataset"] = dataset_path;
      cfg["model"] = model_name;
      std::vector<std::string> cand_names;
      for (auto kind : candidates) cand_names.push_back(bgt::kind_name(kind));
      cfg["candidates"] = cand_names;
      cfg["folds"] = sel_folds;
      cfg["instances"] = sel_instances;
      cfg["budget"] = budget;
      cfg["restarts"] = restarts;
      cfg["codes"] = codes;
      ctx.set_config(cfg);

      bgt::SelectionTrace trace = bgt::forward_select(
          dataset, candidates, bgt::model_kind_from_name(model_name), options, seed);

      auto names_of = [](const std::vector<bgt::FeatureKind>& kinds) {
        std::vector<std::string> names;
        for (auto kind : kinds) names.push_back(bgt::kind_name(kind));
        return names;
      };
      json doc;
      doc["evaluated"] = json::array();
      for (const auto& e : trace.evaluated) {
        json entry;
        entry["kinds"] = names_of(e.kinds);
        entry["code"] = set_code(e.kinds, codes);
        entry["score"] = e.score;
        entry["half_width"] = e.half_width;
        entry["instance_scores"] = e.instance_scores;
        doc["evaluated"].push_back(std::move(entry));
      }
      doc["chosen_path"] = json::array();
      for (const auto& set : trace.chosen_path) doc["chosen_path"].push_back(names_of(set));
      doc["selected"] = names_of(trace.selected);
      doc["selected_code"] = set_code(trace.selected, codes);
      ctx.write_json("selection.json", doc);

      std::ostringstream csv;
      csv << "set,score,half_width\n";
      for (const auto& e : trace.evaluated)
        csv << set_code(e.kinds, codes) << "," << bgt::format_double(e.score) << ","
            << bgt::format_double(e.half_width) << "\n";
      ctx.write_text("selection.csv", csv.str());
    });
  }

  if (synth_cmd->parsed()) {
    RunContext ctx("synth", out_dir, seed);
    return run_command("synth", ctx, [&] {
      gen.name = synth_name;
      gen.params = load_params_file(params_path, synth_cmd->count("--model") ? model_name : "");
      gen.level0 = bgt::level0_spec_from_arg(level0_arg);
      gen.seed = seed;
      gen.threads = n_threads;
      json cfg;
      cfg["games"] = gen.n_games;
      cfg["min_actions"] = gen.min_actions;
      cfg["max_actions"] = gen.max_actions;
      cfg["payoff_min"] = gen.payoff_min;
      cfg["payoff_max"] = gen.payoff_max;
      cfg["payoff_step"] = gen.payoff_step;
      cfg["symmetric_fraction"] = gen.symmetric_fraction;
      cfg["sources"] = gen.n_sources;
      cfg["obs"] = gen.observations_per_game_per_role;
      cfg["model"] = bgt::model_kind_name(gen.params.kind);
      cfg["params"] = params_to_json_value(gen.params);
      cfg["level0"] = level0_to_json_value(gen.level0);
      cfg["name"] = synth_name;
      ctx.set_config(cfg);

      bgt::Dataset dataset = bgt::generate(gen);
      ctx.write_text("dataset.json", bgt::dataset_to_json(dataset) + "\n");

      json truth;
      truth["model"] = bgt::model_kind_name(gen.params.kind);
      truth["params"] = params_to_json_value(gen.params);
      truth["level0"] = level0_to_json_value(gen.level0);
      truth["seed"] = seed;
      ctx.write_json("truth.json", truth);
    });
  }

  return 0;
}
