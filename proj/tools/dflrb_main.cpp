#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dflrb/datagen.hpp"
#include "dflrb/errors.hpp"
#include "dflrb/harness/config.hpp"
#include "dflrb/harness/presets.hpp"
#include "dflrb/harness/report.hpp"
#include "dflrb/harness/sweep.hpp"
#include "dflrb/harness/train.hpp"
#include "dflrb/nn.hpp"
#include "dflrb/rng.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dflrb;

constexpr std::uint64_t kDatasetTag = 0xDA7A5E7;
constexpr std::uint64_t kTagInit = 0, kTagTrain = 1, kTagAttack = 2;

// CLI flags layered over an optional JSON config file.
struct CliArgs {
  std::string config_path;
  std::string problem;
  std::string method;
  std::vector<double> epsilons;
  int trials = -1;
  long long seed = -1;
  int epochs = -1;
  double lr = 0.0;
  int threads = -1;
  std::string out;
  std::string model_path;
  std::string results_path;
  bool svg = false;
};

harness::ExperimentConfig resolve_config(const CliArgs& args) {
  harness::ExperimentConfig config;
  if (!args.config_path.empty())
    config = harness::load_config_file(args.config_path);
  if (!args.problem.empty()) config.problem = args.problem;
  if (!args.method.empty()) config.method = args.method;
  if (!args.epsilons.empty()) config.epsilons = args.epsilons;
  if (args.trials >= 0) config.trials = args.trials;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (args.epochs >= 0) config.epochs = args.epochs;
  if (args.lr > 0.0) config.lr = args.lr;
  if (args.threads >= 0) config.threads = args.threads;
  if (!args.out.empty()) config.out = args.out;
  config.validate();
  return config;
}

void write_problem_json(const harness::Preset& preset,
                        const DecisionProblem& problem, std::uint64_t seed,
                        const std::string& path) {
  nlohmann::json j;
  j["preset"] = preset.name;
  j["seed"] = seed;
  switch (problem.kind()) {
    case ProblemKind::Knapsack: {
      const KnapsackData& d = problem.knapsack_data();
      j["kind"] = "knapsack";
      j["capacity"] = d.capacity;
      j["weights"] = std::vector<int>(d.weights.data(),
                                      d.weights.data() + d.weights.size());
      break;
    }
    case ProblemKind::ShortestPath:
      j["kind"] = "gridsp";
      j["side"] = problem.shortest_path_data().side;
      break;
    case ProblemKind::Portfolio: {
      const PortfolioData& d = problem.portfolio_data();
      j["kind"] = "portfolio";
      j["risk_bound"] = d.risk_bound;
      std::vector<std::vector<double>> sigma(d.sigma.rows());
      for (Eigen::Index r = 0; r < d.sigma.rows(); ++r)
        sigma[r] = std::vector<double>(d.sigma.row(r).begin(),
                                       d.sigma.row(r).end());
      j["sigma"] = sigma;
      break;
    }
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << j.dump(2) << '\n';
}

int cmd_gen(const CliArgs& args) {
  const harness::ExperimentConfig config = resolve_config(args);
  const harness::Preset preset = harness::preset_by_name(config.problem);
  const std::uint64_t data_seed = derive_seed(config.seed, kDatasetTag);
  const harness::PresetData data =
      harness::generate_preset_data(preset, data_seed);
  fs::create_directories(config.out);
  const fs::path dir(config.out);
  datagen::save_dataset_jsonl(data.full, (dir / "dataset.jsonl").string());
  write_problem_json(preset, data.problem, config.seed,
                     (dir / "problem.json").string());
  std::cout << "wrote " << data.full.size() << " instances to "
            << (dir / "dataset.jsonl").string() << '\n';
  return 0;
}

int cmd_train(const CliArgs& args) {
  harness::ExperimentConfig config = resolve_config(args);
  if (config.method == "all")
    throw ConfigError("train: pick one method (--method)");
  const harness::Preset preset = harness::preset_by_name(config.problem);
  const harness::MethodPreset base =
      preset.require(surrogates::method_from_string(config.method));

  harness::TrainOptions options;
  options.surrogate = base.surrogate;
  options.model_spec = preset.model;
  options.lr = config.lr > 0.0 ? config.lr : base.lr;
  options.epochs = config.epochs;
  options.init_seed = derive_seed(config.seed, 0, kTagInit);
  options.train_seed = derive_seed(config.seed, 0, kTagTrain);

  const harness::PresetData data = harness::generate_preset_data(
      preset, derive_seed(config.seed, kDatasetTag));
  const datagen::SplitDatasets split =
      datagen::split_dataset(data.full, config.split);

  const harness::TrainResult result =
      harness::train(data.problem, options, split.train, split.val);
  fs::create_directories(config.out);
  const fs::path dir(config.out);
  nn::save_checkpoint(result.model, (dir / "checkpoint.json").string());
  harness::write_training_curve_csv(result,
                                    (dir / "training_curve.csv").string());
  std::cout << "best validation " << result.best_val << " at epoch "
            << result.best_epoch << "; checkpoint written to "
            << (dir / "checkpoint.json").string() << '\n';
  return 0;
}

int cmd_attack(const CliArgs& args) {
  harness::ExperimentConfig config = resolve_config(args);
  if (config.method == "all")
    throw ConfigError("attack: pick one method (--method)");
  if (args.model_path.empty())
    throw ConfigError("attack: --model CHECKPOINT is required");
  const harness::Preset preset = harness::preset_by_name(config.problem);
  const harness::MethodPreset base =
      preset.require(surrogates::method_from_string(config.method));

  const nn::Model model = nn::load_checkpoint(args.model_path);
  const harness::PresetData data = harness::generate_preset_data(
      preset, derive_seed(config.seed, kDatasetTag));
  const datagen::SplitDatasets split =
      datagen::split_dataset(data.full, config.split);

  // Ranking losses compare against a solution pool; outside a training run
  // the pool is rebuilt from the training split's oracle solutions.
  surrogates::SolutionCache cache;
  const surrogates::SolutionCache* cache_ptr = nullptr;
  if (surrogates::requires_cache(base.surrogate.method)) {
    cache = surrogates::SolutionCache::from_dataset(split.train);
    cache_ptr = &cache;
  }

  harness::ExperimentResult result;
  result.problem_name = preset.name;
  result.report = harness::run_attack_sweep(
      data.problem, model, base.surrogate, split.test, config.attack_kinds,
      config.epsilons, derive_seed(config.seed, 0, kTagAttack), 0, cache_ptr);
  result.rows = harness::aggregate_report(preset.name, data.problem, split.test,
                                          result.report);
  harness::write_all_reports(result, config.out, args.svg);
  std::cout << "wrote " << result.rows.size() << " metric rows to "
            << config.out << '\n';
  return 0;
}

int cmd_sweep(const CliArgs& args) {
  const harness::ExperimentConfig config = resolve_config(args);
  const harness::ExperimentResult result = harness::run_experiment(config);
  harness::write_all_reports(result, config.out, args.svg);
  std::cout << "wrote " << result.rows.size() << " metric rows to "
            << config.out;
  if (!result.report.failures.empty())
    std::cout << " (" << result.report.failures.size()
              << " recorded failures, see failures.csv)";
  std::cout << '\n';
  return 0;
}

int cmd_report(const CliArgs& args) {
  if (args.results_path.empty())
    throw ConfigError("report: --results results.csv is required");
  const std::string out_dir = args.out.empty() ? "out" : args.out;
  const std::vector<harness::ResultRow> rows =
      harness::read_results_csv(args.results_path);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const std::vector<harness::SummaryRow> summary = harness::summarize(rows);
  harness::write_summary_csv(summary, (dir / "summary.csv").string());
  harness::write_lineplot_csv(summary, (dir / "lineplot.csv").string());
  harness::write_rank_correlation_csv(harness::rank_correlations(rows),
                                      (dir / "rank_correlation.csv").string());
  if (args.svg) {
    std::string metric = "abs_re";
    for (const harness::SummaryRow& s : summary)
      if (s.metric == "rre") {
        metric = "rre";
        break;
      }
    std::vector<std::string> problems, attacks_seen;
    for (const harness::SummaryRow& s : summary) {
      if (std::find(problems.begin(), problems.end(), s.problem) ==
          problems.end())
        problems.push_back(s.problem);
      if (std::find(attacks_seen.begin(), attacks_seen.end(), s.attack) ==
          attacks_seen.end())
        attacks_seen.push_back(s.attack);
    }
    for (const std::string& problem : problems)
      for (const std::string& attack : attacks_seen)
        harness::write_svg_lineplot(
            summary, problem, metric, attack,
            (dir / ("lineplot_" + metric + "_" + attack + ".svg")).string());
  }
  std::cout << "summarized " << rows.size() << " rows into " << out_dir << '\n';
  return 0;
}

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--problem,--preset", args.problem,
                  "problem preset (knapsack-60, knapsack-120, portfolio-deg1, "
                  "portfolio-deg16, gridsp-<side>)");
  cmd->add_option("--method", args.method, "method name or 'all'");
  cmd->add_option("--epsilon", args.epsilons, "perturbation level (repeatable)");
  cmd->add_option("--trials", args.trials, "number of trials");
  cmd->add_option("--seed", args.seed, "base seed");
  cmd->add_option("--epochs", args.epochs, "training epochs");
  cmd->add_option("--lr", args.lr, "learning rate override");
  cmd->add_option("--threads", args.threads,
                  "worker threads (0: DFLRB_THREADS or hardware)");
  cmd->add_option("--out", args.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision-focused learning robustness benchmark"};
  app.require_subcommand(1);
  CliArgs args;

  CLI::App* gen = app.add_subcommand("gen", "generate a preset dataset");
  add_common(gen, args);
  CLI::App* train = app.add_subcommand("train", "train one method");
  add_common(train, args);
  CLI::App* attack =
      app.add_subcommand("attack", "attack a trained checkpoint");
  add_common(attack, args);
  attack->add_option("--model", args.model_path, "checkpoint path");
  attack->add_flag("--svg", args.svg, "render SVG line plots");
  CLI::App* sweep =
      app.add_subcommand("sweep", "train + attack across methods and trials");
  add_common(sweep, args);
  sweep->add_flag("--svg", args.svg, "render SVG line plots");
  CLI::App* report = app.add_subcommand("report", "re-aggregate a results.csv");
  report->add_option("--results", args.results_path, "results.csv path");
  report->add_option("--out", args.out, "output directory");
  report->add_flag("--svg", args.svg, "render SVG line plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(args);
    if (train->parsed()) return cmd_train(args);
    if (attack->parsed()) return cmd_attack(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (report->parsed()) return cmd_report(args);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
