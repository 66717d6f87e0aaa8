#include "dflrb/harness/sweep.hpp"

#include <cmath>
#include <set>

#include "dflrb/errors.hpp"
#include "dflrb/harness/presets.hpp"
#include "dflrb/harness/train.hpp"
#include "dflrb/harness/worker_pool.hpp"
#include "dflrb/metrics.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"

namespace dflrb::harness {
namespace {

constexpr std::uint64_t kDatasetTag = 0xDA7A5E7;
constexpr std::uint64_t kTagInit = 0, kTagTrain = 1, kTagAttack = 2;

std::vector<double> effective_epsilons(const std::vector<double>& epsilons) {
  std::set<double> dedup(epsilons.begin(), epsilons.end());
  dedup.insert(0.0);
  for (double e : dedup)
    if (!(e >= 0.0)) throw ConfigError("epsilons must be >= 0");
  return {dedup.begin(), dedup.end()};
}

void apply_overrides(surrogates::SurrogateConfig& surrogate,
                     const std::map<std::string, double>& overrides) {
  auto as_int = [](const std::string& key, double v) {
    if (v < 1.0 || v != std::floor(v))
      throw ConfigError("config: '" + key + "' must be a positive integer");
    return static_cast<int>(v);
  };
  for (const auto& [key, value] : overrides) {
    if (key == "dbb_lambda") surrogate.dbb_lambda = value;
    else if (key == "imle_lambda") surrogate.imle_lambda = value;
    else if (key == "imle_eps") surrogate.imle_eps = value;
    else if (key == "imle_kappa") surrogate.imle_kappa = as_int(key, value);
    else if (key == "fy_eps") surrogate.fy_eps = value;
    else if (key == "fy_samples") surrogate.fy_samples = as_int(key, value);
    else if (key == "qptl_mu") surrogate.qptl_mu = value;
    else if (key == "listwise_tau") surrogate.listwise_tau = value;
    else if (key == "pairwise_theta") surrogate.pairwise_theta = value;
    else if (key == "p_solve") surrogate.p_solve = value;
    else throw ConfigError("config: unknown surrogate field '" + key + "'");
  }
  surrogate.validate();
}

}  // namespace

AttackReport run_attack_sweep(const DecisionProblem& problem,
                              const nn::Model& model,
                              const surrogates::SurrogateConfig& surrogate,
                              const Dataset& test,
                              const std::vector<attacks::AttackKind>& kinds,
                              const std::vector<double>& epsilons,
                              std::uint64_t attack_seed, int trial,
                              const surrogates::SolutionCache* cache) {
  test.validate(problem);
  const std::vector<double> eps = effective_epsilons(epsilons);
  const std::string method_name = surrogates::to_string(surrogate.method);
  const int n = test.size();

  AttackReport report;
  std::vector<Vec> pred_clean(n);
  std::vector<Vec> dec_clean(n);
  std::vector<char> clean_ok(n, 1);
  for (int i = 0; i < n; ++i) {
    pred_clean[i] = model.forward(test.instances[i].features);
    try {
      dec_clean[i] = solve_oracle(problem, pred_clean[i]).decision;
    } catch (const NumericalError& e) {
      clean_ok[i] = 0;
      report.failures.push_back(
          {method_name, "clean_solve", "", -1.0, trial, i, e.what()});
    }
  }

  for (attacks::AttackKind kind : kinds) {
    if (kind == attacks::AttackKind::DecisionFocused &&
        surrogate.method == surrogates::Method::TwoStageMSE)
      continue;
    const std::string attack_name = attacks::to_string(kind);
    const std::uint64_t tag =
        kind == attacks::AttackKind::PredictionFocused ? 1 : 2;

    std::vector<Cell> cells;
    cells.reserve(eps.size());
    for (double e : eps) cells.push_back({method_name, kind, e, trial, {}});

    for (int i = 0; i < n; ++i) {
      if (!clean_ok[i]) continue;
      const Instance& ins = test.instances[i];
      const std::uint64_t seed_i = derive_seed(attack_seed, i, tag);
      Vec grad;
      try {
        if (kind == attacks::AttackKind::PredictionFocused) {
          grad = attacks::pf_input_gradient(model, ins.features, ins.true_cost);
        } else {
          Rng rng(seed_i);
          grad = attacks::df_input_gradient(model, problem, surrogate,
                                            ins.features, ins.true_cost,
                                            ins.oracle_decision, cache, &rng);
        }
      } catch (const NumericalError& e) {
        report.failures.push_back(
            {method_name, "attack", attack_name, -1.0, trial, i, e.what()});
        continue;
      }
      for (std::size_t k = 0; k < eps.size(); ++k) {
        try {
          InstanceRecord rec;
          rec.instance = i;
          rec.attack_seed = seed_i;
          rec.pred_clean = pred_clean[i];
          rec.dec_clean = dec_clean[i];
          const Vec z_adv = attacks::fgsm_step(ins.features, grad, eps[k]);
          rec.pred_adv = model.forward(z_adv);
          rec.dec_adv = solve_oracle(problem, rec.pred_adv).decision;
          cells[k].records.push_back(std::move(rec));
        } catch (const NumericalError& e) {
          report.failures.push_back({method_name, "attack_solve", attack_name,
                                     eps[k], trial, i, e.what()});
        }
      }
    }
    for (Cell& cell : cells) report.cells.push_back(std::move(cell));
  }
  return report;
}

std::vector<ResultRow> aggregate_report(const std::string& problem_name,
                                        const DecisionProblem& problem,
                                        const Dataset& test,
                                        AttackReport& report) {
  test.validate(problem);
  const bool has_rre = problem.kind() != ProblemKind::Portfolio;
  std::vector<ResultRow> rows;

  for (const Cell& cell : report.cells) {
    if (cell.records.empty()) continue;  // failures already recorded
    const std::string attack_name = attacks::to_string(cell.attack);
    auto emit = [&](const std::string& metric, auto&& compute) {
      try {
        rows.push_back({problem_name, cell.method, attack_name, cell.epsilon,
                        cell.trial, metric, compute()});
      } catch (const NumericalError& e) {
        report.failures.push_back({cell.method, metric, attack_name,
                                   cell.epsilon, cell.trial, -1, e.what()});
      }
    };

    std::vector<Vec> pa, pc, costs;
    pa.reserve(cell.records.size());
    pc.reserve(cell.records.size());
    costs.reserve(cell.records.size());
    for (const InstanceRecord& rec : cell.records) {
      pa.push_back(rec.pred_adv);
      pc.push_back(rec.pred_clean);
      costs.push_back(test.instances[rec.instance].true_cost);
    }
    const double count = static_cast<double>(cell.records.size());

    emit("mae", [&] { return metrics::mae(pa, costs); });
    emit("fe", [&] { return metrics::fe(pa, pc); });
    emit("mse_fooled_frac", [&] {
      int fooled = 0;
      for (std::size_t i = 0; i < pa.size(); ++i)
        if ((pa[i] - costs[i]).squaredNorm() > (pc[i] - costs[i]).squaredNorm())
          ++fooled;
      return fooled / count;
    });
    emit("abs_re", [&] {
      double total = 0.0;
      for (const InstanceRecord& rec : cell.records)
        total += metrics::abs_re(problem, test.instances[rec.instance].true_cost,
                                 rec.dec_adv,
                                 test.instances[rec.instance].oracle_decision);
      return total / count;
    });
    emit("abs_fre", [&] {
      double total = 0.0;
      for (const InstanceRecord& rec : cell.records)
        total += metrics::abs_fre(
            problem, test.instances[rec.instance].true_cost, rec.dec_adv,
            rec.dec_clean, test.instances[rec.instance].oracle_decision);
      return total / count;
    });
    if (has_rre) {
      emit("rre", [&] {
        double total = 0.0;
        for (const InstanceRecord& rec : cell.records)
          total += metrics::rre(problem, test.instances[rec.instance].true_cost,
                                rec.dec_adv,
                                test.instances[rec.instance].oracle_decision);
        return total / count;
      });
      emit("frre", [&] {
        double total = 0.0;
        for (const InstanceRecord& rec : cell.records)
          total +=
              metrics::frre(problem, test.instances[rec.instance].true_cost,
                            rec.dec_adv, rec.dec_clean,
                            test.instances[rec.instance].oracle_decision);
        return total / count;
      });
    }
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Preset preset = preset_by_name(config.problem);

  std::vector<MethodPreset> methods;
  if (config.method == "all") {
    methods = preset.methods;
  } else {
    MethodPreset m = preset.require(surrogates::method_from_string(config.method));
    if (config.lr > 0.0) m.lr = config.lr;
    apply_overrides(m.surrogate, config.surrogate_overrides);
    methods = {m};
  }

  const PresetData data =
      generate_preset_data(preset, derive_seed(config.seed, kDatasetTag));
  const datagen::SplitDatasets split =
      datagen::split_dataset(data.full, config.split);

  const int trial_count = config.trials;
  const int task_count = static_cast<int>(methods.size()) * trial_count;
  std::vector<AttackReport> partial(task_count);

  run_parallel(task_count, config.threads, [&](int task) {
    const MethodPreset& method = methods[task / trial_count];
    const int trial = task % trial_count;
    try {
      TrainOptions options;
      options.surrogate = method.surrogate;
      options.model_spec = preset.model;
      options.lr = method.lr;
      options.epochs = config.epochs;
      options.init_seed = derive_seed(config.seed, trial, kTagInit);
      options.train_seed = derive_seed(config.seed, trial, kTagTrain);
      const TrainResult trained = train(data.problem, options, split.train,
                                        split.val);
      const surrogates::SolutionCache* cache =
          surrogates::requires_cache(method.surrogate.method) ? &trained.cache
                                                              : nullptr;
      partial[task] = run_attack_sweep(
          data.problem, trained.model, method.surrogate, split.test,
          config.attack_kinds, config.epsilons,
          derive_seed(config.seed, trial, kTagAttack), trial, cache);
    } catch (const NumericalError& e) {
      partial[task].failures.push_back(
          {surrogates::to_string(method.surrogate.method), "train", "", -1.0,
           trial, -1, e.what()});
    }
  });

  ExperimentResult out;
  out.problem_name = preset.name;
  for (AttackReport& p : partial) {
    for (Cell& cell : p.cells) out.report.cells.push_back(std::move(cell));
    for (CellFailure& f : p.failures)
      out.report.failures.push_back(std::move(f));
  }
  out.rows = aggregate_report(preset.name, data.problem, split.test, out.report);
  return out;
}

}  // namespace dflrb::harness
