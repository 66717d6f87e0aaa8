#include "dflrb/harness/train.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "csv_fmt.hpp"
#include "dflrb/errors.hpp"
#include "dflrb/metrics.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"

namespace dflrb::harness {

void TrainOptions::validate() const {
  surrogate.validate();
  model_spec.validate();
  if (!(lr > 0.0)) throw ConfigError("train: lr must be > 0");
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
}

double validation_metric(const DecisionProblem& problem, const nn::Model& model,
                         const Dataset& dataset, surrogates::Method method) {
  if (dataset.instances.empty())
    throw ConfigError("validation_metric: empty dataset");
  double total = 0.0;
  for (const Instance& ins : dataset.instances) {
    const Vec c_hat = model.forward(ins.features);
    if (method == surrogates::Method::TwoStageMSE) {
      total += (c_hat - ins.true_cost).squaredNorm();
    } else {
      const Vec dec = solve_oracle(problem, c_hat).decision;
      total += metrics::abs_re(problem, ins.true_cost, dec, ins.oracle_decision);
    }
  }
  return total / static_cast<double>(dataset.size());
}

TrainResult train(const DecisionProblem& problem, const TrainOptions& options,
                  const Dataset& train_set, const Dataset& val_set) {
  options.validate();
  train_set.validate(problem);
  val_set.validate(problem);
  if (options.model_spec.output_dim != problem.cost_dim())
    throw ConfigError("train: model output dimension " +
                      std::to_string(options.model_spec.output_dim) +
                      " != cost dimension " +
                      std::to_string(problem.cost_dim()));
  if (options.model_spec.input_dim !=
      static_cast<int>(train_set.instances[0].features.size()))
    throw ConfigError("train: model input dimension mismatch");

  Rng init_rng(options.init_seed);
  nn::Model model(options.model_spec, init_rng);
  const surrogates::Method method = options.surrogate.method;
  const bool ranking = surrogates::requires_cache(method);

  TrainResult result{model, ranking ? surrogates::SolutionCache::from_dataset(
                                          train_set)
                                    : surrogates::SolutionCache{},
                     {}, {}, {}, -1,
                     std::numeric_limits<double>::quiet_NaN()};
  if (options.epochs == 0) return result;

  Rng rng(options.train_seed);
  nn::AdamState adam = nn::AdamState::init(model, options.lr);
  nn::PlateauScheduler scheduler(options.lr);
  const int n = train_set.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  double best = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // Fisher-Yates, high index down, one uniform_index draw per swap.
    for (int i = n - 1; i >= 1; --i)
      std::swap(order[i], order[static_cast<int>(rng.uniform_index(i + 1))]);

    double epoch_loss = 0.0;
    for (int k = 0; k < n; ++k) {
      const Instance& ins = train_set.instances[order[k]];
      try {
        const Vec c_hat = model.forward(ins.features);
        if (ranking)
          surrogates::cache_update(result.cache, problem, c_hat,
                                   options.surrogate.p_solve, rng);
        const surrogates::LossGrad lg =
            surrogates::loss_and_grad(problem, options.surrogate, c_hat,
                                      ins.true_cost, ins.oracle_decision,
                                      &result.cache, &rng);
        if (!std::isfinite(lg.loss))
          throw NumericalError("non-finite loss " + std::to_string(lg.loss));
        const Vec upstream = problem.sign() * lg.grad;
        nn::adam_step(adam, model, model.backward(ins.features, upstream));
        epoch_loss += lg.loss;
      } catch (const NumericalError& e) {
        throw NumericalError("train: " + surrogates::to_string(method) +
                             " diverged at epoch " + std::to_string(epoch) +
                             ", instance " + std::to_string(order[k]) + ": " +
                             e.what());
      }
    }
    result.train_curve.push_back(epoch_loss / n);

    const double val = validation_metric(problem, model, val_set, method);
    if (!std::isfinite(val))
      throw NumericalError("train: non-finite validation metric at epoch " +
                           std::to_string(epoch));
    result.val_curve.push_back(val);
    result.lr_curve.push_back(adam.lr);
    if (val < best) {
      best = val;
      result.best_epoch = epoch;
      result.best_val = val;
      result.model = model;
    }
    adam.lr = scheduler.step(val);
  }
  return result;
}

void write_training_curve_csv(const TrainResult& result,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_training_curve_csv: cannot open " + path);
  out << "epoch,train_loss,val_metric,lr\n";
  for (std::size_t e = 0; e < result.train_curve.size(); ++e)
    out << e << ',' << format_double(result.train_curve[e]) << ','
        << format_double(result.val_curve[e]) << ','
        << format_double(result.lr_curve[e]) << '\n';
  if (!out) throw ConfigError("write_training_curve_csv: write failed");
}

}  // namespace dflrb::harness
