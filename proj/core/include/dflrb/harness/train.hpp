#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dflrb/nn.hpp"
#include "dflrb/surrogates.hpp"
#include "dflrb/types.hpp"

namespace dflrb::harness {

struct TrainOptions {
  surrogates::SurrogateConfig surrogate;
  nn::ModelSpec model_spec;
  double lr = 0.01;
  int epochs = 50;
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;

  void validate() const;  // throws ConfigError
};

struct TrainResult {
  nn::Model model;                  // best-validation weights
  surrogates::SolutionCache cache;  // final pool (ranking methods)
  std::vector<double> train_curve;  // mean surrogate loss per epoch
  std::vector<double> val_curve;    // validation metric per epoch
  std::vector<double> lr_curve;     // lr in effect during each epoch
  int best_epoch = -1;              // -1 when epochs == 0
  double best_val = 0.0;
};

// Validation quality: mean squared prediction error for TwoStageMSE, mean
// (sense-normalized) regret of x*(c_hat) for every decision-focused method.
double validation_metric(const DecisionProblem& problem, const nn::Model& model,
                         const Dataset& dataset, surrogates::Method method);

// Per-instance stochastic training: Fisher-Yates shuffle each epoch, then
// forward / surrogate loss / backward / Adam step per instance, with the
// plateau scheduler stepped on the validation metric once per epoch. Returns
// the best-validation checkpoint (the initial model when epochs == 0).
// Divergence (non-finite loss or gradients) raises NumericalError with the
// epoch and instance in the message.
TrainResult train(const DecisionProblem& problem, const TrainOptions& options,
                  const Dataset& train_set, const Dataset& val_set);

void write_training_curve_csv(const TrainResult& result,
                              const std::string& path);

}  // namespace dflrb::harness
