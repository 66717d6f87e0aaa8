#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dflrb/attacks.hpp"
#include "dflrb/datagen.hpp"
#include "dflrb/surrogates.hpp"

namespace dflrb::harness {

// One experiment: a problem preset, one method (or "all" applicable ones),
// and the attack/trial grid. JSON files use exactly these field names:
// problem, method, surrogate (object of hyperparameter overrides), lr,
// trials, epsilons, attacks, split {train,val,test}, epochs, seed, out,
// threads. CLI flags override file values.
struct ExperimentConfig {
  std::string problem = "knapsack-60";  // preset name
  std::string method = "all";
  // Hyperparameter overrides applied on top of the preset, keyed by
  // SurrogateConfig field name (dbb_lambda, imle_lambda, imle_eps,
  // imle_kappa, fy_eps, fy_samples, qptl_mu, listwise_tau, pairwise_theta,
  // p_solve). Single-method runs only.
  std::map<std::string, double> surrogate_overrides;
  double lr = 0.0;  // 0 keeps the preset value
  int trials = 10;
  std::vector<double> epsilons = {0.01, 0.1, 0.15};
  std::vector<attacks::AttackKind> attack_kinds = {
      attacks::AttackKind::PredictionFocused,
      attacks::AttackKind::DecisionFocused};
  datagen::SplitRatios split;
  int epochs = 50;
  std::uint64_t seed = 0;
  std::string out = "out";
  int threads = 0;  // 0: DFLRB_THREADS, then hardware

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& config);

}  // namespace dflrb::harness
