#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dflrb/attacks.hpp"
#include "dflrb/harness/config.hpp"
#include "dflrb/nn.hpp"
#include "dflrb/surrogates.hpp"
#include "dflrb/types.hpp"

namespace dflrb::harness {

struct InstanceRecord {
  int instance = 0;
  std::uint64_t attack_seed = 0;  // per-instance stream (excludes epsilon)
  Vec pred_clean;
  Vec pred_adv;
  Vec dec_clean;
  Vec dec_adv;
};

struct Cell {
  std::string method;
  attacks::AttackKind attack = attacks::AttackKind::PredictionFocused;
  double epsilon = 0.0;
  int trial = 0;
  std::vector<InstanceRecord> records;
};

// A recorded, non-fatal failure. `stage` is "train", "attack", or the metric
// name that could not be computed; epsilon -1 means every epsilon of the
// attack, instance -1 means the whole cell.
struct CellFailure {
  std::string method;
  std::string stage;
  std::string attack;
  double epsilon = -1.0;
  int trial = 0;
  int instance = -1;
  std::string error;
};

struct AttackReport {
  std::vector<Cell> cells;
  std::vector<CellFailure> failures;
};

// Full (attack x epsilon) grid for one trained model. epsilon 0 is always
// included as the clean baseline even when absent from `epsilons`; the
// decision-focused attack is skipped for TwoStageMSE. The FGSM direction is
// computed once per (instance, attack) with Rng(derive_seed(attack_seed,
// instance, tag)) where tag is 1 for PF and 2 for DF, so perturbations at
// different epsilons are colinear by construction. Per-instance solver or
// surrogate errors are recorded as failures, not rethrown.
AttackReport run_attack_sweep(const DecisionProblem& problem,
                              const nn::Model& model,
                              const surrogates::SurrogateConfig& surrogate,
                              const Dataset& test,
                              const std::vector<attacks::AttackKind>& kinds,
                              const std::vector<double>& epsilons,
                              std::uint64_t attack_seed, int trial,
                              const surrogates::SolutionCache* cache);

struct ResultRow {
  std::string problem;
  std::string method;
  std::string attack;
  double epsilon = 0.0;
  int trial = 0;
  std::string metric;
  double value = 0.0;
};

// Per-cell aggregates, one row per metric: mae, fe, mse_fooled_frac, abs_re,
// abs_fre everywhere, plus rre and frre where the optimal objective is
// structurally bounded away from zero (knapsack, grid shortest path; the
// portfolio reports only the absolute variants). A metric that fails on some
// instance of a cell is recorded as a failure and emits no row for that cell.
std::vector<ResultRow> aggregate_report(const std::string& problem_name,
                                        const DecisionProblem& problem,
                                        const Dataset& test, AttackReport& report);

struct ExperimentResult {
  std::string problem_name;
  std::vector<ResultRow> rows;
  AttackReport report;
};

// The full protocol: generate the preset dataset (shared by every trial),
// split it, then train + attack each (method, trial) pair in the worker
// pool. Seed streams, all derived from config.seed: dataset
// derive_seed(seed, 0xDA7A5E7); per trial t, model init derive_seed(seed, t,
// 0), training derive_seed(seed, t, 1), attacks derive_seed(seed, t, 2).
// A (method, trial) whose training fails is recorded and skipped.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace dflrb::harness
