#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dflrb/types.hpp"

namespace dflrb::datagen {

// Every generator draws from two independent streams derived from the seed:
// derive_seed(seed, 0) for static problem data (mixing matrices, weights,
// cost maps) and derive_seed(seed, 1) for per-sample draws. The per-field
// draw order is documented at each generator and is part of the determinism
// contract: the same seed reproduces a dataset bit-for-bit.

struct PortfolioGenConfig {
  int n_samples = 400;
  int p = 5;   // features per sample
  int d = 20;  // assets
  int deg = 1;
  double eta = 1.0;  // noise magnitude
  std::uint64_t seed = 0;
  std::optional<Mat> fixed_mixing;  // test hook: replaces the Bernoulli draw

  void validate() const;  // throws ConfigError
};

struct PortfolioGen {
  DecisionProblem problem;
  Dataset dataset;
  Mat mixing;           // B, d x p, entries in {0,1}
  Mat factor_loadings;  // L, d x 4
};

// Conditional mean return: c_j = ((0.05/sqrt(p)) (B z)_j + 0.1^(1/deg))^deg.
Vec portfolio_mean_return(const Mat& mixing, const Vec& z, int deg);

// Static draws (stream 0): B row-major Bernoulli(0.5), then L row-major
// Uniform(-0.0025 eta, +0.0025 eta). Per-sample draws (stream 1): z (p
// normals), f (4 normals), xi (d normals); c = mean + L f + 0.01 eta xi.
// Sigma = L L' + (0.01 eta)^2 I; risk bound = 2.25 e' Sigma e, e = (1/d) 1.
PortfolioGen gen_portfolio(const PortfolioGenConfig& config);

enum class KnapsackSource { SyntheticEnergy, CsvFile };

struct KnapsackGenConfig {
  int n_days = 300;
  int items_per_day = 48;
  int feature_dim = 8;
  long capacity = 60;
  std::uint64_t seed = 0;
  KnapsackSource source = KnapsackSource::SyntheticEnergy;
  std::string csv_path;  // CsvFile only

  double value_noise_sd = 5.0;        // test hook: 0 removes the value noise
  std::optional<double> fixed_price;  // test hook: constant energy price
  std::optional<int> fixed_weight;    // test hook: all weights equal

  void validate() const;  // throws ConfigError
};

struct KnapsackGen {
  DecisionProblem problem;
  Dataset dataset;
};

// Energy price for one half-hour: max(0.1, 5 + mean-scaled feature blend).
double knapsack_price_from_features(const Vec& item_features);

// Static draws (stream 0): one weight per item from {3,5,7} via
// uniform_index(3). Per-day draws (stream 1), synthetic source: 48 x 8 AR(1)
// feature innovations (time-major, phi = 0.7, stationary start), then 48
// value noises; value_i = price_i * w_i + value_noise_sd * N(0,1). The CSV
// source reads features and prices from file (8 feature columns + price, one
// row per half-hour, a day every 48 rows) and draws only the value noises.
KnapsackGen gen_knapsack(const KnapsackGenConfig& config);

struct GridSPGenConfig {
  int n_samples = 500;
  int side = 12;
  int feature_dim = 5;  // per node
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct GridSPGen {
  DecisionProblem problem;
  Dataset dataset;
  Vec cost_map;  // beta, the static feature-to-cost direction
};

// Node cost in (0.8, 9.2): 0.8 + 8.4 * sigmoid(beta . f / sqrt(m)).
double gridsp_cost_from_features(const Vec& beta, const Vec& node_features);

// Static draws (stream 0): beta (m normals). Per-sample draws (stream 1):
// m normals per node in node order; instance features are the node-major
// concatenation.
GridSPGen gen_gridsp(const GridSPGenConfig& config);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct SplitDatasets {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Contiguous split in generation order (samples are exchangeable by
// construction): first floor(n * train) instances, then floor(n * val), rest
// test. Ratios must be positive and sum to 1; every part must be non-empty.
SplitDatasets split_dataset(const Dataset& full, const SplitRatios& ratios);

// JSON-lines round trip, one instance per line:
// {"features":[...], "cost":[...]}. Oracle fields are recomputed on load.
void save_dataset_jsonl(const Dataset& dataset, const std::string& path);
Dataset load_dataset_jsonl(const DecisionProblem& problem,
                           const std::string& path);

}  // namespace dflrb::datagen
