#include "dflrb/datagen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dflrb/errors.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"

namespace dflrb::datagen {
namespace {

constexpr double kAr1Phi = 0.7;

Instance make_instance(const DecisionProblem& problem, Vec features, Vec cost) {
  Instance ins;
  ins.features = std::move(features);
  ins.true_cost = std::move(cost);
  const Solution sol = solve_oracle(problem, ins.true_cost);
  ins.oracle_decision = sol.decision;
  ins.oracle_objective = sol.objective;
  return ins;
}

}  // namespace

void PortfolioGenConfig::validate() const {
  if (n_samples < 1 || p < 1 || d < 1)
    throw ConfigError("portfolio gen: n_samples, p, d must be positive");
  if (deg < 1) throw ConfigError("portfolio gen: deg must be >= 1");
  if (eta < 0.0) throw ConfigError("portfolio gen: eta must be >= 0");
  if (fixed_mixing &&
      (fixed_mixing->rows() != d || fixed_mixing->cols() != p))
    throw ConfigError("portfolio gen: fixed_mixing must be d x p");
}

Vec portfolio_mean_return(const Mat& mixing, const Vec& z, int deg) {
  if (mixing.cols() != z.size())
    throw std::invalid_argument("portfolio_mean_return: dimension mismatch");
  if (deg < 1) throw ConfigError("portfolio_mean_return: deg must be >= 1");
  const double p = static_cast<double>(mixing.cols());
  const double offset = std::pow(0.1, 1.0 / static_cast<double>(deg));
  Vec base = (0.05 / std::sqrt(p)) * (mixing * z);
  base.array() += offset;
  if (deg == 1) return base;  // exact: no pow round trip
  Vec out(base.size());
  for (Eigen::Index j = 0; j < base.size(); ++j)
    out[j] = std::pow(base[j], static_cast<double>(deg));
  return out;
}

PortfolioGen gen_portfolio(const PortfolioGenConfig& config) {
  config.validate();
  Rng rng_static(derive_seed(config.seed, 0));

  Mat B(config.d, config.p);
  if (config.fixed_mixing) {
    B = *config.fixed_mixing;
  } else {
    for (int i = 0; i < config.d; ++i)
      for (int j = 0; j < config.p; ++j)
        B(i, j) = rng_static.uniform01() < 0.5 ? 1.0 : 0.0;
  }
  Mat L(config.d, 4);
  const double spread = 0.0025 * config.eta;
  for (int i = 0; i < config.d; ++i)
    for (int j = 0; j < 4; ++j) L(i, j) = rng_static.uniform(-spread, spread);

  const double noise_sd = 0.01 * config.eta;
  Mat sigma = L * L.transpose();
  sigma += noise_sd * noise_sd * Mat::Identity(config.d, config.d);
  const Vec e = Vec::Constant(config.d, 1.0 / static_cast<double>(config.d));
  double risk_bound = 2.25 * e.dot(sigma * e);
  // eta = 0 collapses sigma to zero; a unit bound keeps the (vacuous) risk
  // constraint well posed for the noiseless test hook.
  if (!(risk_bound > 0.0)) risk_bound = 1.0;

  PortfolioGen out{DecisionProblem::portfolio(sigma, risk_bound),
                   Dataset{}, std::move(B), std::move(L)};

  Rng rng_samples(derive_seed(config.seed, 1));
  out.dataset.instances.reserve(config.n_samples);
  for (int i = 0; i < config.n_samples; ++i) {
    const Vec z = rng_samples.normal_vec(config.p);
    const Vec f = rng_samples.normal_vec(4);
    const Vec xi = rng_samples.normal_vec(config.d);
    Vec c = portfolio_mean_return(out.mixing, z, config.deg);
    c += out.factor_loadings * f + noise_sd * xi;
    out.dataset.instances.push_back(make_instance(out.problem, z, std::move(c)));
  }
  return out;
}

void KnapsackGenConfig::validate() const {
  if (n_days < 1) throw ConfigError("knapsack gen: n_days must be positive");
  if (items_per_day < 1)
    throw ConfigError("knapsack gen: items_per_day must be positive");
  if (feature_dim < 1)
    throw ConfigError("knapsack gen: feature_dim must be positive");
  if (capacity < 0) throw ConfigError("knapsack gen: capacity must be >= 0");
  if (value_noise_sd < 0.0)
    throw ConfigError("knapsack gen: value_noise_sd must be >= 0");
  if (source == KnapsackSource::CsvFile && csv_path.empty())
    throw ConfigError("knapsack gen: csv source requires a path");
  if (fixed_weight && *fixed_weight <= 0)
    throw ConfigError("knapsack gen: fixed_weight must be positive");
}

double knapsack_price_from_features(const Vec& item_features) {
  const double m = static_cast<double>(item_features.size());
  return std::max(0.1, 5.0 + item_features.sum() / std::sqrt(m));
}

namespace {

struct KnapsackDay {
  Vec features;  // items_per_day * feature_dim, time-major
  Vec prices;    // items_per_day
};

KnapsackDay synthetic_energy_day(const KnapsackGenConfig& config, Rng& rng) {
  const int t_count = config.items_per_day;
  const int m = config.feature_dim;
  const double blend = std::sqrt(1.0 - kAr1Phi * kAr1Phi);
  KnapsackDay day;
  day.features = Vec(t_count * m);
  day.prices = Vec(t_count);
  Vec state = Vec::Zero(m);
  for (int t = 0; t < t_count; ++t) {
    for (int j = 0; j < m; ++j) {
      const double innov = rng.normal();
      state[j] = t == 0 ? innov : kAr1Phi * state[j] + blend * innov;
      day.features[t * m + j] = state[j];
    }
    day.prices[t] = knapsack_price_from_features(day.features.segment(t * m, m));
  }
  return day;
}

std::vector<KnapsackDay> csv_energy_days(const KnapsackGenConfig& config) {
  std::ifstream in(config.csv_path);
  if (!in) throw ConfigError("knapsack gen: cannot open " + config.csv_path);
  const int m = config.feature_dim;
  std::vector<double> features;
  std::vector<double> prices;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("knapsack gen: " + config.csv_path + " line " +
                          std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != m + 1)
      throw ConfigError("knapsack gen: " + config.csv_path + " line " +
                        std::to_string(line_no) + ": expected " +
                        std::to_string(m + 1) + " columns, got " +
                        std::to_string(vals.size()));
    features.insert(features.end(), vals.begin(), vals.end() - 1);
    prices.push_back(vals.back());
  }
  const long rows = static_cast<long>(prices.size());
  if (rows == 0 || rows % config.items_per_day != 0)
    throw ConfigError("knapsack gen: " + config.csv_path + " has " +
                      std::to_string(rows) + " rows; need a multiple of " +
                      std::to_string(config.items_per_day));
  const int t_count = config.items_per_day;
  std::vector<KnapsackDay> days(rows / t_count);
  for (std::size_t d = 0; d < days.size(); ++d) {
    days[d].features = Eigen::Map<const Vec>(features.data() + d * t_count * m,
                                             t_count * m);
    days[d].prices = Eigen::Map<const Vec>(prices.data() + d * t_count, t_count);
  }
  return days;
}

}  // namespace

KnapsackGen gen_knapsack(const KnapsackGenConfig& config) {
  config.validate();
  Rng rng_static(derive_seed(config.seed, 0));

  static const int kWeightChoices[3] = {3, 5, 7};
  Eigen::VectorXi weights(config.items_per_day);
  for (int i = 0; i < config.items_per_day; ++i)
    weights[i] = config.fixed_weight
                     ? *config.fixed_weight
                     : kWeightChoices[rng_static.uniform_index(3)];

  KnapsackGen out{DecisionProblem::knapsack(weights, config.capacity),
                  Dataset{}};

  Rng rng_samples(derive_seed(config.seed, 1));
  const bool from_csv = config.source == KnapsackSource::CsvFile;
  std::vector<KnapsackDay> csv_days;
  if (from_csv) csv_days = csv_energy_days(config);
  const std::size_t day_count = from_csv ? csv_days.size()
                                         : static_cast<std::size_t>(config.n_days);
  out.dataset.instances.reserve(day_count);

  // Draws interleave per day (features, then that day's 48 value noises), so
  // a day's contents do not shift when n_days changes.
  for (std::size_t d = 0; d < day_count; ++d) {
    KnapsackDay day = from_csv ? std::move(csv_days[d])
                               : synthetic_energy_day(config, rng_samples);
    Vec values(config.items_per_day);
    for (int t = 0; t < config.items_per_day; ++t) {
      const double price = config.fixed_price ? *config.fixed_price : day.prices[t];
      values[t] = price * static_cast<double>(weights[t]) +
                  config.value_noise_sd * rng_samples.normal();
    }
    out.dataset.instances.push_back(
        make_instance(out.problem, std::move(day.features), std::move(values)));
  }
  return out;
}

void GridSPGenConfig::validate() const {
  if (n_samples < 1) throw ConfigError("gridsp gen: n_samples must be positive");
  if (side < 2) throw ConfigError("gridsp gen: side must be >= 2");
  if (feature_dim < 1)
    throw ConfigError("gridsp gen: feature_dim must be positive");
}

double gridsp_cost_from_features(const Vec& beta, const Vec& node_features) {
  if (beta.size() != node_features.size())
    throw std::invalid_argument("gridsp_cost_from_features: dimension mismatch");
  const double m = static_cast<double>(beta.size());
  const double a = beta.dot(node_features) / std::sqrt(m);
  return 0.8 + 8.4 / (1.0 + std::exp(-a));
}

GridSPGen gen_gridsp(const GridSPGenConfig& config) {
  config.validate();
  Rng rng_static(derive_seed(config.seed, 0));
  const int n_nodes = config.side * config.side;
  const int m = config.feature_dim;

  GridSPGen out{DecisionProblem::shortest_path_grid(config.side), Dataset{},
                rng_static.normal_vec(m)};

  Rng rng_samples(derive_seed(config.seed, 1));
  out.dataset.instances.reserve(config.n_samples);
  for (int i = 0; i < config.n_samples; ++i) {
    Vec features(n_nodes * m);
    Vec cost(n_nodes);
    for (int v = 0; v < n_nodes; ++v) {
      const Vec f = rng_samples.normal_vec(m);
      features.segment(v * m, m) = f;
      cost[v] = gridsp_cost_from_features(out.cost_map, f);
    }
    out.dataset.instances.push_back(
        make_instance(out.problem, std::move(features), std::move(cost)));
  }
  return out;
}

SplitDatasets split_dataset(const Dataset& full, const SplitRatios& ratios) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (!(ratios.train > 0.0) || !(ratios.val > 0.0) || !(ratios.test > 0.0) ||
      std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split_dataset: ratios must be positive and sum to 1");
  const int n = full.size();
  const int n_train = static_cast<int>(n * ratios.train);
  const int n_val = static_cast<int>(n * ratios.val);
  const int n_test = n - n_train - n_val;
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw ConfigError("split_dataset: " + std::to_string(n) +
                      " instances leave an empty part");
  SplitDatasets out;
  out.train.split = Split::Train;
  out.val.split = Split::Validation;
  out.test.split = Split::Test;
  out.train.instances.assign(full.instances.begin(),
                             full.instances.begin() + n_train);
  out.val.instances.assign(full.instances.begin() + n_train,
                           full.instances.begin() + n_train + n_val);
  out.test.instances.assign(full.instances.begin() + n_train + n_val,
                            full.instances.end());
  return out;
}

void save_dataset_jsonl(const Dataset& dataset, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw ConfigError("save_dataset_jsonl: cannot open " + path);
  for (const Instance& ins : dataset.instances) {
    nlohmann::json row;
    row["features"] = std::vector<double>(
        ins.features.data(), ins.features.data() + ins.features.size());
    row["cost"] = std::vector<double>(
        ins.true_cost.data(), ins.true_cost.data() + ins.true_cost.size());
    outf << row.dump() << '\n';
  }
  if (!outf) throw ConfigError("save_dataset_jsonl: write failed for " + path);
}

Dataset load_dataset_jsonl(const DecisionProblem& problem,
                           const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_dataset_jsonl: cannot open " + path);
  Dataset out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("load_dataset_jsonl: " + path + " line " +
                        std::to_string(line_no) + ": " + e.what());
    }
    if (!row.contains("features") || !row.contains("cost") ||
        !row["features"].is_array() || !row["cost"].is_array())
      throw ConfigError("load_dataset_jsonl: " + path + " line " +
                        std::to_string(line_no) +
                        ": need 'features' and 'cost' arrays");
    const auto feats = row["features"].get<std::vector<double>>();
    const auto cost = row["cost"].get<std::vector<double>>();
    if (static_cast<int>(cost.size()) != problem.cost_dim())
      throw ConfigError("load_dataset_jsonl: " + path + " line " +
                        std::to_string(line_no) + ": cost dimension " +
                        std::to_string(cost.size()) + " != " +
                        std::to_string(problem.cost_dim()));
    out.instances.push_back(make_instance(
        problem, Eigen::Map<const Vec>(feats.data(), feats.size()),
        Eigen::Map<const Vec>(cost.data(), cost.size())));
  }
  if (out.instances.empty())
    throw ConfigError("load_dataset_jsonl: " + path + " is empty");
  return out;
}

}  // namespace dflrb::datagen
