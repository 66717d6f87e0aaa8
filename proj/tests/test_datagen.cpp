#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "dflrb/datagen.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/types.hpp"

using namespace dflrb;
using namespace dflrb::datagen;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(bool(out));
  out << text;
}

bool same_instances(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.instances[i].features != b.instances[i].features) return false;
    if (a.instances[i].true_cost != b.instances[i].true_cost) return false;
    if (a.instances[i].oracle_decision != b.instances[i].oracle_decision)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("portfolio mean return: degree one is an exact affine map") {
  Mat b(1, 4);
  b << 1, 0, 0, 0;
  Vec z = Vec::Zero(4);
  z[0] = 1.0;
  // 0.05 / sqrt(4) * 1 + 0.1 rounds to exactly 1/8.
  CHECK(portfolio_mean_return(b, z, 1)[0] == 0.125);
  CHECK(portfolio_mean_return(b, Vec::Zero(4), 1)[0] == 0.1);

  // Higher degrees: (base + 0.1^(1/deg))^deg, monotone in the blend.
  const double at0 = portfolio_mean_return(b, Vec::Zero(4), 2)[0];
  CHECK(std::abs(at0 - 0.1) <= 1e-15);
  const double lo = portfolio_mean_return(b, z, 16)[0];
  Vec z2 = z * 2.0;
  const double hi = portfolio_mean_return(b, z2, 16)[0];
  CHECK(lo > 0.1);
  CHECK(hi > lo);
  CHECK_THROWS_AS(portfolio_mean_return(b, z, 0), ConfigError);
  CHECK_THROWS(portfolio_mean_return(b, Vec::Zero(3), 1));
}

TEST_CASE("portfolio generator: determinism, shapes, risk bound") {
  PortfolioGenConfig cfg;
  cfg.n_samples = 12;
  cfg.p = 5;
  cfg.d = 7;
  cfg.seed = 2024;
  const PortfolioGen a = gen_portfolio(cfg);
  const PortfolioGen b = gen_portfolio(cfg);
  CHECK(a.mixing == b.mixing);
  CHECK(a.factor_loadings == b.factor_loadings);
  CHECK(same_instances(a.dataset, b.dataset));

  cfg.seed = 2025;
  const PortfolioGen c = gen_portfolio(cfg);
  CHECK(!same_instances(a.dataset, c.dataset));

  CHECK(a.dataset.size() == 12);
  CHECK(a.mixing.rows() == 7);
  CHECK(a.mixing.cols() == 5);
  CHECK(((a.mixing.array() == 0.0) || (a.mixing.array() == 1.0)).all());
  CHECK(a.factor_loadings.cols() == 4);
  CHECK(a.factor_loadings.cwiseAbs().maxCoeff() <= 0.0025);

  const PortfolioData& pd = a.problem.portfolio_data();
  const Vec e = Vec::Constant(7, 1.0 / 7.0);
  CHECK(std::abs(pd.risk_bound - 2.25 * e.dot(pd.sigma * e)) <= 1e-15);
  for (const Instance& ins : a.dataset.instances) {
    CHECK(ins.features.size() == 5);
    CHECK(ins.true_cost.size() == 7);
    CHECK(is_feasible(a.problem, ins.oracle_decision));
  }
}

TEST_CASE("portfolio hooks: fixed mixing and zero noise") {
  PortfolioGenConfig cfg;
  cfg.n_samples = 6;
  cfg.p = 4;
  cfg.d = 2;
  cfg.eta = 0.0;
  Mat b(2, 4);
  b << 1, 0, 0, 0, 1, 1, 0, 0;
  cfg.fixed_mixing = b;
  const PortfolioGen g = gen_portfolio(cfg);
  CHECK(g.mixing == b);
  CHECK(g.factor_loadings.isZero(0.0));
  // eta = 0 collapses sigma; the generator substitutes a unit risk bound.
  CHECK(g.problem.portfolio_data().sigma.isZero(0.0));
  CHECK(g.problem.portfolio_data().risk_bound == 1.0);
  // Without noise the cost is exactly the conditional mean of the features.
  for (const Instance& ins : g.dataset.instances)
    CHECK(ins.true_cost == portfolio_mean_return(b, ins.features, cfg.deg));

  cfg.fixed_mixing = Mat::Ones(3, 4);  // wrong shape for d = 2
  CHECK_THROWS_AS(gen_portfolio(cfg), ConfigError);
  cfg.fixed_mixing.reset();
  cfg.deg = 0;
  CHECK_THROWS_AS(gen_portfolio(cfg), ConfigError);
}

TEST_CASE("knapsack price floor") {
  Vec very_negative = Vec::Constant(8, -100.0);
  CHECK(knapsack_price_from_features(very_negative) == 0.1);
  CHECK(knapsack_price_from_features(Vec::Zero(4)) == 5.0);
  Vec ones = Vec::Ones(4);
  CHECK(knapsack_price_from_features(ones) == 5.0 + 4.0 / 2.0);
}

TEST_CASE("knapsack generator: determinism, weights, hooks") {
  KnapsackGenConfig cfg;
  cfg.n_days = 30;
  cfg.items_per_day = 10;
  cfg.feature_dim = 4;
  cfg.capacity = 20;
  cfg.seed = 99;
  const KnapsackGen a = gen_knapsack(cfg);
  const KnapsackGen b = gen_knapsack(cfg);
  CHECK(a.problem.knapsack_data().weights == b.problem.knapsack_data().weights);
  CHECK(same_instances(a.dataset, b.dataset));
  CHECK(a.dataset.size() == 30);
  for (int i = 0; i < 10; ++i) {
    const int w = a.problem.knapsack_data().weights[i];
    CHECK((w == 3 || w == 5 || w == 7));
  }
  for (const Instance& ins : a.dataset.instances) {
    CHECK(ins.features.size() == 40);
    CHECK(ins.true_cost.size() == 10);
  }

  // Noise-free fixed-price days: value is exactly price * weight.
  cfg.fixed_price = 2.0;
  cfg.fixed_weight = 3;
  cfg.value_noise_sd = 0.0;
  const KnapsackGen fixed = gen_knapsack(cfg);
  for (const Instance& ins : fixed.dataset.instances)
    CHECK(ins.true_cost == Vec::Constant(10, 6.0));

  // Same seed, same feature stream: only the values changed.
  CHECK(fixed.dataset.instances[0].features == a.dataset.instances[0].features);
}

TEST_CASE("knapsack AR(1) features are stationary with phi = 0.7") {
  KnapsackGenConfig cfg;
  cfg.n_days = 300;
  cfg.items_per_day = 48;
  cfg.feature_dim = 8;
  cfg.capacity = 60;
  cfg.seed = 7;
  const KnapsackGen g = gen_knapsack(cfg);

  const int m = cfg.feature_dim;
  double sum = 0.0, sum_sq = 0.0, lag_num = 0.0, lag_den = 0.0;
  long n = 0;
  for (const Instance& ins : g.dataset.instances) {
    for (int j = 0; j < m; ++j) {
      for (int t = 0; t < cfg.items_per_day; ++t) {
        const double x = ins.features[t * m + j];
        sum += x;
        sum_sq += x * x;
        ++n;
        if (t > 0) {
          const double prev = ins.features[(t - 1) * m + j];
          lag_num += x * prev;
          lag_den += prev * prev;
        }
      }
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - mean * mean;
  CHECK(std::abs(mean) <= 0.02);
  CHECK(std::abs(var - 1.0) <= 0.05);
  CHECK(std::abs(lag_num / lag_den - 0.7) <= 0.02);
}

TEST_CASE("knapsack value noise has the configured spread") {
  KnapsackGenConfig cfg;
  cfg.n_days = 200;
  cfg.items_per_day = 48;
  cfg.capacity = 60;
  cfg.seed = 12;
  cfg.fixed_price = 2.0;
  cfg.fixed_weight = 5;
  cfg.value_noise_sd = 5.0;
  const KnapsackGen g = gen_knapsack(cfg);
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  for (const Instance& ins : g.dataset.instances)
    for (int t = 0; t < cfg.items_per_day; ++t) {
      const double noise = ins.true_cost[t] - 10.0;
      sum += noise;
      sum_sq += noise * noise;
      ++n;
    }
  const double mean = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - mean * mean;
  CHECK(std::abs(mean) <= 0.2);
  CHECK(std::abs(var - 25.0) <= 1.0);
}

TEST_CASE("knapsack csv source") {
  const std::string path = "datagen_energy.csv";
  // 2 days x 2 items, 2 feature columns + price.
  write_file(path,
             "0.5,-0.5,4.0\n"
             "1.0,1.0,6.0\n"
             "0.0,0.0,5.0\n"
             "-1.0,2.0,3.5\n");
  KnapsackGenConfig cfg;
  cfg.items_per_day = 2;
  cfg.feature_dim = 2;
  cfg.capacity = 5;
  cfg.seed = 3;
  cfg.source = KnapsackSource::CsvFile;
  cfg.csv_path = path;
  cfg.value_noise_sd = 0.0;
  cfg.fixed_weight = 5;
  const KnapsackGen g = gen_knapsack(cfg);
  REQUIRE(g.dataset.size() == 2);  // day count comes from the file
  Vec f0(4);
  f0 << 0.5, -0.5, 1.0, 1.0;
  CHECK(g.dataset.instances[0].features == f0);
  Vec v0(2);
  v0 << 20.0, 30.0;  // price * weight
  CHECK(g.dataset.instances[0].true_cost == v0);
  Vec v1(2);
  v1 << 25.0, 17.5;
  CHECK(g.dataset.instances[1].true_cost == v1);

  // Error paths all carry the file and line context.
  cfg.csv_path = "missing_nope.csv";
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);
  write_file(path, "0.5,-0.5\n");
  cfg.csv_path = path;
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);  // wrong column count
  write_file(path, "0.5,abc,4.0\n");
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);  // bad number
  write_file(path, "0.5,1.0x,4.0\n");
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);  // trailing junk
  write_file(path, "0.5,-0.5,4.0\n");
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);  // 1 row, 2 items per day
  cfg.csv_path.clear();
  CHECK_THROWS_AS(gen_knapsack(cfg), ConfigError);  // csv source needs a path
  std::remove(path.c_str());
}

TEST_CASE("grid shortest-path generator") {
  CHECK(gridsp_cost_from_features(Vec::Zero(5), Vec::Ones(5)) == 5.0);
  Vec beta = Vec::Ones(1);
  CHECK(gridsp_cost_from_features(beta, Vec::Constant(1, 50.0)) <= 9.2);
  CHECK(gridsp_cost_from_features(beta, Vec::Constant(1, -50.0)) >= 0.8);
  CHECK_THROWS(gridsp_cost_from_features(Vec::Zero(2), Vec::Zero(3)));

  GridSPGenConfig cfg;
  cfg.n_samples = 8;
  cfg.side = 4;
  cfg.feature_dim = 5;
  cfg.seed = 31;
  const GridSPGen a = gen_gridsp(cfg);
  const GridSPGen b = gen_gridsp(cfg);
  CHECK(a.cost_map == b.cost_map);
  CHECK(same_instances(a.dataset, b.dataset));
  CHECK(a.cost_map.size() == 5);
  for (const Instance& ins : a.dataset.instances) {
    CHECK(ins.features.size() == 16 * 5);
    CHECK(ins.true_cost.size() == 16);
    CHECK(ins.true_cost.minCoeff() > 0.8);
    CHECK(ins.true_cost.maxCoeff() < 9.2);
    for (int v = 0; v < 16; ++v)
      CHECK(ins.true_cost[v] ==
            gridsp_cost_from_features(a.cost_map, ins.features.segment(v * 5, 5)));
    CHECK(is_feasible(a.problem, ins.oracle_decision));
  }
  cfg.side = 1;
  CHECK_THROWS_AS(gen_gridsp(cfg), ConfigError);
}

TEST_CASE("dataset split")
{
  Dataset full;
  for (int i = 0; i < 10; ++i) {
    Instance ins;
    ins.features = Vec::Constant(2, static_cast<double>(i));
    ins.true_cost = Vec::Ones(2);
    ins.oracle_decision = Vec::Zero(2);
    full.instances.push_back(ins);
  }
  const SplitDatasets s = split_dataset(full, SplitRatios{});
  CHECK(s.train.size() == 6);
  CHECK(s.val.size() == 2);
  CHECK(s.test.size() == 2);
  CHECK(s.train.split == Split::Train);
  CHECK(s.val.split == Split::Validation);
  CHECK(s.test.split == Split::Test);
  // Contiguous in generation order.
  CHECK(s.train.instances[0].features[0] == 0.0);
  CHECK(s.val.instances[0].features[0] == 6.0);
  CHECK(s.test.instances[0].features[0] == 8.0);

  Dataset five;
  five.instances.assign(full.instances.begin(), full.instances.begin() + 5);
  const SplitDatasets s5 = split_dataset(five, SplitRatios{});
  CHECK(s5.train.size() == 3);
  CHECK(s5.val.size() == 1);
  CHECK(s5.test.size() == 1);

  Dataset four;
  four.instances.assign(full.instances.begin(), full.instances.begin() + 4);
  CHECK_THROWS_AS(split_dataset(four, SplitRatios{}), ConfigError);
  CHECK_THROWS_AS(split_dataset(full, SplitRatios{0.5, 0.2, 0.2}), ConfigError);
  CHECK_THROWS_AS(split_dataset(full, SplitRatios{1.0, 0.0, 0.0}), ConfigError);
}

TEST_CASE("jsonl round trip preserves every bit and recomputes oracles") {
  KnapsackGenConfig cfg;
  cfg.n_days = 3;
  cfg.items_per_day = 4;
  cfg.feature_dim = 2;
  cfg.capacity = 8;
  cfg.seed = 5;
  const KnapsackGen g = gen_knapsack(cfg);
  const std::string path = "datagen_roundtrip.jsonl";
  save_dataset_jsonl(g.dataset, path);
  const Dataset back = load_dataset_jsonl(g.problem, path);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.instances[i].features == g.dataset.instances[i].features);
    CHECK(back.instances[i].true_cost == g.dataset.instances[i].true_cost);
    CHECK(back.instances[i].oracle_decision ==
          g.dataset.instances[i].oracle_decision);
    CHECK(back.instances[i].oracle_objective ==
          g.dataset.instances[i].oracle_objective);
  }
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_dataset_jsonl(g.problem, "missing_nope.jsonl"),
                  ConfigError);
  write_file(path, "\n\n");
  CHECK_THROWS_AS(load_dataset_jsonl(g.problem, path), ConfigError);  // empty
  write_file(path, "{oops\n");
  CHECK_THROWS_AS(load_dataset_jsonl(g.problem, path), ConfigError);
  write_file(path, "{\"features\": [1, 2]}\n");
  CHECK_THROWS_AS(load_dataset_jsonl(g.problem, path), ConfigError);
  write_file(path, "{\"features\": [1], \"cost\": [1, 2]}\n");
  CHECK_THROWS_AS(load_dataset_jsonl(g.problem, path), ConfigError);  // dim
  std::remove(path.c_str());
}

TEST_CASE("generator config validation") {
  PortfolioGenConfig p;
  p.n_samples = 0;
  CHECK_THROWS_AS(gen_portfolio(p), ConfigError);
  p = PortfolioGenConfig{};
  p.eta = -1.0;
  CHECK_THROWS_AS(gen_portfolio(p), ConfigError);

  KnapsackGenConfig k;
  k.items_per_day = 0;
  CHECK_THROWS_AS(gen_knapsack(k), ConfigError);
  k = KnapsackGenConfig{};
  k.capacity = -1;
  CHECK_THROWS_AS(gen_knapsack(k), ConfigError);
  k = KnapsackGenConfig{};
  k.value_noise_sd = -0.5;
  CHECK_THROWS_AS(gen_knapsack(k), ConfigError);
  k = KnapsackGenConfig{};
  k.fixed_weight = 0;
  CHECK_THROWS_AS(gen_knapsack(k), ConfigError);

  GridSPGenConfig gsp;
  gsp.n_samples = 0;
  CHECK_THROWS_AS(gen_gridsp(gsp), ConfigError);
}
