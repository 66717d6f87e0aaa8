#include <benchmark/benchmark.h>

#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"
#include "dflrb/solvers/portfolio.hpp"
#include "dflrb/solvers/qp.hpp"
#include "dflrb/types.hpp"

using namespace dflrb;

namespace {

Vec random_costs(Rng& rng, int n, double lo, double hi) {
  Vec c(n);
  for (int i = 0; i < n; ++i) c[i] = lo + (hi - lo) * rng.uniform01();
  return c;
}

DecisionProblem bench_knapsack(Rng& rng, int n, long capacity) {
  const int choices[3] = {3, 5, 7};
  Eigen::VectorXi w(n);
  for (int i = 0; i < n; ++i)
    w[i] = choices[static_cast<int>(rng.uniform01() * 3) % 3];
  return DecisionProblem::knapsack(w, capacity);
}

void BM_KnapsackDP(benchmark::State& state) {
  Rng rng(1);
  const auto problem = bench_knapsack(rng, 48, state.range(0));
  const Vec c = random_costs(rng, 48, 1.0, 50.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_oracle(problem, c).objective);
}
BENCHMARK(BM_KnapsackDP)->Arg(60)->Arg(120);

void BM_GridShortestPath(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(2);
  const auto problem = DecisionProblem::shortest_path_grid(side);
  const Vec c = random_costs(rng, side * side, 0.5, 9.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_oracle(problem, c).objective);
}
BENCHMARK(BM_GridShortestPath)->Arg(12)->Arg(24);

void BM_PortfolioIPM(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.uniform01() - 0.5;
  const Mat sigma = a.transpose() * a / d + 0.005 * Mat::Identity(d, d);
  const auto problem = DecisionProblem::portfolio(sigma, 0.1);
  const Vec c = random_costs(rng, d, -0.2, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(solvers::portfolio_solve(problem, c).objective);
}
BENCHMARK(BM_PortfolioIPM)->Arg(5)->Arg(20)->Arg(50);

void BM_QPRegularized(benchmark::State& state) {
  Rng rng(4);
  const auto problem = bench_knapsack(rng, 48, 60);
  const Vec c = random_costs(rng, 48, 1.0, 50.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solvers::qp_regularized_solve(problem, c, 1.0).decision.sum());
}
BENCHMARK(BM_QPRegularized);

}  // namespace

BENCHMARK_MAIN();
