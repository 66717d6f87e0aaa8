#include <benchmark/benchmark.h>

#include "dflrb/attacks.hpp"
#include "dflrb/nn.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"
#include "dflrb/surrogates.hpp"
#include "dflrb/types.hpp"

using namespace dflrb;

namespace {

// Shared capacity-60 style fixture: 48 items, weights in {3,5,7}.
struct Fixture {
  DecisionProblem problem;
  Vec c;
  Vec c_hat;
  Vec x_star;
  surrogates::SolutionCache cache;

  Fixture() : problem(make_problem()) {
    Rng rng(7);
    c = draw(rng);
    c_hat = draw(rng);
    x_star = solve_oracle(problem, c).decision;
    cache.insert(x_star);
    for (int i = 0; i < 31; ++i)
      cache.insert(solve_oracle(problem, draw(rng)).decision);
  }

  static DecisionProblem make_problem() {
    Rng rng(6);
    const int choices[3] = {3, 5, 7};
    Eigen::VectorXi w(48);
    for (int i = 0; i < 48; ++i)
      w[i] = choices[static_cast<int>(rng.uniform01() * 3) % 3];
    return DecisionProblem::knapsack(w, 60);
  }

  static Vec draw(Rng& rng) {
    Vec v(48);
    for (int i = 0; i < 48; ++i) v[i] = rng.uniform(1.0, 50.0);
    return v;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_LossGrad(benchmark::State& state) {
  const Fixture& f = fixture();
  const auto method = static_cast<surrogates::Method>(state.range(0));
  surrogates::SurrogateConfig cfg;
  cfg.method = method;
  Rng rng(11);
  for (auto _ : state) {
    const surrogates::LossGrad lg = surrogates::loss_and_grad(
        f.problem, cfg, f.c_hat, f.c, f.x_star, &f.cache, &rng);
    benchmark::DoNotOptimize(lg.loss);
  }
}
BENCHMARK(BM_LossGrad)
    ->DenseRange(0, static_cast<int>(surrogates::all_methods().size()) - 1)
    ->Name("BM_LossGrad(method)");

void BM_PFAttack(benchmark::State& state) {
  const Fixture& f = fixture();
  nn::ModelSpec spec;
  spec.kind = nn::ModelKind::Linear;
  spec.input_dim = 48;
  spec.output_dim = 48;
  Rng init(12);
  const nn::Model model(spec, init);
  Rng rng(13);
  const Vec z = Fixture::draw(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(attacks::pf_fgsm(model, z, f.c, 0.1).sum());
}
BENCHMARK(BM_PFAttack);

void BM_DFAttack(benchmark::State& state) {
  const Fixture& f = fixture();
  nn::ModelSpec spec;
  spec.kind = nn::ModelKind::Linear;
  spec.input_dim = 48;
  spec.output_dim = 48;
  Rng init(12);
  const nn::Model model(spec, init);
  Rng rng(13);
  const Vec z = Fixture::draw(rng);
  surrogates::SurrogateConfig cfg;
  cfg.method = surrogates::Method::SPOPlus;
  Rng attack_rng(14);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        attacks::df_fgsm(model, f.problem, cfg, z, f.c, f.x_star, 0.1,
                         &f.cache, &attack_rng)
            .sum());
}
BENCHMARK(BM_DFAttack);

}  // namespace

BENCHMARK_MAIN();
