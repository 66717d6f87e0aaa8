#include <cmath>
#include <random>

#include <doctest.h>

#include "dflrb/attacks.hpp"
#include "dflrb/nn.hpp"
#include "dflrb/oracle.hpp"
#include "dflrb/rng.hpp"
#include "dflrb/surrogates.hpp"
#include "dflrb/types.hpp"
#include "support/test_oracles.hpp"

using namespace dflrb;
using namespace dflrb::attacks;

namespace {

std::mt19937_64 gen(90241);

Vec random_vec(int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(gen);
  return v;
}

DecisionProblem tiny_knapsack() {
  Eigen::VectorXi w(2);
  w << 1, 1;
  return DecisionProblem::knapsack(w, 1);
}

nn::Model linear_model(int in, int out, std::uint64_t seed) {
  nn::ModelSpec spec;
  spec.kind = nn::ModelKind::Linear;
  spec.input_dim = in;
  spec.output_dim = out;
  Rng rng(seed);
  return nn::Model(spec, rng);
}

}  // namespace

TEST_CASE("attack kind names") {
  CHECK(to_string(AttackKind::PredictionFocused) == "pf");
  CHECK(to_string(AttackKind::DecisionFocused) == "df");
  CHECK(attack_kind_from_string("pf") == AttackKind::PredictionFocused);
  CHECK(attack_kind_from_string("df") == AttackKind::DecisionFocused);
  CHECK_THROWS_AS(attack_kind_from_string("fgsm"), ConfigError);

  AttackConfig cfg;
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.epsilon = 0.1;
  cfg.clamp_box = ClampBox{1.0, 0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.clamp_box = ClampBox{0.0, 1.0};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("fgsm step: sign semantics are exact") {
  Vec z(4), g(4);
  z << 1.0, -2.0, 0.5, 3.0;
  g << 2.5, -0.1, 0.0, -0.0;
  const Vec out = fgsm_step(z, g, 0.25);
  // sign(0) = 0 and sign(-0.0) = 0: untouched components are bitwise equal.
  CHECK(out[0] == 1.25);
  CHECK(out[1] == -2.25);
  CHECK(out[2] == 0.5);
  CHECK(out[3] == 3.0);

  // Every component must be one of fl(z_i - eps), z_i, fl(z_i + eps).
  const double eps = 0.01;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec zz = random_vec(6, -3.0, 3.0);
    const Vec gg = random_vec(6, -1.0, 1.0);
    const Vec adv = fgsm_step(zz, gg, eps);
    for (int i = 0; i < 6; ++i) {
      const bool member = adv[i] == zz[i] + eps || adv[i] == zz[i] ||
                          adv[i] == zz[i] - eps;
      CHECK(member);
    }
  }

  // eps = 0 returns the input bitwise.
  const Vec zz = random_vec(5, -2.0, 2.0);
  CHECK(fgsm_step(zz, random_vec(5, -1.0, 1.0), 0.0) == zz);

  CHECK_THROWS(fgsm_step(z, Vec::Ones(3), 0.1));
  CHECK_THROWS_AS(fgsm_step(z, g, -0.5), ConfigError);
}

TEST_CASE("fgsm clamp box applies after the step") {
  Vec z(3), g(3);
  z << 0.95, 0.05, 0.5;
  g << 1.0, -1.0, 1.0;
  const Vec out = fgsm_step(z, g, 0.1, ClampBox{0.0, 1.0});
  CHECK(out[0] == 1.0);   // 1.05 clamped
  CHECK(out[1] == 0.0);   // -0.05 clamped
  CHECK(out[2] == 0.6);
}

TEST_CASE("pf input gradient matches finite differences") {
  const auto model = linear_model(4, 3, 5150);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec z = random_vec(4, -1.0, 1.0);
    const Vec c = random_vec(3, -1.0, 1.0);
    const Vec g = pf_input_gradient(model, z, c);
    const Vec v = random_vec(4, -1.0, 1.0).normalized();
    const double fd = testsup::central_diff(
        [&](const Vec& zz) { return (model.forward(zz) - c).squaredNorm(); },
        z, v, 1e-6);
    CHECK(testsup::fd_close(fd, g.dot(v), 1e-6));
  }
  CHECK_THROWS(pf_input_gradient(model, Vec::Ones(4), Vec::Ones(2)));
}

TEST_CASE("pf direction is epsilon-free and pf_fgsm composes it") {
  const auto model = linear_model(3, 2, 61);
  const Vec z = random_vec(3, -1.0, 1.0);
  const Vec c = random_vec(2, -1.0, 1.0);
  const Vec g = pf_input_gradient(model, z, c);
  for (double eps : {0.0, 0.01, 0.1}) {
    CHECK(pf_fgsm(model, z, c, eps) == fgsm_step(z, g, eps));
  }
}

TEST_CASE("df input gradient chains the surrogate through the model") {
  const auto p = tiny_knapsack();
  const auto model = linear_model(3, 2, 4242);
  const Vec z = random_vec(3, -1.0, 1.0);
  Vec c(2);
  c << 3.0, 1.0;
  const Vec xs = solve_oracle(p, c).decision;

  surrogates::SurrogateConfig cfg;
  cfg.method = surrogates::Method::SPOPlus;
  const Vec g = df_input_gradient(model, p, cfg, z, c, xs);

  // Independent chain: upstream = sign * dL/dc~ through W transpose.
  const Vec c_hat = model.forward(z);
  const surrogates::LossGrad lg =
      surrogates::spo_plus(p, c_hat, c, xs);
  const Vec expect = model.weight(0).transpose() * Vec(p.sign() * lg.grad);
  CHECK(g == expect);

  // Finite differences of the surrogate loss as a function of z.
  for (int trial = 0; trial < 10; ++trial) {
    const Vec zz = random_vec(3, -1.0, 1.0);
    const Vec gd = df_input_gradient(model, p, cfg, zz, c, xs);
    const Vec v = random_vec(3, -1.0, 1.0).normalized();
    const double fd = testsup::central_diff(
        [&](const Vec& x) {
          return surrogates::spo_plus(p, model.forward(x), c, xs).loss;
        },
        zz, v, 1e-7);
    CHECK(testsup::fd_close(fd, gd.dot(v), 1e-5));
  }
}

TEST_CASE("df attack rejects two_stage") {
  const auto p = tiny_knapsack();
  const auto model = linear_model(3, 2, 7);
  surrogates::SurrogateConfig cfg;
  cfg.method = surrogates::Method::TwoStageMSE;
  Vec c(2);
  c << 3.0, 1.0;
  const Vec xs = solve_oracle(p, c).decision;
  CHECK_THROWS_AS(
      df_input_gradient(model, p, cfg, Vec::Zero(3), c, xs),
      ConfigError);
  CHECK_THROWS_AS(
      df_fgsm(model, p, cfg, Vec::Zero(3), c, xs, 0.1),
      ConfigError);
}

TEST_CASE("df attack forwards cache and rng requirements") {
  const auto p = tiny_knapsack();
  const auto model = linear_model(3, 2, 8);
  Vec c(2);
  c << 3.0, 1.0;
  const Vec xs = solve_oracle(p, c).decision;
  const Vec z = random_vec(3, -1.0, 1.0);

  surrogates::SurrogateConfig cfg;
  cfg.method = surrogates::Method::Pairwise;
  CHECK_THROWS_AS(df_fgsm(model, p, cfg, z, c, xs, 0.1), ConfigError);
  surrogates::SolutionCache cache;
  cache.insert(xs);
  CHECK_NOTHROW(df_fgsm(model, p, cfg, z, c, xs, 0.1, &cache));

  cfg.method = surrogates::Method::FY;
  CHECK_THROWS_AS(df_fgsm(model, p, cfg, z, c, xs, 0.1), ConfigError);
  Rng rng(3), rng2(3);
  const Vec a = df_fgsm(model, p, cfg, z, c, xs, 0.1, nullptr, &rng);
  const Vec b = df_fgsm(model, p, cfg, z, c, xs, 0.1, nullptr, &rng2);
  CHECK(a == b);  // same rng state, same perturbation
}

TEST_CASE("df perturbation obeys the exact membership contract") {
  const auto p = tiny_knapsack();
  const auto model = linear_model(3, 2, 9);
  Vec c(2);
  c << 3.0, 1.0;
  const Vec xs = solve_oracle(p, c).decision;
  surrogates::SurrogateConfig cfg;
  cfg.method = surrogates::Method::MAPContrastive;
  const double eps = 0.05;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec z = random_vec(3, -1.0, 1.0);
    const Vec adv = df_fgsm(model, p, cfg, z, c, xs, eps);
    for (int i = 0; i < 3; ++i) {
      const bool member =
          adv[i] == z[i] + eps || adv[i] == z[i] || adv[i] == z[i] - eps;
      CHECK(member);
    }
    CHECK(df_fgsm(model, p, cfg, z, c, xs, 0.0) == z);
  }
}

TEST_CASE("pf attack never decreases the mse of a linear model") {
  // For J(z) = ||Wz + b - c||^2 and the ascent step z + eps sign(grad J),
  // convexity in z guarantees J(z_adv) >= J(z).
  const auto model = linear_model(5, 4, 31337);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec z = random_vec(5, -2.0, 2.0);
    const Vec c = random_vec(4, -2.0, 2.0);
    const Vec adv = pf_fgsm(model, z, c, 0.15);
    const double before = (model.forward(z) - c).squaredNorm();
    const double after = (model.forward(adv) - c).squaredNorm();
    CHECK(after >= before - 1e-12);
  }
}
