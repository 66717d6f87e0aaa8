#include <cmath>
#include <random>

#include <doctest.h>

#include "dflrb/solvers/qp.hpp"
#include "dflrb/types.hpp"
#include "support/test_oracles.hpp"

using namespace dflrb;
using solvers::KKTSolution;
using solvers::kkt_jacobian_vector_product;
using solvers::qp_regularized_solve;

namespace {

std::mt19937_64 gen(77002);

Vec random_vec(int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(gen);
  return v;
}

DecisionProblem small_knapsack() {
  Eigen::VectorXi w(6);
  w << 3, 5, 7, 3, 5, 7;
  return DecisionProblem::knapsack(w, 14);
}

DecisionProblem small_portfolio() {
  Mat f(5, 2);
  f << 0.2, -0.1, 0.05, 0.3, -0.2, 0.1, 0.15, 0.05, 0.1, -0.25;
  Mat sigma = f * f.transpose();
  sigma += 0.01 * Mat::Identity(5, 5);
  return DecisionProblem::portfolio(sigma, 0.08);
}

// Strict complementarity margin: every linear inequality must have either a
// clearly positive multiplier or clearly positive slack. Finite differences
// are only meaningful away from active-set changes.
bool knapsack_nondegenerate(const DecisionProblem& p, const KKTSolution& k,
                            double delta) {
  const KnapsackData& d = p.knapsack_data();
  const int n = static_cast<int>(d.weights.size());
  double cap_slack = static_cast<double>(d.capacity);
  for (int i = 0; i < n; ++i) {
    cap_slack -= d.weights[i] * k.decision[i];
    if (std::max(k.mu[i], k.decision[i]) < delta) return false;
    if (std::max(k.mu[n + i], 1.0 - k.decision[i]) < delta) return false;
  }
  return std::max(k.mu[2 * n], cap_slack) >= delta;
}

bool portfolio_nondegenerate(const DecisionProblem& p, const KKTSolution& k,
                             double delta) {
  const PortfolioData& d = p.portfolio_data();
  const int n = static_cast<int>(d.sigma.rows());
  for (int i = 0; i < n; ++i)
    if (std::max(k.mu[i], k.decision[i]) < delta) return false;
  if (std::max(k.mu[n], 1.0 - k.decision.sum()) < delta) return false;
  const double risk_slack = d.risk_bound - k.decision.dot(d.sigma * k.decision);
  return std::max(k.mu_quad, risk_slack) >= delta;
}

}  // namespace

TEST_CASE("regularized knapsack relaxation: residuals and feasibility") {
  const auto problem = small_knapsack();
  for (int trial = 0; trial < 10; ++trial) {
    const Vec c = random_vec(6, -1.0, 4.0);
    const KKTSolution k = qp_regularized_solve(problem, c, 0.5);
    // The active-set polish should leave near-exact KKT data.
    CHECK(k.stationarity_residual <= 1e-8);
    CHECK(k.primal_residual <= 1e-8);
    CHECK(k.complementarity_residual <= 1e-8);
    CHECK(k.decision.minCoeff() >= -1e-9);
    CHECK(k.decision.maxCoeff() <= 1.0 + 1e-9);
    double load = 0.0;
    for (int i = 0; i < 6; ++i)
      load += problem.knapsack_data().weights[i] * k.decision[i];
    CHECK(load <= 14.0 + 1e-8);
    CHECK(k.mu.minCoeff() >= 0.0);
  }
}

TEST_CASE("one-variable interior example: dx/dc = 1/(2 mu_reg)") {
  Eigen::VectorXi w(1);
  w << 1;
  const auto problem = DecisionProblem::knapsack(w, 1);
  const double mu_reg = 1.0;
  const KKTSolution k = qp_regularized_solve(problem, Vec::Ones(1), mu_reg);
  CHECK(std::abs(k.decision[0] - 0.5) <= 1e-8);
  const Vec grad = kkt_jacobian_vector_product(problem, k, mu_reg, Vec::Ones(1));
  CHECK(std::abs(grad[0] - 0.5) <= 1e-6);
}

TEST_CASE("kkt jvp matches finite differences on the knapsack relaxation") {
  const auto problem = small_knapsack();
  const double mu_reg = 0.5;
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 25; ++trial) {
    const Vec c = random_vec(6, 0.1, 4.0);
    const KKTSolution k = qp_regularized_solve(problem, c, mu_reg, 1e-9);
    if (!knapsack_nondegenerate(problem, k, 1e-3)) continue;
    ++checked;

    const Vec u = random_vec(6, -1.0, 1.0);
    const Vec v = random_vec(6, -1.0, 1.0).normalized();
    const Vec grad = kkt_jacobian_vector_product(problem, k, mu_reg, u);
    const double fd = testsup::central_diff(
        [&](const Vec& cc) {
          return u.dot(qp_regularized_solve(problem, cc, mu_reg, 1e-9).decision);
        },
        c, v, 1e-5);
    CHECK(testsup::fd_close(fd, grad.dot(v), 1e-3));
  }
  CHECK(checked == 25);
}

TEST_CASE("kkt jvp matches finite differences on the portfolio QCQP") {
  const auto problem = small_portfolio();
  const double mu_reg = 0.5;
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 25; ++trial) {
    Vec c = random_vec(5, -0.5, 1.0);
    c[0] = 1.0;
    const KKTSolution k = qp_regularized_solve(problem, c, mu_reg, 1e-9);
    if (!portfolio_nondegenerate(problem, k, 1e-3)) continue;
    ++checked;

    const Vec u = random_vec(5, -1.0, 1.0);
    const Vec v = random_vec(5, -1.0, 1.0).normalized();
    const Vec grad = kkt_jacobian_vector_product(problem, k, mu_reg, u);
    const double fd = testsup::central_diff(
        [&](const Vec& cc) {
          return u.dot(qp_regularized_solve(problem, cc, mu_reg, 1e-9).decision);
        },
        c, v, 1e-5);
    CHECK(testsup::fd_close(fd, grad.dot(v), 1e-3));
  }
  CHECK(checked == 25);
}

TEST_CASE("shortest-path relaxation solves over arc flows") {
  const auto problem = DecisionProblem::shortest_path_grid(3);
  const Vec c = random_vec(9, 0.5, 5.0);
  const KKTSolution k = qp_regularized_solve(problem, c, 1.0);
  CHECK(k.primal_residual <= 1e-6);
  CHECK(k.decision.size() == 9);
  CHECK(k.decision.minCoeff() >= -1e-8);
  // Node occupancies in a unit source-sink flow cannot exceed 1 by much.
  CHECK(k.decision.maxCoeff() <= 1.0 + 1e-6);
  // Source and sink internal arcs carry the full unit flow.
  CHECK(std::abs(k.decision[0] - 1.0) <= 1e-6);
  CHECK(std::abs(k.decision[8] - 1.0) <= 1e-6);

  const Vec grad =
      kkt_jacobian_vector_product(problem, k, 1.0, random_vec(9, -1.0, 1.0));
  CHECK(grad.allFinite());
}

TEST_CASE("qp error cases") {
  const auto problem = small_knapsack();
  CHECK_THROWS_AS(qp_regularized_solve(problem, Vec::Ones(6), 0.0), ConfigError);
  CHECK_THROWS_AS(qp_regularized_solve(problem, Vec::Ones(6), -1.0),
                  ConfigError);
  Eigen::VectorXi w(2);
  w << 2, 3;
  const auto empty = DecisionProblem::knapsack(w, 0);
  CHECK_THROWS_AS(qp_regularized_solve(empty, Vec::Ones(2), 1.0),
                  NumericalError);
}

TEST_CASE("regularization pulls the relaxed solution toward the interior") {
  const auto problem = small_knapsack();
  Vec c(6);
  c << 5.0, 4.0, 3.0, 5.0, 4.0, 3.0;
  const KKTSolution weak = qp_regularized_solve(problem, c, 0.1);
  const KKTSolution strong = qp_regularized_solve(problem, c, 50.0);
  // A large quadratic term dominates the linear profit and shrinks x.
  CHECK(strong.decision.lpNorm<1>() < weak.decision.lpNorm<1>());
  CHECK(strong.decision.maxCoeff() < 0.5);
}
