#include "dflrb/solvers/knapsack.hpp"

#include <vector>

namespace dflrb::solvers {

Solution knapsack_solve(const Vec& values, const Eigen::VectorXi& weights,
                        long capacity) {
  const int n = static_cast<int>(weights.size());
  if (values.size() != n)
    throw std::invalid_argument("knapsack_solve: values/weights size mismatch");
  if (capacity < 0) throw ConfigError("knapsack_solve: negative capacity");
  const int cap = static_cast<int>(capacity);

  // dp[i][w] = best total value using items [0, i) within weight w.
  // take[i][w] records whether item i-1 is included there; strict '>' means
  // ties resolve to exclude, and items with value <= 0 are never included.
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(cap + 1, 0.0));
  std::vector<std::vector<char>> take(n + 1, std::vector<char>(cap + 1, 0));
  for (int i = 1; i <= n; ++i) {
    const int wi = weights[i - 1];
    const double vi = values[i - 1];
    for (int w = 0; w <= cap; ++w) {
      dp[i][w] = dp[i - 1][w];
      if (wi <= w && vi > 0.0 && dp[i - 1][w - wi] + vi > dp[i][w]) {
        dp[i][w] = dp[i - 1][w - wi] + vi;
        take[i][w] = 1;
      }
    }
  }

  Solution sol;
  sol.decision = Vec::Zero(n);
  int w = cap;
  for (int i = n; i >= 1; --i) {
    if (take[i][w]) {
      sol.decision[i - 1] = 1.0;
      w -= weights[i - 1];
    }
  }
  sol.objective = values.dot(sol.decision);
  return sol;
}

Solution knapsack_solve(const DecisionProblem& problem, const Vec& values) {
  problem.check_cost(values);
  const KnapsackData& d = problem.knapsack_data();
  return knapsack_solve(values, d.weights, d.capacity);
}

}  // namespace dflrb::solvers
