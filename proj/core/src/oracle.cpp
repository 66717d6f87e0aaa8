#include "dflrb/oracle.hpp"

#include <cmath>

#include "dflrb/solvers/knapsack.hpp"
#include "dflrb/solvers/portfolio.hpp"
#include "dflrb/solvers/shortest_path.hpp"

namespace dflrb {

Solution solve_oracle(const DecisionProblem& problem, const Vec& cost) {
  problem.check_cost(cost);
  switch (problem.kind()) {
    case ProblemKind::Knapsack:
      return solvers::knapsack_solve(problem, cost);
    case ProblemKind::ShortestPath:
      return solvers::shortest_path_solve(problem, cost);
    case ProblemKind::Portfolio:
      return solvers::portfolio_solve(problem, cost);
  }
  throw ConfigError("solve_oracle: unknown problem kind");
}

double objective_value(const Vec& cost, const Vec& decision) {
  if (cost.size() != decision.size())
    throw std::invalid_argument("objective_value: dimension mismatch");
  return cost.dot(decision);
}

double regret(const DecisionProblem& problem, const Vec& true_cost,
              const Vec& decision_hat, const Vec& decision_star) {
  problem.check_cost(true_cost);
  const double f_hat = objective_value(true_cost, decision_hat);
  const double f_star = objective_value(true_cost, decision_star);
  return problem.sign() * (f_hat - f_star);
}

bool is_feasible(const DecisionProblem& problem, const Vec& decision) {
  if (decision.size() != problem.decision_dim()) return false;
  switch (problem.kind()) {
    case ProblemKind::Knapsack: {
      const KnapsackData& d = problem.knapsack_data();
      long total = 0;
      for (Eigen::Index i = 0; i < decision.size(); ++i) {
        if (decision[i] != 0.0 && decision[i] != 1.0) return false;
        if (decision[i] == 1.0) total += d.weights[static_cast<int>(i)];
      }
      return total <= d.capacity;
    }
    case ProblemKind::ShortestPath: {
      // The decision must be the node indicator of a source-to-sink walk on
      // the 8-neighbour grid; walk existence is checked by adjacency along
      // any ordering, which for indicators of simple paths reduces to: both
      // endpoints selected, and the selected set is traversable. A cheap
      // exact check: the selected nodes admit a path from source to sink
      // using only selected nodes, and every selected node lies on it.
      const ShortestPathData& g = problem.shortest_path_data();
      std::vector<int> selected;
      for (Eigen::Index v = 0; v < decision.size(); ++v) {
        if (decision[v] != 0.0 && decision[v] != 1.0) return false;
        if (decision[v] == 1.0) selected.push_back(static_cast<int>(v));
      }
      if (selected.empty()) return false;
      if (decision[g.source()] != 1.0 || decision[g.sink()] != 1.0)
        return false;
      // Depth-first search for a Hamiltonian path over the selected set from
      // source to sink. Selected sets are small (solver paths), so the
      // backtracking search is cheap in practice.
      const int want = static_cast<int>(selected.size());
      std::vector<char> used(decision.size(), 0);
      auto dfs = [&](auto&& self, int v, int depth) -> bool {
        if (v == g.sink()) return depth == want;
        for (int w : g.neighbors[v]) {
          if (decision[w] == 1.0 && !used[w]) {
            used[w] = 1;
            if (self(self, w, depth + 1)) return true;
            used[w] = 0;
          }
        }
        return false;
      };
      used[g.source()] = 1;
      return dfs(dfs, g.source(), 1);
    }
    case ProblemKind::Portfolio: {
      const PortfolioData& d = problem.portfolio_data();
      if ((decision.array() < -kFeasTol).any()) return false;
      if (decision.sum() > 1.0 + kFeasTol) return false;
      const double risk = decision.dot(d.sigma * decision);
      return risk <= d.risk_bound + kFeasTol;
    }
  }
  return false;
}

}  // namespace dflrb
