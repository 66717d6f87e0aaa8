#include "dflrb/solvers/shortest_path.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace dflrb::solvers {
namespace {

// Dijkstra over grid nodes; node costs include both endpoints. Returns the
// predecessor array. Pop order (distance, then node id) and strict-improve
// relaxation over ascending neighbour lists make the result deterministic.
std::vector<int> dijkstra(const ShortestPathData& g, const Vec& cost) {
  const int n = g.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> pred(n, -1);
  std::vector<char> done(n, 0);

  auto floored = [&](int v) { return std::max(cost[v], kCostFloor); };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[g.source()] = floored(g.source());
  heap.emplace(dist[g.source()], g.source());

  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (v == g.sink()) break;
    for (int w : g.neighbors[v]) {
      if (done[w]) continue;
      const double cand = d + floored(w);
      if (cand < dist[w]) {
        dist[w] = cand;
        pred[w] = v;
        heap.emplace(cand, w);
      }
    }
  }
  if (!done[g.sink()])
    throw NumericalError("shortest_path_solve: sink unreachable");
  return pred;
}

}  // namespace

std::vector<int> shortest_path_nodes(const DecisionProblem& problem,
                                     const Vec& node_costs) {
  problem.check_cost(node_costs);
  const ShortestPathData& g = problem.shortest_path_data();
  const std::vector<int> pred = dijkstra(g, node_costs);
  std::vector<int> path;
  for (int v = g.sink(); v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Solution shortest_path_solve(const DecisionProblem& problem,
                             const Vec& node_costs) {
  const std::vector<int> path = shortest_path_nodes(problem, node_costs);
  Solution sol;
  sol.decision = Vec::Zero(problem.decision_dim());
  for (int v : path) sol.decision[v] = 1.0;
  sol.objective = node_costs.dot(sol.decision);
  return sol;
}

}  // namespace dflrb::solvers
