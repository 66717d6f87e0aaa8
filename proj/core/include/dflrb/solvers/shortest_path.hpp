#pragma once

#include "dflrb/types.hpp"

namespace dflrb::solvers {

// Dijkstra already assumes non-negative arc costs; node costs below this
// floor are lifted to it before the search (the reported objective still
// uses the caller's costs).
inline constexpr double kCostFloor = 1e-6;

// Exact node-weighted shortest path from the top-left to the bottom-right
// grid cell, 8-neighbour moves, both endpoints counted. Dijkstra on the
// node-split digraph; ties break on smaller node id so the solution is
// unique and deterministic. The decision is the 0/1 node-indicator vector.
Solution shortest_path_solve(const DecisionProblem& problem,
                             const Vec& node_costs);

// The node sequence of the optimal path, source to sink (for inspection).
std::vector<int> shortest_path_nodes(const DecisionProblem& problem,
                                     const Vec& node_costs);

}  // namespace dflrb::solvers
