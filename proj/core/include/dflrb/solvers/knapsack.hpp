#pragma once

#include "dflrb/types.hpp"

namespace dflrb::solvers {

// Exact 0/1 knapsack maximization by dynamic programming over integer
// capacity, O(n * capacity). Real-valued profits are allowed; items with
// value <= 0 are never taken (they cannot improve a maximum). Ties between
// including and excluding an item resolve to exclude, which fixes a unique
// optimal solution for any value vector.
Solution knapsack_solve(const Vec& values, const Eigen::VectorXi& weights,
                        long capacity);

Solution knapsack_solve(const DecisionProblem& problem, const Vec& values);

}  // namespace dflrb::solvers
