#pragma once

#include "dflrb/types.hpp"

namespace dflrb {

// Exact (knapsack, shortest path) or high-accuracy (portfolio interior
// point) solve of the decision problem for the given cost, in the problem's
// own sense. Deterministic: equal inputs give bit-identical decisions.
Solution solve_oracle(const DecisionProblem& problem, const Vec& cost);

double objective_value(const Vec& cost, const Vec& decision);

// Sense-normalized regret: f(x_hat, c) - f(x_star, c) for minimization and
// f(x_star, c) - f(x_hat, c) for maximization, so optimal decisions score 0
// and worse decisions score positive either way.
double regret(const DecisionProblem& problem, const Vec& true_cost,
              const Vec& decision_hat, const Vec& decision_star);

// Feasibility within kFeasTol (exact set membership for the discrete kinds).
bool is_feasible(const DecisionProblem& problem, const Vec& decision);

}  // namespace dflrb
