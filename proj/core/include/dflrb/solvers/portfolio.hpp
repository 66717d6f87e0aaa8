#pragma once

#include <vector>

#include "dflrb/types.hpp"

namespace dflrb::solvers {

// Interior-point solve of max c'x s.t. 1'x <= 1, x >= 0, x' sigma x <= r,
// with KKT residuals and per-stage objectives exposed for verification.
struct PortfolioSolveInfo {
  Solution solution;
  Vec mu_nonneg;          // multipliers for x >= 0
  double mu_budget = 0.0; // multiplier for 1'x <= 1
  double mu_risk = 0.0;   // multiplier for x' sigma x <= r
  double stationarity_residual = 0.0;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
  // Objective c'x at the end of each barrier stage; non-decreasing.
  std::vector<double> stage_objectives;
};

// Log-barrier interior point. The barrier parameter starts at 1 and grows
// tenfold per stage until the per-constraint complementarity 1/t is two
// orders of magnitude under `tol`. Costs are scaled to unit max-norm before
// solving so accuracy does not depend on the cost magnitude; if no entry is
// positive the optimum x = 0 is returned directly with exact KKT data.
// Throws NumericalError if residuals above `tol` remain.
PortfolioSolveInfo portfolio_solve_info(const DecisionProblem& problem,
                                        const Vec& returns,
                                        double tol = kFeasTol);

Solution portfolio_solve(const DecisionProblem& problem, const Vec& returns,
                         double tol = kFeasTol);

}  // namespace dflrb::solvers
