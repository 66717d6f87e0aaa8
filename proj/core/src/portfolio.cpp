#include "dflrb/solvers/portfolio.hpp"

#include <cmath>
#include <sstream>

#include "barrier.hpp"

namespace dflrb::solvers {

PortfolioSolveInfo portfolio_solve_info(const DecisionProblem& problem,
                                        const Vec& returns, double tol) {
  problem.check_cost(returns);
  const PortfolioData& d = problem.portfolio_data();
  const int n = static_cast<int>(d.sigma.rows());

  PortfolioSolveInfo info;
  if ((returns.array() <= 0.0).all()) {
    // Zero investment is optimal and satisfies the KKT system exactly with
    // mu_nonneg = -c.
    info.solution.decision = Vec::Zero(n);
    info.solution.objective = 0.0;
    info.mu_nonneg = -returns;
    info.stage_objectives.push_back(0.0);
    return info;
  }

  // Solve with the cost scaled to unit max-norm: the barrier's accuracy and
  // stage schedule then do not depend on the cost magnitude, which keeps the
  // oracle scale-invariant up to solver tolerance.
  const double cmax = returns.cwiseAbs().maxCoeff();
  detail::QpForm f = detail::build_qp_form(problem, 0.0);
  f.q = -(returns / cmax);

  detail::BarrierOut out = detail::barrier_solve(f, tol, cmax);

  info.solution.decision = out.y;
  info.solution.objective = returns.dot(out.y);
  info.mu_nonneg = cmax * out.mu.head(n);
  info.mu_budget = cmax * out.mu[n];
  info.mu_risk = cmax * out.mu_quad;
  for (const Vec& y : out.stage_points)
    info.stage_objectives.push_back(returns.dot(y));

  detail::QpForm orig = f;
  orig.q = -returns;
  const detail::Residuals r = detail::kkt_residuals(
      orig, out.y, Vec(cmax * out.mu), cmax * out.mu_quad, Vec());
  info.stationarity_residual = r.stationarity;
  info.primal_residual = r.primal;
  info.complementarity_residual = r.complementarity;
  if (r.max() > tol) {
    std::ostringstream msg;
    msg << "portfolio_solve: IPM residuals above tolerance (stationarity "
        << r.stationarity << ", primal " << r.primal << ", complementarity "
        << r.complementarity << ")";
    throw NumericalError(msg.str());
  }
  return info;
}

Solution portfolio_solve(const DecisionProblem& problem, const Vec& returns,
                         double tol) {
  return portfolio_solve_info(problem, returns, tol).solution;
}

}  // namespace dflrb::solvers
