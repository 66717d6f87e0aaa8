#pragma once

// Internal: log-barrier engine shared by qp.cpp and portfolio.cpp.
// Minimization form over variables y:
//   min q'y + mu_reg ||y||^2  s.t.  G y <= h, A y = b (, y' quad y <= quad_rhs)
// A strictly feasible start y0 (with A y0 = b) is required.

#include <vector>

#include "dflrb/types.hpp"

namespace dflrb::solvers::detail {

struct QpForm {
  int nv = 0;
  Vec q;
  double mu_reg = 0.0;
  Mat G;
  Vec h;
  Mat A;  // 0 rows when absent
  Vec b;
  bool has_quad = false;
  Mat quad;
  double quad_rhs = 0.0;
  Vec y0;
  std::vector<int> decision_vars;  // y indices forming the decision vector
};

struct BarrierOut {
  Vec y;
  Vec mu;               // linear inequality multipliers
  double mu_quad = 0.0;
  Vec nu;               // equality multipliers
  double t_final = 0.0;
  std::vector<Vec> stage_points;  // centered y after each stage
};

// Runs stages t = 1, 10, 100, ... on the unit-scale cost q / max(1, |q|inf)
// until the per-constraint complementarity 1/t drops two orders of magnitude
// below tol. Residual guarantees are relative to the cost magnitude: the
// returned point satisfies |stationarity| <= tol * max(1, |q|inf).
BarrierOut barrier_solve(const QpForm& form, double tol);

// Cost-independent constraint data + interior start for a problem kind;
// fill_cost scatters an original-sense cost into minimization-form q.
QpForm build_qp_form(const DecisionProblem& problem, double mu_reg);
void fill_cost(const DecisionProblem& problem, const Vec& cost, QpForm* form);

struct Residuals {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
  double max() const;
};

Residuals kkt_residuals(const QpForm& form, const Vec& y, const Vec& mu,
                        double mu_quad, const Vec& nu);

}  // namespace dflrb::solvers::detail
