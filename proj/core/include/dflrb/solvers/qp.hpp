#pragma once

#include <vector>

#include "dflrb/types.hpp"

namespace dflrb::solvers {

// Tikhonov damping added to the KKT matrix diagonal before factorization.
inline constexpr double kKktDamping = 1e-10;

// Solution of the Tikhonov-regularized continuous relaxation
//   min_y  q'y + mu_reg ||y||^2   s.t.  G y <= h, A y = b (, y' S y <= r)
// in minimization form, together with the multipliers needed to
// differentiate through the KKT conditions. For the shortest-path kind the
// variable space y is arc flows; `decision` projects back to node space.
struct KKTSolution {
  Vec y;        // primal, solver variable space
  Vec mu;       // linear inequality multipliers, >= 0
  double mu_quad = 0.0;  // quadratic-constraint multiplier (portfolio), >= 0
  Vec nu;       // equality multipliers (empty when no equalities)
  Vec decision; // projection of y onto the decision space
  std::vector<char> active;  // per linear inequality
  double stationarity_residual = 0.0;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
};

// Solves the regularized relaxation for the problem's feasible set with the
// given cost (problem sense; converted internally to minimization). Interior
// point with a log barrier, followed by an active-set polish when the
// constraints are all linear. Throws NumericalError if the residuals cannot
// be brought under `tol`.
KKTSolution qp_regularized_solve(const DecisionProblem& problem,
                                 const Vec& cost, double mu_reg,
                                 double tol = kFeasTol);

// Applies `downstream` = dL/dx (decision space) to the Jacobian dx/dc of
// the regularized solve above, returning dL/dc in the problem's own cost
// coordinates: for the one-variable interior maximize example, downstream
// [1] gives [1/(2 mu_reg)]. The factorized system is the transposed KKT
// Jacobian with kKktDamping on the diagonal; throws NumericalError if it is
// singular beyond repair.
Vec kkt_jacobian_vector_product(const DecisionProblem& problem,
                                const KKTSolution& kkt, double mu_reg,
                                const Vec& downstream);

}  // namespace dflrb::solvers
