#pragma once

#include <string>
#include <vector>

#include "dflrb/types.hpp"

namespace dflrb::metrics {

enum class NormOrder { L1, L2, LInf };

std::string to_string(NormOrder q);
NormOrder norm_order_from_string(const std::string& s);

struct MetricsConfig {
  NormOrder q = NormOrder::L1;
  double rre_denominator_tol = 1e-9;
};

double vec_norm(const Vec& v, NormOrder q);

// Mean prediction error: (1/|D|) sum_i ||pred_i - cost_i||_q.
double mae(const std::vector<Vec>& predictions,
           const std::vector<Vec>& true_costs, NormOrder q = NormOrder::L1);

// Fooling error: (1/|D|) sum_i ||pred_adv_i - pred_clean_i||_q. Exactly zero
// when the adversarial predictions equal the clean ones.
double fe(const std::vector<Vec>& predictions_adv,
          const std::vector<Vec>& predictions_clean,
          NormOrder q = NormOrder::L1);

// Sense-normalized regret of `decision` against the optimum, clamped to zero
// when a continuous solver leaves it negative within noise (never more than
// kFeasTol in magnitude; a larger violation throws NumericalError).
double abs_re(const DecisionProblem& problem, const Vec& true_cost,
              const Vec& decision, const Vec& decision_star);

// |abs_re(adv) - abs_re(clean)|.
double abs_fre(const DecisionProblem& problem, const Vec& true_cost,
               const Vec& decision_adv, const Vec& decision_clean,
               const Vec& decision_star);

// Relative regret: abs_re / |c . x*(c)|. Throws NumericalError when the
// denominator magnitude is at or below denom_tol; callers fall back to the
// absolute variants.
double rre(const DecisionProblem& problem, const Vec& true_cost,
           const Vec& decision_adv, const Vec& decision_star,
           double denom_tol = 1e-9);

// |rre(adv) - rre(clean)|; the denominator rule matches rre.
double frre(const DecisionProblem& problem, const Vec& true_cost,
            const Vec& decision_adv, const Vec& decision_clean,
            const Vec& decision_star, double denom_tol = 1e-9);

}  // namespace dflrb::metrics
