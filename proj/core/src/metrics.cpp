#include "dflrb/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "dflrb/errors.hpp"
#include "dflrb/oracle.hpp"

namespace dflrb::metrics {
namespace {

double mean_pairwise_norm(const std::vector<Vec>& a, const std::vector<Vec>& b,
                          NormOrder q, const char* what) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument(std::string(what) + ": count mismatch or empty");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size())
      throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    total += vec_norm(a[i] - b[i], q);
  }
  return total / static_cast<double>(a.size());
}

}  // namespace

std::string to_string(NormOrder q) {
  switch (q) {
    case NormOrder::L1: return "1";
    case NormOrder::L2: return "2";
    case NormOrder::LInf: return "inf";
  }
  return "?";
}

NormOrder norm_order_from_string(const std::string& s) {
  if (s == "1") return NormOrder::L1;
  if (s == "2") return NormOrder::L2;
  if (s == "inf") return NormOrder::LInf;
  throw ConfigError("unknown norm order '" + s + "' (expected 1, 2, or inf)");
}

double vec_norm(const Vec& v, NormOrder q) {
  switch (q) {
    case NormOrder::L1: return v.lpNorm<1>();
    case NormOrder::L2: return v.norm();
    case NormOrder::LInf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double mae(const std::vector<Vec>& predictions,
           const std::vector<Vec>& true_costs, NormOrder q) {
  return mean_pairwise_norm(predictions, true_costs, q, "mae");
}

double fe(const std::vector<Vec>& predictions_adv,
          const std::vector<Vec>& predictions_clean, NormOrder q) {
  return mean_pairwise_norm(predictions_adv, predictions_clean, q, "fe");
}

double abs_re(const DecisionProblem& problem, const Vec& true_cost,
              const Vec& decision, const Vec& decision_star) {
  const double r = regret(problem, true_cost, decision, decision_star);
  if (r >= 0.0) return r;
  // The continuous oracle meets its optimum only to solver tolerance.
  if (r >= -kFeasTol) return 0.0;
  throw NumericalError("abs_re: regret " + std::to_string(r) +
                       " below solver tolerance; optimum is not optimal");
}

double abs_fre(const DecisionProblem& problem, const Vec& true_cost,
               const Vec& decision_adv, const Vec& decision_clean,
               const Vec& decision_star) {
  return std::abs(abs_re(problem, true_cost, decision_adv, decision_star) -
                  abs_re(problem, true_cost, decision_clean, decision_star));
}

double rre(const DecisionProblem& problem, const Vec& true_cost,
           const Vec& decision_adv, const Vec& decision_star,
           double denom_tol) {
  const double denom = std::abs(true_cost.dot(decision_star));
  if (denom <= denom_tol)
    throw NumericalError("rre: optimal objective magnitude " +
                         std::to_string(denom) +
                         " at or below denominator tolerance");
  return abs_re(problem, true_cost, decision_adv, decision_star) / denom;
}

double frre(const DecisionProblem& problem, const Vec& true_cost,
            const Vec& decision_adv, const Vec& decision_clean,
            const Vec& decision_star, double denom_tol) {
  return std::abs(rre(problem, true_cost, decision_adv, decision_star, denom_tol) -
                  rre(problem, true_cost, decision_clean, decision_star, denom_tol));
}

}  // namespace dflrb::metrics
