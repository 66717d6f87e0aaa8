#include "dflrb/surrogates.hpp"

#include <algorithm>
#include <cmath>

#include "dflrb/oracle.hpp"
#include "dflrb/solvers/qp.hpp"

namespace dflrb::surrogates {
namespace {

// argmin over the feasible set of v'x, for v given in minimization-form
// coordinates. Multiplying by the sense sign is exact in floating point, so
// min_oracle(sign * c) calls the underlying solver with bit-identical input
// to solve_oracle(problem, c).
Vec min_oracle(const DecisionProblem& problem, const Vec& v) {
  return solve_oracle(problem, problem.sign() * v).decision;
}

struct TildePair {
  Vec c_hat;
  Vec c;
};

TildePair to_min_form(const DecisionProblem& problem, const Vec& c_hat,
                      const Vec& c) {
  problem.check_cost(c_hat);
  problem.check_cost(c);
  const double s = problem.sign();
  return {s * c_hat, s * c};
}

double log_sum_exp(const Vec& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::TwoStageMSE, Method::SPOPlus,  Method::DBB,
      Method::IMLE,        Method::FY,       Method::QPTL,
      Method::MAPContrastive, Method::Pairwise, Method::PairwiseDiff,
      Method::Listwise};
  return methods;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::TwoStageMSE: return "two_stage";
    case Method::SPOPlus: return "spo";
    case Method::DBB: return "dbb";
    case Method::IMLE: return "imle";
    case Method::FY: return "fy";
    case Method::QPTL: return "qptl";
    case Method::MAPContrastive: return "map";
    case Method::Pairwise: return "pairwise";
    case Method::PairwiseDiff: return "pairwise_diff";
    case Method::Listwise: return "listwise";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  for (Method m : all_methods())
    if (to_string(m) == s) return m;
  throw ConfigError("unknown method '" + s + "'");
}

bool requires_cache(Method m) {
  return m == Method::Pairwise || m == Method::PairwiseDiff ||
         m == Method::Listwise;
}

bool is_stochastic(Method m) { return m == Method::IMLE || m == Method::FY; }

bool has_df_attack(Method m) { return m != Method::TwoStageMSE; }

void SurrogateConfig::validate() const {
  if (method == Method::DBB && !(dbb_lambda > 0.0))
    throw ConfigError("surrogate config: dbb_lambda must be > 0");
  if (method == Method::IMLE &&
      (!(imle_lambda > 0.0) || !(imle_eps > 0.0) || imle_kappa < 1))
    throw ConfigError("surrogate config: imle parameters invalid");
  if (method == Method::FY && (!(fy_eps > 0.0) || fy_samples < 1))
    throw ConfigError("surrogate config: fy parameters invalid");
  if (method == Method::QPTL && !(qptl_mu > 0.0))
    throw ConfigError("surrogate config: qptl_mu must be > 0");
  if (method == Method::Listwise && !(listwise_tau > 0.0))
    throw ConfigError("surrogate config: listwise_tau must be > 0");
  if (method == Method::Pairwise && pairwise_theta < 0.0)
    throw ConfigError("surrogate config: pairwise_theta must be >= 0");
  if (p_solve < 0.0 || p_solve > 1.0)
    throw ConfigError("surrogate config: p_solve must be in [0,1]");
}

SolutionCache SolutionCache::from_dataset(const Dataset& train) {
  SolutionCache cache;
  for (const Instance& ins : train.instances) cache.insert(ins.oracle_decision);
  return cache;
}

bool SolutionCache::contains(const Vec& decision) const {
  for (const Vec& x : pool_)
    if (x.size() == decision.size() && x == decision) return true;
  return false;
}

bool SolutionCache::insert(const Vec& decision) {
  if (contains(decision)) return false;
  pool_.push_back(decision);
  return true;
}

LossGrad mse_loss(const Vec& c_hat, const Vec& c) {
  if (c_hat.size() != c.size())
    throw std::invalid_argument("mse_loss: dimension mismatch");
  const Vec diff = c_hat - c;
  return {diff.squaredNorm(), 2.0 * diff};
}

LossGrad spo_plus(const DecisionProblem& problem, const Vec& c_hat,
                  const Vec& c, const Vec& x_star_c) {
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Vec spo_cost = 2.0 * cht - ct;
  const Vec x_sp = min_oracle(problem, spo_cost);
  LossGrad out;
  out.loss = -spo_cost.dot(x_sp) + 2.0 * cht.dot(x_star_c) - ct.dot(x_star_c);
  out.grad = 2.0 * (x_star_c - x_sp);
  return out;
}

LossGrad dbb_grad(const DecisionProblem& problem, const Vec& c_hat,
                  const Vec& c, const Vec& x_star_c, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("dbb_grad: lambda must be > 0");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Vec x_hat = min_oracle(problem, cht);
  const Vec x_lam = min_oracle(problem, cht + lambda * ct);
  LossGrad out;
  out.loss = ct.dot(x_hat) - ct.dot(x_star_c);
  Vec diff = x_lam - x_hat;
  // Differences below the continuous solver's accuracy are noise; snapping
  // them keeps the gradient exactly zero at c_hat = c for the portfolio IPM
  // (discrete decisions differ by whole components, so this never fires).
  if (diff.cwiseAbs().maxCoeff() <= kOracleSnapTol) diff.setZero();
  out.grad = diff / lambda;
  return out;
}

LossGrad imle_grad(const DecisionProblem& problem, const Vec& c_hat,
                   const Vec& c, const Vec& x_star_c, double lambda,
                   double eps_noise, int kappa, Rng& rng) {
  if (!(lambda > 0.0) || kappa < 1)
    throw ConfigError("imle_grad: lambda must be > 0 and kappa >= 1");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Eigen::Index k = cht.size();
  Vec acc = Vec::Zero(k);
  for (int s = 0; s < kappa; ++s) {
    // Draw order: k standard Gumbels per sample, component order.
    const Vec eta = rng.gumbel_vec(k);
    const Vec perturbed = cht + eps_noise * eta;
    const Vec x_map = min_oracle(problem, perturbed);
    const Vec x_target = min_oracle(problem, perturbed + lambda * ct);
    acc += x_target - x_map;
  }
  LossGrad out;
  out.grad = acc / (static_cast<double>(kappa) * lambda);
  out.loss = ct.dot(min_oracle(problem, cht)) - ct.dot(x_star_c);
  return out;
}

LossGrad fy_grad(const DecisionProblem& problem, const Vec& c_hat,
                 const Vec& c, const Vec& x_star_c, double eps_fy, int samples,
                 Rng& rng, bool zero_noise) {
  if (!(eps_fy > 0.0) || samples < 1)
    throw ConfigError("fy_grad: eps_fy must be > 0 and samples >= 1");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Eigen::Index k = cht.size();
  const Vec theta = -cht;  // maximize-sense utility
  Vec y_bar = Vec::Zero(k);
  double fmax = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec z = zero_noise ? Vec(Vec::Zero(k)) : rng.normal_vec(k);
    const Vec th = theta + eps_fy * z;
    const Vec x_s = min_oracle(problem, -th);  // argmax th'x
    y_bar += x_s;
    fmax += th.dot(x_s);
  }
  y_bar /= static_cast<double>(samples);
  fmax /= static_cast<double>(samples);
  LossGrad out;
  out.loss = fmax - theta.dot(x_star_c);
  out.grad = x_star_c - y_bar;  // d/d c_hat~ of the Fenchel-Young objective
  return out;
}

LossGrad qptl_grad(const DecisionProblem& problem, const Vec& c_hat,
                   const Vec& c, const Vec& x_star_c, double mu_reg) {
  const double s = problem.sign();
  const solvers::KKTSolution kkt =
      solvers::qp_regularized_solve(problem, c_hat, mu_reg);
  LossGrad out;
  out.loss = regret(problem, c, kkt.decision, x_star_c);
  // dL/dx of min-form regret is sign*c; the JVP returns dL/dc_hat in the
  // problem's own coordinates, converted back to min form here.
  const Vec grad_orig =
      solvers::kkt_jacobian_vector_product(problem, kkt, mu_reg, Vec(s * c));
  out.grad = s * grad_orig;
  return out;
}

LossGrad map_contrastive(const DecisionProblem& problem, const Vec& c_hat,
                         const Vec& c, const Vec& x_star_c) {
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Vec x_hat = min_oracle(problem, cht);
  LossGrad out;
  out.loss = cht.dot(x_star_c) - cht.dot(x_hat);
  out.grad = x_star_c - x_hat;
  return out;
}

LossGrad pairwise_loss(const DecisionProblem& problem, const Vec& c_hat,
                       const Vec& c, const Vec& x_star_c, double theta,
                       const SolutionCache& cache) {
  if (theta < 0.0) throw ConfigError("pairwise_loss: theta must be >= 0");
  if (cache.size() == 0) throw ConfigError("pairwise_loss: empty cache");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  LossGrad out;
  out.grad = Vec::Zero(cht.size());
  const double star_val = cht.dot(x_star_c);
  for (const Vec& x : cache.pool()) {
    if (x == x_star_c) continue;
    const double violation = theta + star_val - cht.dot(x);
    if (violation > 0.0) {  // strict: exact hinge boundary contributes 0
      out.loss += violation;
      out.grad += x_star_c - x;
    }
  }
  return out;
}

LossGrad pairwise_diff_loss(const DecisionProblem& problem, const Vec& c_hat,
                            const Vec& c, const Vec& x_star_c,
                            const SolutionCache& cache) {
  if (cache.size() == 0) throw ConfigError("pairwise_diff_loss: empty cache");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const Vec diff = cht - ct;
  LossGrad out;
  out.grad = Vec::Zero(cht.size());
  for (const Vec& x : cache.pool()) {
    const Vec d = x_star_c - x;
    const double r = diff.dot(d);
    out.loss += r * r;
    out.grad += 2.0 * r * d;
  }
  return out;
}

LossGrad listwise_loss(const DecisionProblem& problem, const Vec& c_hat,
                       const Vec& c, [[maybe_unused]] const Vec& x_star_c,
                       double tau, const SolutionCache& cache) {
  if (!(tau > 0.0)) throw ConfigError("listwise_loss: tau must be > 0");
  if (cache.size() == 0) throw ConfigError("listwise_loss: empty cache");
  const auto [cht, ct] = to_min_form(problem, c_hat, c);
  const int n = cache.size();
  Vec logits_c(n), logits_h(n);
  for (int i = 0; i < n; ++i) {
    logits_c[i] = -ct.dot(cache.pool()[i]) / tau;
    logits_h[i] = -cht.dot(cache.pool()[i]) / tau;
  }
  const double lse_c = log_sum_exp(logits_c);
  const double lse_h = log_sum_exp(logits_h);
  LossGrad out;
  out.grad = Vec::Zero(cht.size());
  for (int i = 0; i < n; ++i) {
    const double p_c = std::exp(logits_c[i] - lse_c);
    const double p_h = std::exp(logits_h[i] - lse_h);
    out.loss -= p_c * (logits_h[i] - lse_h);
    out.grad += (p_c - p_h) / tau * cache.pool()[i];
  }
  return out;
}

void cache_update(SolutionCache& cache, const DecisionProblem& problem,
                  const Vec& c_hat, double p_solve, Rng& rng) {
  const double u = rng.uniform01();
  if (u < p_solve) cache.insert(solve_oracle(problem, c_hat).decision);
}

LossGrad loss_and_grad(const DecisionProblem& problem,
                       const SurrogateConfig& config, const Vec& c_hat,
                       const Vec& c, const Vec& x_star_c,
                       const SolutionCache* cache, Rng* rng) {
  if (requires_cache(config.method) && cache == nullptr)
    throw ConfigError("loss_and_grad: method '" + to_string(config.method) +
                      "' requires a solution cache");
  if (is_stochastic(config.method) && rng == nullptr)
    throw ConfigError("loss_and_grad: method '" + to_string(config.method) +
                      "' requires an rng");
  switch (config.method) {
    case Method::TwoStageMSE: {
      const auto [cht, ct] = to_min_form(problem, c_hat, c);
      return mse_loss(cht, ct);
    }
    case Method::SPOPlus:
      return spo_plus(problem, c_hat, c, x_star_c);
    case Method::DBB:
      return dbb_grad(problem, c_hat, c, x_star_c, config.dbb_lambda);
    case Method::IMLE:
      return imle_grad(problem, c_hat, c, x_star_c, config.imle_lambda,
                       config.imle_eps, config.imle_kappa, *rng);
    case Method::FY:
      return fy_grad(problem, c_hat, c, x_star_c, config.fy_eps,
                     config.fy_samples, *rng, config.fy_zero_noise);
    case Method::QPTL:
      return qptl_grad(problem, c_hat, c, x_star_c, config.qptl_mu);
    case Method::MAPContrastive:
      return map_contrastive(problem, c_hat, c, x_star_c);
    case Method::Pairwise:
      return pairwise_loss(problem, c_hat, c, x_star_c, config.pairwise_theta,
                           *cache);
    case Method::PairwiseDiff:
      return pairwise_diff_loss(problem, c_hat, c, x_star_c, *cache);
    case Method::Listwise:
      return listwise_loss(problem, c_hat, c, x_star_c, config.listwise_tau,
                           *cache);
  }
  throw ConfigError("loss_and_grad: unknown method");
}

}  // namespace dflrb::surrogates
